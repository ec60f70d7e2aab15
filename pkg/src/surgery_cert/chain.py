"""Flows on quarter-integral surgeries of the closed n-chain link.

Components are indexed ``0..n-1``.  Each boundary torus carries two
frames: ``(mu, lam)`` from the link components and ``(mu', lam')`` from the
fibre surface, whose boundary runs against ``L_0``.  Fractional Dehn twist
coefficients are inputs: ``-1/4`` at component 0 and 0 elsewhere.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .homology import (SurgerySpec, chain_link, h1_order, is_odd_order, ostrowski_bound,
                       ostrowski_margins, positivity_threshold)
from .lspace import CertificateError as TreeError, certificate_tree
from .slopes import (LONGITUDE, FdtcData, FramingChange, TorusSlope, change_frame, degeneracy_from_fdtc,
                     delta, intersection)

CHAIN_FDTC_AT_0 = Fraction(-1, 4)
CHAIN_FDTC_ELSEWHERE = Fraction(0)

THREADS_ENV = "SURGERY_CERT_THREADS"


class ChainCertificateError(Exception):
    """A certified inequality failed; the message carries the instantiated values."""


class FriedSurgeryError(ChainCertificateError):
    pass


def refined_ell(n: int) -> tuple[int, ...]:
    """Multiplicities read off an invariant train track: 1 at 0, 1 and n-1, else 2."""
    return tuple(1 if i in (0, 1, n - 1) else 2 for i in range(n))


@dataclass(frozen=True)
class ChainParams:
    n: int
    M: int
    mode: str = "refined"
    ell: Optional[tuple[int, ...]] = None
    interior_prongs: tuple[int, ...] = ()
    signs: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        n, M = self.n, self.M
        if n < 4 or n % 2:
            raise ValueError(f"n must be even and at least 4 (got {n})")
        if M % 2 == 0 or M <= 8 * n:
            raise ValueError(f"M must be odd and greater than 8n = {8 * n} (got {M})")
        if self.mode not in ("refined", "interval"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.ell is not None:
            object.__setattr__(self, "ell", tuple(self.ell))
            if len(self.ell) != n or not all(1 <= x <= n + 1 for x in self.ell):
                raise ValueError(f"ell must be {n} integers in [1, {n + 1}]")
        object.__setattr__(self, "interior_prongs", tuple(self.interior_prongs))
        for s in self.interior_prongs:
            if not 3 <= s <= n + 2:
                raise ValueError(f"interior prong count {s} outside [3, {n + 2}]")
        if self.signs is not None:
            object.__setattr__(self, "signs", tuple(self.signs))

    def ell_tuples(self):
        if self.ell is not None:
            yield self.ell
        elif self.mode == "refined":
            yield refined_ell(self.n)
        else:
            yield from itertools.product(range(1, self.n + 2), repeat=self.n)

    def ell_count(self) -> int:
        if self.ell is not None or self.mode == "refined":
            return 1
        return (self.n + 1) ** self.n

    def representative_ell(self) -> tuple[int, ...]:
        return self.ell if self.ell is not None else refined_ell(self.n)

    def linking(self):
        return chain_link(self.n, self.signs)

    def surgery_slopes(self) -> list[Fraction]:
        return [Fraction(self.M ** (i + 1), 4) for i in range(self.n)]

    def surgery_spec(self, rotation: int = 0) -> SurgerySpec:
        r = self.surgery_slopes()
        return SurgerySpec(tuple(r[(i + rotation) % self.n] for i in range(self.n)))


# -- framings and degeneracy slopes ------------------------------------------------

def chain_framings(n: int) -> list[FramingChange]:
    """Per component, the change from fibre coordinates ``(mu', lam')`` to ``(mu, lam)``."""
    if n < 3:
        raise ValueError("chain framings need n >= 3")
    frames = []
    for i in range(n):
        if i == 0:
            frames.append(FramingChange.from_images(TorusSlope(-1, 0), TorusSlope(2, -1)))
        elif i in (1, n - 1):
            frames.append(FramingChange.from_images(TorusSlope(1, 0), TorusSlope(0, 1)))
        else:
            frames.append(FramingChange.from_images(TorusSlope(1, 0), TorusSlope(2, 1)))
    return frames


def chain_fdtc(ell: Sequence[int]) -> list[FdtcData]:
    """FDTC inputs: ``q_0 = 4 l_0`` with twist ``-l_0``, and ``q_i = l_i`` untwisted."""
    out = []
    for i, li in enumerate(ell):
        if i == 0:
            fd = FdtcData(prongs=4 * li, twist_numerator=-li)
            assert fd.coefficient == CHAIN_FDTC_AT_0
        else:
            fd = FdtcData(prongs=li, twist_numerator=0)
        out.append(fd)
    return out


def degeneracy_via_fdtc(n: int, ell: Sequence[int]) -> list[TorusSlope]:
    frames = chain_framings(n)
    return [change_frame(degeneracy_from_fdtc(fd), f)[0] for fd, f in zip(chain_fdtc(ell), frames)]


def chain_degeneracy_slopes(p: ChainParams, ell: Optional[Sequence[int]] = None) -> list[TorusSlope]:
    """``l_0 (-6 mu_0 + lam_0)`` and ``l_i mu_i``, checked against the FDTC route."""
    ell = tuple(ell) if ell is not None else p.representative_ell()
    if len(ell) != p.n:
        raise ValueError("ell has the wrong length")
    direct = [TorusSlope(-6 * li, li) if i == 0 else TorusSlope(li, 0) for i, li in enumerate(ell)]
    via = degeneracy_via_fdtc(p.n, ell)
    if direct != via:
        raise ChainCertificateError(f"degeneracy slopes disagree: {direct} vs {via}")
    return direct


# -- prongs -------------------------------------------------------------------------

@dataclass(frozen=True)
class ProngProfile:
    core_prongs: tuple[int, ...]
    interior_prongs: tuple[int, ...] = ()

    @property
    def maximum(self) -> int:
        return max(self.core_prongs + self.interior_prongs)


def rotated_surgery_slopes(p: ChainParams, rotation: int) -> list[TorusSlope]:
    """Slope ``M^([i+k]+1) mu_i + 4 lam_i`` on component ``i`` for rotation ``k``."""
    return [TorusSlope(p.M ** ((i + rotation) % p.n + 1), 4) for i in range(p.n)]


def fried_prongs(p: ChainParams, rotation: int, ell: Optional[Sequence[int]] = None,
                 degeneracy: Optional[Sequence[TorusSlope]] = None) -> ProngProfile:
    if not 0 <= rotation < p.n:
        raise ValueError(f"rotation must lie in [0, {p.n - 1}]")
    d = degeneracy if degeneracy is not None else chain_degeneracy_slopes(p, ell)
    cores = tuple(delta(r, di) for r, di in zip(rotated_surgery_slopes(p, rotation), d))
    for i, c in enumerate(cores):
        if c < 2:
            raise FriedSurgeryError(f"rotation {rotation}: core {i} has distance {c} < 2")
    return ProngProfile(core_prongs=cores, interior_prongs=p.interior_prongs)


def closed_form_prongs(p: ChainParams, rotation: int, ell: Sequence[int]) -> tuple[int, ...]:
    return tuple(li * (p.M ** (rotation + 1) + 24) if i == 0 else 4 * li for i, li in enumerate(ell))


# -- orbit inequivalence ------------------------------------------------------------

@dataclass
class InequivalenceCertificate:
    n: int
    M: int
    mode: str
    tuples_checked: int
    base_maxima: tuple[int, ...]
    """``M^(k+1) + 24`` for k = 0..n-1; the actual maxima are these times ``l_0``"""
    min_core_prong: int
    max_noncore_bound: int
    """largest prong count away from the component-0 core over all checked tuples"""
    example_ell: tuple[int, ...] = ()
    example_maxima: tuple[int, ...] = ()
    example_profiles: list = field(default_factory=list)


def _check_tuple(p: ChainParams, ell, frames_ok=True):
    d = chain_degeneracy_slopes(p, ell)
    maxima = []
    min_core = None
    other_max = max(p.interior_prongs, default=0)
    for k in range(p.n):
        prof = fried_prongs(p, k, degeneracy=d)
        cores = prof.core_prongs
        low = min(cores)
        if low < 3:
            raise ChainCertificateError(
                f"ell={ell}, rotation {k}: core prong {low} < 3, no-perfect-fits criterion fails")
        min_core = low if min_core is None else min(min_core, low)
        top = cores[0]
        expected = ell[0] * (p.M ** (k + 1) + 24)
        if top != expected:
            raise ChainCertificateError(f"ell={ell}, rotation {k}: core 0 has {top} prongs, expected {expected}")
        rest = cores[1:] + prof.interior_prongs
        if rest and max(rest) >= top:
            raise ChainCertificateError(
                f"ell={ell}, rotation {k}: maximum {top} at core 0 is not unique (other orbit has {max(rest)})")
        other_max = max([other_max, *rest])
        maxima.append(top)
    if len(set(maxima)) != len(maxima):
        raise ChainCertificateError(f"ell={ell}: maxima {maxima} are not pairwise distinct")
    return min_core, other_max


def _check_chunk(args):
    p, l0 = args
    min_core, other = None, 0
    count = 0
    for rest in itertools.product(range(1, p.n + 2), repeat=p.n - 1):
        mc, om = _check_tuple(p, (l0,) + rest)
        min_core = mc if min_core is None else min(min_core, mc)
        other = max(other, om)
        count += 1
    return count, min_core, other


def _threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def inequivalence_certificate(p: ChainParams, workers: Optional[int] = None) -> InequivalenceCertificate:
    """Fried validity, no perfect fits, a unique maximal orbit, and distinct maxima.

    Checked for every multiplicity tuple the mode allows.  In interval mode
    the sweep is split by ``l_0``; results are merged in order, so the
    output does not depend on the worker count.
    """
    workers = workers if workers is not None else _threads()
    if p.ell is None and p.mode == "interval":
        chunks = [(p, l0) for l0 in range(1, p.n + 2)]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as ex:
                results = list(ex.map(_check_chunk, chunks))
        else:
            results = [_check_chunk(c) for c in chunks]
        count = sum(r[0] for r in results)
        min_core = min(r[1] for r in results)
        other = max(r[2] for r in results)
    else:
        count = 0
        min_core, other = None, 0
        for ell in p.ell_tuples():
            mc, om = _check_tuple(p, ell)
            min_core = mc if min_core is None else min(min_core, mc)
            other = max(other, om)
            count += 1
    base = tuple(p.M ** (k + 1) + 24 for k in range(p.n))
    rep = p.representative_ell()
    profiles = [fried_prongs(p, k, rep) for k in range(p.n)]
    return InequivalenceCertificate(
        n=p.n, M=p.M, mode=p.mode if p.ell is None else "explicit", tuples_checked=count,
        base_maxima=base, min_core_prong=min_core, max_noncore_bound=other,
        example_ell=rep, example_maxima=tuple(pr.core_prongs[0] for pr in profiles),
        example_profiles=profiles)


# -- prong counting on the fibre -------------------------------------------------------

def euler_prong_check(boundary_prongs: Sequence[int], interior_prongs: Sequence[int], genus: int) -> bool:
    """Does ``sum(2 - q_i) + sum(2 - s_j)`` equal the Euler characteristic ``2 - 2g``?"""
    if any(q < 1 for q in boundary_prongs):
        raise ValueError("boundary prong counts must be at least 1")
    if any(s < 3 for s in interior_prongs):
        raise ValueError("interior singularities have at least 3 prongs")
    if genus < 0:
        raise ValueError("genus must be nonnegative")
    total = sum(2 - q for q in boundary_prongs) + sum(2 - s for s in interior_prongs)
    return total == 2 - 2 * genus


def prong_bounds(n: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """Ranges ``[1, n+1]`` for boundary and ``[3, n+2]`` for interior prongs on a genus-one fibre."""
    return (1, n + 1), (3, n + 2)


# -- Birkhoff sections ----------------------------------------------------------------

@dataclass(frozen=True)
class BirkhoffRow:
    component: int
    fiber_pairing: int
    degeneracy_pairing: int

    @property
    def opposite(self) -> bool:
        return self.fiber_pairing * self.degeneracy_pairing < 0


def birkhoff_case_table(n: int, i: int, p: int, q: int, ell: Sequence[int]) -> tuple[int, int]:
    """Closed-form pairings of ``p mu_i + q lam_i`` with ``lam'_i`` and ``d_i``."""
    if i == 0:
        return p + 2 * q, ell[0] * (-p - 6 * q)
    fiber = -p if i in (1, n - 1) else -p + 2 * q
    return fiber, ell[i] * q


def birkhoff_sign_check(p: ChainParams, slope, ell: Optional[Sequence[int]] = None) -> list[BirkhoffRow]:
    """Pair ``slope`` with each fibre longitude and degeneracy slope.

    Requires ``slope > 2``; fails if a pairing leaves the closed-form table
    or if the two signs agree on some component.
    """
    slope = Fraction(slope)
    if slope <= 2:
        raise ValueError(f"slope {slope} must exceed 2")
    sp, sq = slope.numerator, slope.denominator
    ell = tuple(ell) if ell is not None else p.representative_ell()
    d = chain_degeneracy_slopes(p, ell)
    r = TorusSlope(sp, sq)
    rows = []
    for i, frame in enumerate(chain_framings(p.n)):
        lam_prime, _ = change_frame(LONGITUDE, frame)
        row = BirkhoffRow(i, intersection(r, lam_prime), intersection(r, d[i]))
        expected = birkhoff_case_table(p.n, i, sp, sq, ell)
        if (row.fiber_pairing, row.degeneracy_pairing) != expected:
            raise ChainCertificateError(
                f"component {i}: pairings {(row.fiber_pairing, row.degeneracy_pairing)} != table {expected}")
        if not row.opposite:
            raise ChainCertificateError(f"component {i}: pairings {expected} do not have opposite signs")
        rows.append(row)
    return rows


# -- knot surgeries ----------------------------------------------------------------------

def knot_surgery_check(genus: int, r, deg: TorusSlope) -> int:
    """Distance between ``r = p/q > 4g`` and a degeneracy slope ``a mu + b lam`` with ``a/b <= 4g - 2``."""
    r = Fraction(r)
    problems = []
    if genus < 1:
        problems.append(f"genus {genus} < 1")
    if deg.q < 1:
        problems.append(f"degeneracy slope needs b >= 1 (got {deg.q})")
    elif Fraction(deg.p, deg.q) > 4 * genus - 2:
        problems.append(f"a/b = {Fraction(deg.p, deg.q)} exceeds 4g-2 = {4 * genus - 2}")
    if r <= 4 * genus:
        problems.append(f"r = {r} is not greater than 4g = {4 * genus}")
    if problems:
        raise ValueError("; ".join(problems))
    dist = delta(TorusSlope(r.numerator, r.denominator), deg)
    if dist < 3:
        raise ChainCertificateError(f"distance {dist} < 3 for r={r}, degeneracy {deg}")
    return dist


# -- the whole construction --------------------------------------------------------------

@dataclass
class Item:
    name: str
    status: str
    """"pass", "fail", "conditional" or "not checked\""""
    detail: dict = field(default_factory=dict)
    message: str = ""


ASSUMPTIONS = (
    ("hyperbolicity", "the quarter-integral fillings are hyperbolic for M large; not computed"),
    ("fdtc", "fractional Dehn twist coefficients -1/4 at component 0 and 0 elsewhere are taken as given"),
    ("lspace-constant", "integral surgeries with all coefficients >= C are L-spaces (C supplied by the user)"),
)


@dataclass
class MainReport:
    params: ChainParams
    C: Optional[int]
    items: list
    assumptions: tuple = ASSUMPTIONS

    @property
    def passed(self) -> bool:
        return all(it.status != "fail" for it in self.items)


def _run(name, fn):
    try:
        status, detail, msg = fn()
        return Item(name, status, detail, msg)
    except (ChainCertificateError, TreeError, ArithmeticError, ValueError) as exc:
        return Item(name, "fail", {}, f"{type(exc).__name__}: {exc}")


def theorem_main_verifier(p: ChainParams, C: Optional[int] = None, skip_lspace: bool = False,
                          workers: Optional[int] = None) -> MainReport:
    L = p.linking()
    spec = p.surgery_spec()
    items = []

    def prongs():
        rep = p.representative_ell()
        table = []
        for k in range(p.n):
            prof = fried_prongs(p, k, rep)
            if prof.core_prongs != closed_form_prongs(p, k, rep):
                raise ChainCertificateError(f"rotation {k}: {prof.core_prongs} != closed form")
            table.append(list(prof.core_prongs))
        return "pass", {"ell": list(rep), "core_prongs": table}, ""

    def inequivalence():
        cert = inequivalence_certificate(p, workers)
        return "pass", {
            "mode": cert.mode, "tuples_checked": cert.tuples_checked,
            "base_maxima": [str(m) for m in cert.base_maxima],
            "min_core_prong": cert.min_core_prong,
            "max_other_prong": cert.max_noncore_bound,
        }, "maxima l_0*(M^(k+1)+24) are unique per flow and pairwise distinct"

    def homology():
        parity = is_odd_order(L, spec)
        bound = ostrowski_bound(L, spec)
        if not parity.odd:
            raise ChainCertificateError(f"|H_1| = {parity.order} is even")
        if bound is None or bound > parity.order:
            raise ChainCertificateError(f"Ostrowski bound {bound} fails against {parity.order}")
        for k in range(1, p.n):
            perm = [(i + k) % p.n for i in range(p.n)]
            rot = h1_order(L.permuted(perm), spec.permuted(perm))
            if rot != parity.order:
                raise ChainCertificateError(f"rotation {k} changes |H_1|: {rot} != {parity.order}")
        return "pass", {
            "slopes": [f"{a.numerator}/{a.denominator}" for a in spec.slopes],
            "linking_signs": list(p.signs) if p.signs else [-1] * p.n,
            "h1_order": str(parity.order), "odd": parity.odd,
            "all_denominators_even": parity.all_denominators_even,
            "ostrowski_margins": [str(m) for m in ostrowski_margins(L, spec)],
            "ostrowski_bound": str(bound),
        }, ""

    def birkhoff():
        tuples = [p.representative_ell()]
        if p.ell is None and p.mode == "interval":
            tuples = [(1,) * p.n, (p.n + 1,) * p.n]
        rows = []
        for ell in tuples:
            for i, a in enumerate(spec.slopes):
                row = birkhoff_sign_check(p, a, ell)[i]
                rows.append({"component": i, "ell": ell[i], "fiber": str(row.fiber_pairing),
                             "degeneracy": str(row.degeneracy_pairing)})
        return "pass", {"rows": rows}, "every r_i meets lam'_i and d_i with opposite signs (negative Birkhoff section)"

    def lspace():
        if skip_lspace or C is None:
            return "not checked", {}, "skipped"
        _, threshold = positivity_threshold(L)
        c_prime = max(C, threshold)
        need = {"C": C, "C_prime": c_prime, "M_needed_above": 4 * c_prime}
        if min(spec.slopes) < C:
            return "conditional", need, (
                f"slopes start at {min(spec.slopes)} < C={C}; the tree needs M > 4C' = {4 * c_prime}")
        cert = certificate_tree(L, spec, C)
        return "pass", dict(need, positivity=cert.positivity, internal_nodes=cert.internal_nodes,
                            leaves=cert.leaves, root_h1=str(cert.tree.h1)), cert.statement

    for name, fn in (("prong-table", prongs), ("inequivalence", inequivalence), ("homology", homology),
                     ("birkhoff", birkhoff), ("lspace", lspace)):
        items.append(_run(name, fn))
    return MainReport(params=p, C=C, items=items)
