"""First homology of rational surgeries on links in S^3.

For a link with linking numbers ``l_ij`` and slopes ``a_i = p_i/q_i``
(lowest terms, ``q_i >= 1``) the group ``H_1`` is presented by the integer
matrix with ``p_i`` on the diagonal and ``q_i * l_ij`` off it.  Writing
``f(x) = det(X)`` for the matrix with ``x`` on the diagonal and ``l_ij``
off it, ``det(A) = q_1...q_n * f(a)`` holds exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, prod
from typing import Callable, Optional, Sequence

from .linalg import bareiss_det, rational_det


class DimensionError(ValueError):
    pass


class PositivityError(ArithmeticError):
    """The dominance bound fails at the corner for some permutation."""

    def __init__(self, message, permutation=None):
        super().__init__(message)
        self.permutation = permutation


@dataclass(frozen=True)
class LinkingMatrix:
    """Symmetric matrix of pairwise linking numbers; the diagonal is unused."""

    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.entries)
        if n < 1:
            raise ValueError("a link has at least one component")
        rows = []
        for i, row in enumerate(self.entries):
            if len(row) != n:
                raise DimensionError("linking matrix must be square")
            rows.append(tuple(0 if i == j else int(v) for j, v in enumerate(row)))
        for i in range(n):
            for j in range(i + 1, n):
                if rows[i][j] != rows[j][i]:
                    raise ValueError(f"linking matrix not symmetric at ({i}, {j})")
        object.__setattr__(self, "entries", tuple(rows))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "LinkingMatrix":
        return cls(tuple(tuple(r) for r in rows))

    @classmethod
    def zero(cls, n: int) -> "LinkingMatrix":
        return cls(tuple(tuple(0 for _ in range(n)) for _ in range(n)))

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def max_abs(self) -> int:
        return max((abs(self.entries[i][j]) for i in range(self.n) for j in range(self.n) if i != j),
                   default=0)

    def permuted(self, perm: Sequence[int]) -> "LinkingMatrix":
        """Relabel components: new component ``i`` is old component ``perm[i]``."""
        return LinkingMatrix(tuple(tuple(self.entries[perm[i]][perm[j]] for j in range(self.n))
                                   for i in range(self.n)))


def chain_link(n: int, signs: Optional[Sequence[int]] = None) -> LinkingMatrix:
    """Linking matrix of the closed n-component chain.

    ``signs[i]`` is the linking number of components ``i`` and ``i+1 (mod n)``;
    each must be +1 or -1.  The default of all -1 is what the Seifert framings
    of the fibre surface force for the standard orientations.
    """
    if n < 3:
        raise ValueError("a closed chain needs at least 3 components")
    if signs is None:
        signs = [-1] * n
    if len(signs) != n or any(s not in (1, -1) for s in signs):
        raise ValueError("need n adjacent signs, each +1 or -1")
    rows = [[0] * n for _ in range(n)]
    for i, s in enumerate(signs):
        j = (i + 1) % n
        rows[i][j] = rows[j][i] = s
    return LinkingMatrix.from_rows(rows)


def hopf_link(linking: int = 1) -> LinkingMatrix:
    return LinkingMatrix.from_rows([[0, linking], [linking, 0]])


@dataclass(frozen=True)
class SurgerySpec:
    """Per-component surgery coefficients, stored as reduced Fractions."""

    slopes: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "slopes", tuple(Fraction(a) for a in self.slopes))
        if not self.slopes:
            raise ValueError("empty surgery spec")

    @classmethod
    def of(cls, *slopes) -> "SurgerySpec":
        return cls(tuple(Fraction(a) for a in slopes))

    @property
    def n(self) -> int:
        return len(self.slopes)

    @property
    def numerators(self) -> list[int]:
        return [a.numerator for a in self.slopes]

    @property
    def denominators(self) -> list[int]:
        return [a.denominator for a in self.slopes]

    def replace(self, i: int, value) -> "SurgerySpec":
        s = list(self.slopes)
        s[i] = Fraction(value)
        return SurgerySpec(tuple(s))

    def permuted(self, perm: Sequence[int]) -> "SurgerySpec":
        return SurgerySpec(tuple(self.slopes[k] for k in perm))

    def is_integral(self) -> bool:
        return all(a.denominator == 1 for a in self.slopes)

    def __str__(self):
        return "(" + ", ".join(str(a) for a in self.slopes) + ")"


def _check_dims(L: LinkingMatrix, s: SurgerySpec):
    if L.n != s.n:
        raise DimensionError(f"linking matrix has {L.n} components but {s.n} slopes were given")


def presentation_matrix(L: LinkingMatrix, s: SurgerySpec) -> list[list[int]]:
    _check_dims(L, s)
    rows = []
    for i, a in enumerate(s.slopes):
        q = a.denominator
        rows.append([a.numerator if i == j else q * L[i, j] for j in range(L.n)])
    return rows


def signed_det(L: LinkingMatrix, s: SurgerySpec) -> int:
    return bareiss_det(presentation_matrix(L, s))


def h1_order(L: LinkingMatrix, s: SurgerySpec) -> int:
    """``|H_1|`` of the surgered manifold; 0 means ``H_1`` is infinite."""
    return abs(signed_det(L, s))


class SurgeryDeterminant:
    """The multiaffine polynomial ``f(x) = det(diag(x) + off-diagonal l_ij)``."""

    def __init__(self, L: LinkingMatrix):
        self.L = L

    @property
    def n(self) -> int:
        return self.L.n

    def _matrix(self, x: Sequence) -> list[list[Fraction]]:
        n = self.n
        return [[Fraction(x[i]) if i == j else Fraction(self.L[i, j]) for j in range(n)]
                for i in range(n)]

    def __call__(self, x: Sequence) -> Fraction:
        if len(x) != self.n:
            raise DimensionError(f"f takes {self.n} arguments, got {len(x)}")
        return rational_det(self._matrix(x))

    def affine_decompose(self, i: int) -> tuple[Callable[[Sequence], Fraction], Callable[[Sequence], Fraction]]:
        """Return ``(g_i, h_i)`` with ``f(x) = g_i(x') * x_i + h_i(x')``.

        Both take the ``n - 1`` remaining coordinates ``x'`` in order.  They
        come from cofactor expansion along row ``i``: ``g_i`` is the principal
        minor, ``h_i`` the signed sum of the off-diagonal cofactors.
        """
        n = self.n
        if not 0 <= i < n:
            raise IndexError(f"component index {i} out of range for n={n}")
        others = [j for j in range(n) if j != i]

        def full(rest):
            if len(rest) != n - 1:
                raise DimensionError(f"expected {n - 1} arguments, got {len(rest)}")
            x = [Fraction(0)] * n
            for j, v in zip(others, rest):
                x[j] = Fraction(v)
            return x

        def minor(x, row, col):
            m = self._matrix(x)
            return [[m[r][c] for c in range(n) if c != col] for r in range(n) if r != row]

        def g(rest):
            return rational_det(minor(full(rest), i, i))

        def h(rest):
            x = full(rest)
            total = Fraction(0)
            for j in others:
                lij = self.L[i, j]
                if lij:
                    sign = -1 if (i + j) % 2 else 1
                    total += sign * lij * rational_det(minor(x, i, j))
            return total

        return g, h


def f_eval(D: SurgeryDeterminant, x: Sequence) -> Fraction:
    return D(x)


def affine_decompose(D: SurgeryDeterminant, i: int):
    return D.affine_decompose(i)


# -- Ostrowski's diagonal-dominance bound --------------------------------------

def ostrowski_margins(L: LinkingMatrix, s: SurgerySpec) -> list[int]:
    """Row margins ``|p_i| - sum_j |q_i l_ij|`` of the presentation matrix."""
    A = presentation_matrix(L, s)
    return [abs(A[i][i]) - sum(abs(A[i][j]) for j in range(L.n) if j != i) for i in range(L.n)]


def ostrowski_bound(L: LinkingMatrix, s: SurgerySpec) -> Optional[int]:
    """Certified lower bound for ``|H_1|``, or None when some margin is <= 0."""
    margins = ostrowski_margins(L, s)
    if all(m > 0 for m in margins):
        return prod(margins)
    return None


# -- positivity of f beyond a threshold ----------------------------------------

@dataclass
class PositivityCertificate:
    n: int
    k: int
    threshold: int
    corner: int
    permutations_checked: int
    worst_ratio: Fraction
    """largest bound ``|l_{j,s(j)}| / M`` over the non-identity permutations"""
    lower_bound_factor: Fraction
    """``1 - (n! - 1) * worst_ratio``; positive means ``f > 0`` beyond the corner"""
    f_at_corner: Fraction
    witnesses: list = field(default_factory=list, repr=False)

    @property
    def holds(self) -> bool:
        return self.lower_bound_factor > 0


def positivity_threshold(L: LinkingMatrix) -> tuple[int, int]:
    """``(k, n! * k)`` with ``k = max |l_ij| + 1``."""
    k = L.max_abs() + 1
    return k, factorial(L.n) * k


def positivity_certificate(D: SurgeryDeterminant, M: Optional[int] = None,
                           keep_witnesses: bool = False) -> PositivityCertificate:
    """Check term-by-term dominance of ``x_1...x_n`` in the expansion of ``f``.

    For each non-identity permutation ``s`` one off-diagonal factor
    ``l_{j,s(j)}`` is singled out and ``|l_{j,s(j)}| / M < 1/n!`` is verified
    exactly; every other factor is bounded by 1, which needs ``M >= k``.
    The bounds only improve as the ``x_i`` grow, so success at the corner
    ``(M, ..., M)`` gives ``f(x) > 0`` whenever all ``x_i >= M``.
    """
    L = D.L
    n = L.n
    if n > 10:
        raise ValueError("permutation enumeration is limited to n <= 10")
    k, threshold = positivity_threshold(L)
    if M is None:
        M = threshold
    if M < 1:
        raise ValueError("corner must be positive")
    nfact = factorial(n)
    limit = Fraction(1, nfact)
    worst = Fraction(0)
    count = 0
    witnesses = []
    for sigma in itertools.permutations(range(n)):
        moved = [j for j in range(n) if sigma[j] != j]
        if not moved:
            continue
        count += 1
        j = max(moved, key=lambda t: abs(L[t, sigma[t]]))
        ratio = Fraction(abs(L[j, sigma[j]]), M)
        if not ratio < limit:
            raise PositivityError(
                f"permutation {sigma}: |l[{j},{sigma[j]}]|/M = {ratio} is not below 1/{nfact}",
                permutation=sigma)
        for t in moved:
            if abs(L[t, sigma[t]]) > M:
                raise PositivityError(
                    f"permutation {sigma}: |l[{t},{sigma[t]}]| exceeds the corner {M}",
                    permutation=sigma)
        worst = max(worst, ratio)
        if keep_witnesses:
            witnesses.append((sigma, j, ratio))
    factor = 1 - (nfact - 1) * (worst if count else Fraction(0))
    f_corner = D([M] * n)
    cert = PositivityCertificate(n=n, k=k, threshold=threshold, corner=M,
                                 permutations_checked=count, worst_ratio=worst,
                                 lower_bound_factor=factor, f_at_corner=f_corner,
                                 witnesses=witnesses)
    if not cert.holds:
        raise PositivityError(f"dominance factor {factor} is not positive")
    return cert


# -- parity ----------------------------------------------------------------------

@dataclass(frozen=True)
class ParityReport:
    order: int
    odd: bool
    all_denominators_even: bool

    def __bool__(self):
        return self.odd


def is_odd_order(L: LinkingMatrix, s: SurgerySpec) -> ParityReport:
    """Parity of ``|H_1|``.

    When every ``q_i`` is even each ``p_i`` is odd, the presentation matrix
    is the identity mod 2 and the order is odd; that structural condition
    is reported next to the actual parity.
    """
    order = h1_order(L, s)
    return ParityReport(order=order, odd=order % 2 == 1,
                        all_denominators_even=all(q % 2 == 0 for q in s.denominators))
