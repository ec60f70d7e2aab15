"""Certificate trees for large rational surgeries on L-space links.

Starting from a rational surgery, the last non-integral coefficient is
replaced by its two Farey parents.  The three manifolds sit in a surgery
exact triangle, and their homology orders add up exactly; repeating until
every coefficient is integral yields a tree whose leaves are integral
surgeries.  If every integral surgery with coefficients ``>= C`` is an
L-space, the root is one as well.  Only the arithmetic side of that
argument is checked here; ``C`` is an input.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor, ceil, gcd, prod
from typing import Optional

from .homology import (LinkingMatrix, SurgeryDeterminant, SurgerySpec, PositivityError,
                       presentation_matrix, positivity_certificate, positivity_threshold)
from .linalg import bareiss_det

TREE_SCHEMA = "surgery-cert/tree/1"


class CertificateError(Exception):
    """A certificate could not be produced; ``path`` locates the failing node."""

    def __init__(self, message, path=()):
        self.path = tuple(path)
        where = "root" if not self.path else "root/" + "/".join(self.path)
        super().__init__(f"{message} (at {where})")


class PreconditionError(CertificateError):
    pass


class AdditivityError(CertificateError):
    pass


@dataclass(frozen=True)
class MediantSplit:
    parent: Fraction
    left: Fraction
    right: Fraction

    def __post_init__(self):
        p, q = self.parent.numerator, self.parent.denominator
        p1, q1 = self.left.numerator, self.left.denominator
        p2, q2 = self.right.numerator, self.right.denominator
        if (p1 + p2, q1 + q2) != (p, q):
            raise ValueError(f"{self.parent} is not the mediant of {self.left} and {self.right}")
        if abs(p1 * q2 - p2 * q1) != 1:
            raise ValueError(f"{self.left} and {self.right} are not Farey neighbours")
        if not (floor(self.parent) <= self.left <= ceil(self.parent)
                and floor(self.parent) <= self.right <= ceil(self.parent)):
            raise ValueError("parents must lie between floor and ceiling of the fraction")


def farey_split(a, q: Optional[int] = None) -> MediantSplit:
    """Farey parents ``p'/q' < p/q < p''/q''`` of a non-integral fraction.

    ``p' q - p q' = -1`` pins down the left parent: ``q'`` is the inverse of
    ``p`` modulo ``q`` in ``[1, q - 1]``.  Accepts a Fraction, or a numerator
    and denominator which must already be in lowest terms.
    """
    if q is None:
        a = Fraction(a)
        p, q = a.numerator, a.denominator
    else:
        p = int(a)
        if q < 1 or gcd(p, q) != 1:
            raise ValueError(f"{p}/{q} is not in lowest terms with positive denominator")
    if q < 2:
        raise ValueError(f"{p}/{q} is an integer; nothing to split")
    q1 = pow(p, -1, q)
    p1 = (p * q1 - 1) // q
    return MediantSplit(Fraction(p, q), Fraction(p1, q1), Fraction(p - p1, q - q1))


def split_index(s: SurgerySpec) -> Optional[int]:
    """Largest index with a non-integral coefficient, or None."""
    for i in range(s.n - 1, -1, -1):
        if s.slopes[i].denominator != 1:
            return i
    return None


@dataclass(frozen=True)
class AdditivityWitness:
    """Signed orders of ``Y'``, ``Y''``, ``Y`` from determinants and from the affine identity."""

    det_left: int
    det_right: int
    det_parent: int
    affine_left: int
    affine_right: int
    affine_parent: int

    @property
    def orders(self) -> tuple[int, int, int]:
        return abs(self.det_left), abs(self.det_right), abs(self.det_parent)


def _affine_terms(D: SurgeryDeterminant, s: SurgerySpec, d: int, cache=None):
    rest = tuple(a for j, a in enumerate(s.slopes) if j != d)
    key = (d, rest)
    if cache is not None and key in cache:
        return cache[key]
    g, h = D.affine_decompose(d)
    val = (g(rest), h(rest))
    if cache is not None:
        cache[key] = val
    return val


def additivity_witness(L: LinkingMatrix, s: SurgerySpec, d: int,
                       D: Optional[SurgeryDeterminant] = None, _cache=None):
    if not 0 <= d < s.n:
        raise IndexError(f"split index {d} out of range")
    a = s.slopes[d]
    if a.denominator == 1:
        raise ValueError(f"coefficient {d} is the integer {a}; nothing to split")
    D = D or SurgeryDeterminant(L)
    split = farey_split(a)
    left, right = s.replace(d, split.left), s.replace(d, split.right)
    g, h = _affine_terms(D, s, d, _cache)
    Q = prod(s.denominators)
    rest_q = Q // a.denominator
    aff_left = rest_q * (g * split.left.numerator + h * split.left.denominator)
    aff_right = rest_q * (g * split.right.numerator + h * split.right.denominator)
    aff_parent = Q * (g * a + h)
    for val in (aff_left, aff_right, aff_parent):
        if val.denominator != 1:
            raise AdditivityError(f"affine identity produced a non-integer {val}")
    w = AdditivityWitness(
        det_left=bareiss_det(presentation_matrix(L, left)),
        det_right=bareiss_det(presentation_matrix(L, right)),
        det_parent=bareiss_det(presentation_matrix(L, s)),
        affine_left=int(aff_left), affine_right=int(aff_right), affine_parent=int(aff_parent))
    return split, left, right, w


def _check_witness(w: AdditivityWitness, path=()):
    for name in ("left", "right", "parent"):
        dv, av = getattr(w, "det_" + name), getattr(w, "affine_" + name)
        if dv != av:
            raise AdditivityError(f"{name}: determinant gives {dv}, affine identity gives {av}", path)
    if w.affine_left + w.affine_right != w.affine_parent:
        raise AdditivityError(
            f"affine identity does not sum: {w.affine_left} + {w.affine_right} != {w.affine_parent}", path)
    h1l, h1r, h1 = w.orders
    if 0 in (h1l, h1r, h1):
        raise AdditivityError(f"infinite H_1 in the triangle (orders {h1l}, {h1r}, {h1})", path)
    if h1l + h1r != h1:
        raise AdditivityError(f"|H_1| not additive: {h1l} + {h1r} != {h1}", path)


def verify_additivity(L: LinkingMatrix, s: SurgerySpec, d: int) -> tuple[int, int, int]:
    """``(|H_1(Y')|, |H_1(Y'')|, |H_1(Y)|)`` for the split at index ``d``.

    Raises AdditivityError naming the computation that disagrees.
    """
    *_, w = additivity_witness(L, s, d)
    _check_witness(w)
    return w.orders


@dataclass(frozen=True, eq=True)
class CertificateTree:
    spec: SurgerySpec
    h1: int
    split_index: Optional[int] = None
    left: Optional["CertificateTree"] = None
    right: Optional["CertificateTree"] = None
    witness: Optional[AdditivityWitness] = field(default=None, compare=True)

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def iter_unique(self):
        """Distinct nodes; equal subtrees are shared and yielded once."""
        seen = set()
        stack = [self]
        while stack:
            node = stack.pop()
            if id(node) in seen:
                continue
            seen.add(id(node))
            yield node
            if not node.is_leaf:
                stack.extend((node.right, node.left))

    def counts(self) -> tuple[int, int]:
        """``(internal nodes, leaves)`` of the fully expanded tree."""
        memo: dict = {}

        def go(node):
            key = id(node)
            if key not in memo:
                if node.is_leaf:
                    memo[key] = (0, 1)
                else:
                    li, ll = go(node.left)
                    ri, rl = go(node.right)
                    memo[key] = (li + ri + 1, ll + rl)
            return memo[key]

        return go(self)

    def depth(self) -> int:
        memo: dict = {}

        def go(node):
            if id(node) not in memo:
                memo[id(node)] = 0 if node.is_leaf else 1 + max(go(node.left), go(node.right))
            return memo[id(node)]

        return go(self)

    def leaves(self):
        if self.is_leaf:
            yield self
        else:
            yield from self.left.leaves()
            yield from self.right.leaves()


@dataclass
class LSpaceCertificate:
    tree: CertificateTree
    C: int
    positivity: str
    """"lemma" when every coefficient clears n!*k, else "direct" (sign checked per node)"""
    threshold: int
    internal_nodes: int
    leaves: int
    min_leaf_slope: Fraction

    @property
    def statement(self) -> str:
        return (f"if every integral surgery with all coefficients >= {self.C} is an L-space, "
                f"then surgery {self.tree.spec} is an L-space")


def certificate_tree(L: LinkingMatrix, s: SurgerySpec, C: int) -> LSpaceCertificate:
    """Build and audit the full splitting tree for ``s``.

    Every coefficient must be ``>= C``.  Positivity of ``f`` along the tree
    is taken from the dominance lemma when all coefficients are at least
    ``n! * k``; otherwise the sign of every node's determinant is checked
    directly.  Identical sub-specs are built once and shared.
    """
    if L.n != s.n:
        raise PreconditionError(f"{L.n} components but {s.n} slopes")
    low = [i for i, a in enumerate(s.slopes) if a < C]
    if low:
        raise PreconditionError(
            "coefficients below C=%d: %s" % (C, ", ".join(f"a[{i}]={s.slopes[i]}" for i in low)))
    D = SurgeryDeterminant(L)
    _, threshold = positivity_threshold(L)
    route = "direct"
    if all(a >= threshold for a in s.slopes):
        try:
            positivity_certificate(D, threshold)
            route = "lemma"
        except (PositivityError, ValueError):
            route = "direct"

    built: dict = {}
    affine_cache: dict = {}

    def build(spec: SurgerySpec, path):
        if spec in built:
            return built[spec]
        d = split_index(spec)
        if d is None:
            h1 = abs(bareiss_det(presentation_matrix(L, spec)))
            if h1 == 0:
                raise CertificateError(f"leaf {spec} has infinite H_1", path)
            if any(a < C for a in spec.slopes):
                raise CertificateError(f"leaf {spec} has a coefficient below C={C}", path)
            node = CertificateTree(spec=spec, h1=h1)
        else:
            split, ls, rs, w = additivity_witness(L, spec, d, D, affine_cache)
            _check_witness(w, path)
            if w.det_parent <= 0 or w.det_left <= 0 or w.det_right <= 0:
                raise CertificateError(f"f is not positive at {spec} or its parents", path)
            for child in (ls, rs):
                cd = split_index(child)
                measure = (-1, 0) if cd is None else (cd, child.slopes[cd].denominator)
                if not measure < (d, spec.slopes[d].denominator):
                    raise CertificateError(f"termination measure did not drop at {child}", path)
            left = build(ls, path + (f"{d}:{split.left}",))
            right = build(rs, path + (f"{d}:{split.right}",))
            node = CertificateTree(spec=spec, h1=abs(w.det_parent), split_index=d,
                                   left=left, right=right, witness=w)
        built[spec] = node
        return node

    tree = build(s, ())
    internal, leaves = tree.counts()
    min_leaf = min(min(n.spec.slopes) for n in tree.iter_unique() if n.is_leaf)
    return LSpaceCertificate(tree=tree, C=C, positivity=route, threshold=threshold,
                             internal_nodes=internal, leaves=leaves, min_leaf_slope=min_leaf)


# -- export ----------------------------------------------------------------------

def tree_to_dict(node: CertificateTree) -> dict:
    out = {
        "spec": [f"{a.numerator}/{a.denominator}" for a in node.spec.slopes],
        "h1": str(node.h1),
    }
    if not node.is_leaf:
        w = node.witness
        out["split_index"] = node.split_index
        out["witness"] = {
            "determinant": [str(w.det_left), str(w.det_right), str(w.det_parent)],
            "affine": [str(w.affine_left), str(w.affine_right), str(w.affine_parent)],
        }
        out["children"] = [tree_to_dict(node.left), tree_to_dict(node.right)]
    return out


def tree_from_dict(data: dict) -> CertificateTree:
    spec = SurgerySpec(tuple(Fraction(x) for x in data["spec"]))
    if "children" not in data:
        return CertificateTree(spec=spec, h1=int(data["h1"]))
    det = [int(x) for x in data["witness"]["determinant"]]
    aff = [int(x) for x in data["witness"]["affine"]]
    w = AdditivityWitness(det[0], det[1], det[2], aff[0], aff[1], aff[2])
    left, right = (tree_from_dict(c) for c in data["children"])
    return CertificateTree(spec=spec, h1=int(data["h1"]), split_index=int(data["split_index"]),
                           left=left, right=right, witness=w)


def dump_tree(cert: LSpaceCertificate, linking: LinkingMatrix) -> str:
    doc = {
        "schema": TREE_SCHEMA,
        "linking": [list(r) for r in linking.entries],
        "C": cert.C,
        "positivity": cert.positivity,
        "tree": tree_to_dict(cert.tree),
    }
    return json.dumps(doc, indent=1, sort_keys=True)


def load_tree(text: str) -> tuple[LinkingMatrix, int, CertificateTree]:
    doc = json.loads(text)
    if doc.get("schema") != TREE_SCHEMA:
        raise ValueError(f"unsupported tree schema {doc.get('schema')!r}")
    return LinkingMatrix.from_rows(doc["linking"]), int(doc["C"]), tree_from_dict(doc["tree"])


def audit_tree(L: LinkingMatrix, tree: CertificateTree, C: int) -> int:
    """Re-check a (possibly re-loaded) tree from scratch; returns the number of internal nodes checked."""
    checked = 0
    for node in tree.iter_unique():
        h1 = abs(bareiss_det(presentation_matrix(L, node.spec)))
        if h1 != node.h1:
            raise CertificateError(f"stored h1 {node.h1} differs from recomputed {h1} at {node.spec}")
        if node.is_leaf:
            if not node.spec.is_integral() or any(a < C for a in node.spec.slopes):
                raise CertificateError(f"leaf {node.spec} is not an integral surgery >= {C}")
            continue
        d = node.split_index
        split = farey_split(node.spec.slopes[d])
        if (node.left.spec, node.right.spec) != (node.spec.replace(d, split.left),
                                                 node.spec.replace(d, split.right)):
            raise CertificateError(f"children of {node.spec} are not its Farey parents at index {d}")
        if node.left.h1 + node.right.h1 != node.h1:
            raise AdditivityError(f"{node.left.h1} + {node.right.h1} != {node.h1} at {node.spec}")
        checked += 1
    return checked
