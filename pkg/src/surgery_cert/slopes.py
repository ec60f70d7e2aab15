"""Oriented slopes and multicurves on a boundary torus.

A slope ``(p, q)`` stands for ``p*mu + q*lam`` in a fixed meridian/longitude
basis.  Pairs are kept raw: degeneracy slopes are multicurves and their
multiplicity matters, so nothing here reduces to lowest terms unless asked.

The algebraic intersection pairing is normalised by ``lam . mu = +1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd


@dataclass(frozen=True)
class TorusSlope:
    p: int
    q: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not isinstance(self.q, int):
            raise TypeError("slope coordinates must be integers")
        if self.p == 0 and self.q == 0:
            raise ValueError("(0, 0) is not a slope")

    @property
    def multiplicity(self) -> int:
        return gcd(self.p, self.q)

    def primitive_part(self) -> "TorusSlope":
        g = self.multiplicity
        return TorusSlope(self.p // g, self.q // g)

    def __add__(self, other: "TorusSlope") -> "TorusSlope":
        if not isinstance(other, TorusSlope):
            return NotImplemented
        return TorusSlope(self.p + other.p, self.q + other.q)

    def __neg__(self) -> "TorusSlope":
        return TorusSlope(-self.p, -self.q)

    def scale(self, k: int) -> "TorusSlope":
        return TorusSlope(k * self.p, k * self.q)

    def __str__(self):
        return format_slope(self)


MERIDIAN = TorusSlope(1, 0)
LONGITUDE = TorusSlope(0, 1)


def intersection(a: TorusSlope, b: TorusSlope) -> int:
    """Algebraic intersection number ``a . b`` with ``lam . mu = +1``."""
    return a.q * b.p - a.p * b.q


def delta(d: TorusSlope, r: TorusSlope) -> int:
    """Distance ``|d . r|`` between two slopes (multiplicity counted)."""
    return abs(intersection(d, r))


@dataclass(frozen=True)
class FramingChange:
    """Unimodular change of basis on a boundary torus.

    ``matrix`` is ``((a, b), (c, d))``; its columns are the images of the
    old basis vectors ``(mu, lam)`` written in the new basis.  So a slope
    ``(p, q)`` in old coordinates becomes ``(a*p + b*q, c*p + d*q)``.
    """

    matrix: tuple[tuple[int, int], tuple[int, int]]

    def __post_init__(self):
        (a, b), (c, d) = self.matrix
        if a * d - b * c not in (1, -1):
            raise ValueError(f"framing change {self.matrix} is not unimodular")

    @classmethod
    def from_images(cls, mu_image: TorusSlope, lam_image: TorusSlope) -> "FramingChange":
        return cls(((mu_image.p, lam_image.p), (mu_image.q, lam_image.q)))

    @property
    def det(self) -> int:
        (a, b), (c, d) = self.matrix
        return a * d - b * c

    def inverse(self) -> "FramingChange":
        (a, b), (c, d) = self.matrix
        s = self.det
        return FramingChange(((s * d, -s * b), (-s * c, s * a)))

    def compose(self, inner: "FramingChange") -> "FramingChange":
        """``self`` after ``inner``."""
        (a, b), (c, d) = self.matrix
        (e, f), (g, h) = inner.matrix
        return FramingChange(((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h)))


IDENTITY_FRAME = FramingChange(((1, 0), (0, 1)))


def change_frame(s: TorusSlope, f: FramingChange) -> tuple[TorusSlope, int]:
    """Rewrite ``s`` in the new basis.

    Returns the image together with ``det(f)``, the factor by which all
    intersection numbers get multiplied.
    """
    (a, b), (c, d) = f.matrix
    return TorusSlope(a * s.p + b * s.q, c * s.p + d * s.q), f.det


@dataclass(frozen=True)
class FdtcData:
    """Boundary prong count and fractional Dehn twist coefficient ``k/q``."""

    prongs: int
    twist_numerator: int

    def __post_init__(self):
        if self.prongs < 1:
            raise ValueError("prong count must be at least 1")

    @property
    def coefficient(self) -> Fraction:
        return Fraction(self.twist_numerator, self.prongs)


def degeneracy_from_fdtc(fd: FdtcData) -> TorusSlope:
    """Degeneracy multicurve ``q*mu' + k*lam'`` in the fiber framing."""
    return TorusSlope(fd.prongs, fd.twist_numerator)


# -- text form ---------------------------------------------------------------

def parse_slope(text: str) -> TorusSlope:
    """Parse ``"p/q"`` or ``"p"``; the pair is kept as written up to sign."""
    text = text.strip()
    if text.lower() in ("inf", "infinity", "1/0"):
        raise ValueError("the meridian slope 'inf' is not a surgery slope")
    if "/" in text:
        num, den = text.split("/", 1)
        p, q = int(num), int(den)
    else:
        p, q = int(text), 1
    if q < 0:
        p, q = -p, -q
    return TorusSlope(p, q)


def format_slope(s: TorusSlope) -> str:
    p, q = s.p, s.q
    if q < 0:
        p, q = -p, -q
    if q == 0:
        return "inf" if s.multiplicity == 1 else f"{p}/0"
    return f"{p}/{q}"


def parse_rational(text: str) -> Fraction:
    """Parse a surgery coefficient ``"p/q"``; rejects ``inf`` and zero denominators."""
    text = text.strip()
    if text.lower() in ("inf", "infinity"):
        raise ValueError("'inf' is not allowed as a surgery slope")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse slope {text!r}") from exc


def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"
