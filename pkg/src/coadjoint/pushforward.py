"""Fibre integration for universal orbit bundles in the Borel model.

Over the full flag, integration along ``G/T -> BT -> BG`` sends ``p`` to the
Weyl antisymmetrization of ``p`` divided by the product of positive roots.
For an orbit ``G/P`` the integral factors through the full flag: multiply
by the Euler class of ``P/T`` (the product of the parabolic positive roots)
and divide by ``|W_P|``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from .errors import DomainError
from .polyalg import (
    RationalPoly,
    antisymmetrize,
    apply_weyl,
    exact_divide,
    restrict_to_cartan,
)
from .rootsys import OrbitPoint, RootSystem

DEFAULT_K_MAX = 6


def root_form(alpha) -> RationalPoly:
    return RationalPoly.linear(alpha)


@lru_cache(maxsize=32)
def discriminant(rs: RootSystem) -> RationalPoly:
    """Product of the positive roots as linear forms."""
    out = RationalPoly.constant(rs.ambient_dim, 1)
    for a in rs.positive_roots:
        out = out * root_form(a)
    return out


def flag_pushforward(rs: RootSystem, p: RationalPoly) -> RationalPoly:
    """Integrate ``p`` over the fibre of ``BT -> BG``; lowers degree by #positive roots."""
    npos = len(rs.positive_roots)
    if p.nvars != rs.ambient_dim:
        raise DomainError(f"polynomial has {p.nvars} variables, {rs.label} needs {rs.ambient_dim}")
    if p.degree < npos:
        return RationalPoly.zero(p.nvars)
    result = antisymmetrize(rs, p)
    # one linear factor at a time keeps every division cheap
    for a in rs.positive_roots:
        if result.is_zero():
            break
        result = exact_divide(result, root_form(a))
    return result


def euler_class_of_parabolic(rs: RootSystem, orbit: OrbitPoint) -> RationalPoly:
    out = RationalPoly.constant(rs.ambient_dim, 1)
    for a in orbit.parabolic_positive_roots():
        out = out * root_form(a)
    return out


def _parabolic_generators(rs: RootSystem, orbit: OrbitPoint):
    return [rs.simple_reflection(i) for i in orbit.stabilizer_simples]


def orbit_pushforward(rs: RootSystem, orbit: OrbitPoint, p: RationalPoly) -> RationalPoly:
    """Integrate a ``W_P``-invariant class over the fibre of ``BP -> BG``."""
    for s in _parabolic_generators(rs, orbit):
        if apply_weyl(s, p) != p:
            raise DomainError(
                "class is not invariant under the parabolic Weyl group of the orbit, "
                "so it does not live on the orbit's Borel construction")
    if orbit.is_regular:
        return flag_pushforward(rs, p)
    wp = len(orbit.parabolic_weyl())
    return flag_pushforward(rs, p * euler_class_of_parabolic(rs, orbit)).scale(Fraction(1, wp))


@dataclass(frozen=True)
class CouplingForm:
    orbit: OrbitPoint
    linear_form: RationalPoly


def coupling_form(rs: RootSystem, orbit: OrbitPoint) -> CouplingForm:
    """The pairing with xi, the degree-two coupling class of the orbit."""
    coeffs = [c.numerator if c.denominator == 1 else c for c in orbit.xi]
    return CouplingForm(orbit, RationalPoly.linear(coeffs))


@dataclass
class CharClassSet:
    """The invariant polynomials ``P_k`` (restricted to the Cartan) for one orbit."""

    orbit: OrbitPoint
    n_fiber: int
    classes: dict[int, RationalPoly] = field(default_factory=dict)

    def nonzero(self, ks=None) -> dict[int, RationalPoly]:
        ks = self.classes if ks is None else ks
        return {k: self.classes[k] for k in ks if not self.classes[k].is_zero()}

    def evaluate(self, k: int, point) -> Fraction:
        """Evaluate ``P_k`` at a point given in restricted coordinates."""
        return Fraction(self.classes[k].evaluate(point))

    def to_json(self) -> dict:
        return {
            "orbit": self.orbit.to_json(),
            "n_fiber": self.n_fiber,
            "classes": {str(k): p.to_json() for k, p in sorted(self.classes.items())},
        }

    @classmethod
    def from_json(cls, data: Mapping, orbit: OrbitPoint) -> "CharClassSet":
        return cls(orbit, int(data["n_fiber"]),
                   {int(k): RationalPoly.from_json(v) for k, v in data["classes"].items()})


def power_class(rs: RootSystem, orbit: OrbitPoint, form: RationalPoly, k: int) -> RationalPoly:
    """Restricted pushforward of ``form^(n + k)``."""
    return restrict_to_cartan(rs, orbit_pushforward(rs, orbit, form ** (orbit.n_fiber + k)))


def char_classes(rs: RootSystem, orbit: OrbitPoint, k_max: int = DEFAULT_K_MAX) -> CharClassSet:
    if k_max < 1:
        raise DomainError(f"k_max must be at least 1, got {k_max}")
    form = coupling_form(rs, orbit).linear_form
    classes = {k: power_class(rs, orbit, form, k) for k in range(1, k_max + 1)}
    return CharClassSet(orbit, orbit.n_fiber, classes)


def symplectic_volume(rs: RootSystem, orbit: OrbitPoint) -> Fraction:
    """Pushforward of ``Omega^n``: a constant, positive for a dominant xi."""
    form = coupling_form(rs, orbit).linear_form
    return Fraction(orbit_pushforward(rs, orbit, form ** orbit.n_fiber).constant_term())
