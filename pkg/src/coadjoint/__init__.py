"""Exact characteristic classes of coadjoint orbit actions in H*(BG)."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CoadjointError,
    ConfigurationError,
    DomainError,
    IntegrityError,
    ResourceError,
)
from .polyalg import RationalPoly, molien_dims  # noqa: E402
from .pushforward import char_classes, flag_pushforward, orbit_pushforward  # noqa: E402
from .rootsys import build_root_system, classify_orbit, parse_root_system  # noqa: E402
from .subalgebra import generate_subalgebra, independence_report  # noqa: E402

__all__ = [
    "CoadjointError",
    "ConfigurationError",
    "DomainError",
    "IntegrityError",
    "ResourceError",
    "RationalPoly",
    "build_root_system",
    "char_classes",
    "classify_orbit",
    "flag_pushforward",
    "generate_subalgebra",
    "independence_report",
    "molien_dims",
    "orbit_pushforward",
    "parse_root_system",
]
