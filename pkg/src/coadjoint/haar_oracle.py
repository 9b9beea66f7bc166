"""Monte Carlo Haar moments of coadjoint orbits, used as an independent
numeric check on the symbolic classes.

The moment ``E_g[<X, Ad_g xi>^k]`` under probability Haar measure equals the
symbolic class ``P_k(X)`` up to the factor ``C(n+k, k)`` and one constant
that does not depend on ``k`` or ``X``. :func:`fit_and_compare` fits that
constant at one ``k`` and checks every other.

Sampling is split into fixed-size blocks; block ``i`` draws from
``SeedSequence(seed, spawn_key=(i,))``, so results do not depend on how
many threads process the blocks.
"""
from __future__ import annotations

import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .errors import ConfigurationError, DomainError
from .polyalg import DEFAULT_SEED, cartan_coordinates
from .pushforward import CharClassSet
from .rootsys import RootSystem, build_root_system

DEFAULT_SAMPLES = 200_000
BLOCK_SIZE = 10_000
REL_TOL = 0.05
SIGMA_TOL = 5.0
THREADS_ENV = "COADJOINT_THREADS"

_GROUP_RE = re.compile(r"^(SU|SO)\(?([0-9]+)\)?$")


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def parse_group(label: str) -> tuple[str, int]:
    """``"SU3"`` or ``"SO(5)"`` -> ``("SU", 3)``."""
    m = _GROUP_RE.match(label.strip().upper())
    if not m:
        raise ConfigurationError(f"cannot parse group label {label!r}; expected SU<n> or SO<n>")
    group, n = m.group(1), int(m.group(2))
    _check_group(group, n)
    return group, n


def _check_group(group: str, n: int):
    if group not in ("SU", "SO"):
        raise ConfigurationError(f"unsupported group {group!r}; expected SU or SO")
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise ConfigurationError(f"matrix size must be an integer >= 2, got {n!r}")


def root_system_for(group: str, n: int) -> RootSystem:
    """Root system of the compact group: SU(n) -> A_{n-1}, SO(2m) -> D_m, SO(2m+1) -> B_m."""
    _check_group(group, n)
    if group == "SU":
        return build_root_system("A", n - 1)
    if n % 2:
        return build_root_system("B", n // 2)
    return build_root_system("D", n // 2)


def cartan_length(group: str, n: int) -> int:
    return n if group == "SU" else n // 2


def _block_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _haar_block(group: str, n: int, rng: np.random.Generator, size: int) -> np.ndarray:
    if group == "SU":
        z = (rng.standard_normal((size, n, n)) + 1j * rng.standard_normal((size, n, n))) / np.sqrt(2)
        q, r = np.linalg.qr(z)
        d = np.diagonal(r, axis1=1, axis2=2)
        q = q * (d / np.abs(d))[:, None, :]
        det = np.linalg.det(q)
        return q / (det ** (1.0 / n))[:, None, None]
    z = rng.standard_normal((size, n, n))
    q, r = np.linalg.qr(z)
    d = np.sign(np.diagonal(r, axis1=1, axis2=2))
    q = q * d[:, None, :]
    neg = np.linalg.det(q) < 0
    q[neg, :, 0] *= -1
    return q


def _block_sizes(count: int) -> list[int]:
    full, rest = divmod(count, BLOCK_SIZE)
    return [BLOCK_SIZE] * full + ([rest] if rest else [])


def sample_haar(group: str, n: int, seed: int = DEFAULT_SEED,
                count: int = 1000) -> Iterator[np.ndarray]:
    """Yield ``count`` Haar-distributed matrices of SU(n) or SO(n), one at a time."""
    _check_group(group, n)
    for i, size in enumerate(_block_sizes(count)):
        yield from _haar_block(group, n, _block_rng(seed, i), size)


def haar_block(group: str, n: int, seed: int, index: int, size: int = BLOCK_SIZE) -> np.ndarray:
    """Block ``index`` of the sample stream as an array of shape (size, n, n)."""
    _check_group(group, n)
    return _haar_block(group, n, _block_rng(seed, index), size)


def _so_cartan(v: Sequence[float], n: int) -> np.ndarray:
    """Block-diagonal antisymmetric matrix with 2x2 blocks v_i * [[0, -1], [1, 0]]."""
    a = np.zeros((n, n))
    for i, c in enumerate(v):
        a[2 * i + 1, 2 * i] = c
        a[2 * i, 2 * i + 1] = -c
    return a


def _pairings(group: str, n: int, g: np.ndarray, xi: np.ndarray, x: np.ndarray) -> np.ndarray:
    if group == "SU":
        # tr(diag(X) g diag(xi) g^*) = sum_ij X_i |g_ij|^2 xi_j
        return np.einsum("i,bij,j->b", x, np.abs(g) ** 2, xi)
    xm, xim = _so_cartan(x, n), _so_cartan(xi, n)
    # <A, B> = -tr(AB)/2 makes the 2x2 blocks orthonormal
    conj = np.einsum("bij,jk,blk->bil", g, xim, g)
    return -0.5 * np.einsum("ij,bji->b", xm, conj)


def _validate_vectors(group: str, n: int, xi, x):
    length = cartan_length(group, n)
    xi = np.array([float(Fraction(c)) for c in xi])
    x = np.array([float(Fraction(c)) for c in x])
    for name, v in (("xi", xi), ("X", x)):
        if v.shape != (length,):
            raise DomainError(f"{name} needs {length} coordinates for {group}({n}), got {v.size}")
        if group == "SU" and abs(v.sum()) > 1e-12:
            raise DomainError(f"{name} must be traceless (coordinates summing to zero) for SU({n})")
    return xi, x


def orbit_pairings(group: str, n: int, xi, x, samples: int = DEFAULT_SAMPLES,
                   seed: int = DEFAULT_SEED, threads: int | None = None,
                   left: np.ndarray | None = None) -> np.ndarray:
    """``<X, Ad_g xi>`` for every sampled ``g`` (optionally ``left @ g``)."""
    _check_group(group, n)
    xi, x = _validate_vectors(group, n, xi, x)
    threads = default_threads() if threads is None else max(1, threads)

    def work(job):
        i, size = job
        g = _haar_block(group, n, _block_rng(seed, i), size)
        if left is not None:
            g = left @ g
        return _pairings(group, n, g, xi, x)

    jobs = list(enumerate(_block_sizes(samples)))
    if threads == 1:
        parts = [work(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, jobs))
    return np.concatenate(parts)


@dataclass(frozen=True)
class MomentEstimate:
    k: int
    value: float
    std_error: float
    samples: int
    group: str
    xi: tuple
    X: tuple

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "value": self.value,
            "std_error": self.std_error,
            "samples": self.samples,
            "group": self.group,
            "xi": [str(Fraction(c)) for c in self.xi],
            "X": [str(Fraction(c)) for c in self.X],
        }


def moment_estimates(group: str, n: int, xi, x, ks: Sequence[int],
                     samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED,
                     threads: int | None = None, left: np.ndarray | None = None
                     ) -> list[MomentEstimate]:
    for k in ks:
        if k < 0:
            raise DomainError(f"moment order k must be non-negative, got {k}")
    if samples < 2:
        raise DomainError("need at least two samples for an error bar")
    v = orbit_pairings(group, n, xi, x, samples, seed, threads, left)
    label = f"{group}({n})"
    out = []
    for k in ks:
        w = v**k
        out.append(MomentEstimate(
            k=k,
            value=float(w.mean()),
            std_error=float(w.std(ddof=1) / math.sqrt(len(w))),
            samples=len(w),
            group=label,
            xi=tuple(Fraction(c) for c in xi),
            X=tuple(Fraction(c) for c in x),
        ))
    return out


def moment_estimate(group: str, n: int, xi, x, k: int, samples: int = DEFAULT_SAMPLES,
                    seed: int = DEFAULT_SEED, threads: int | None = None) -> MomentEstimate:
    return moment_estimates(group, n, xi, x, [k], samples, seed, threads)[0]


@dataclass
class KComparison:
    k: int
    symbolic: Fraction
    moment: float
    std_error: float
    predicted: float
    rel_deviation: float | None
    sigma: float | None
    ok: bool

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "symbolic": str(self.symbolic),
            "moment": self.moment,
            "std_error": self.std_error,
            "predicted_symbolic": self.predicted,
            "rel_deviation": self.rel_deviation,
            "rel_sigma": self.sigma,
            "ok": self.ok,
        }


@dataclass
class OracleReport:
    reference_k: int
    constant: float
    comparisons: list[KComparison] = field(default_factory=list)
    rel_tol: float = REL_TOL
    sigma_tol: float = SIGMA_TOL

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.comparisons)

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def comparison(self, k: int) -> KComparison:
        return next(c for c in self.comparisons if c.k == k)

    def to_json(self) -> dict:
        return {
            "reference_k": self.reference_k,
            "constant": self.constant,
            "inverse_constant": 1.0 / self.constant,
            "rel_tol": self.rel_tol,
            "sigma_tol": self.sigma_tol,
            "comparisons": [c.to_json() for c in self.comparisons],
            "verdict": self.verdict,
        }


def fit_and_compare(symbolic: CharClassSet, estimates: Sequence[MomentEstimate], x,
                    rel_tol: float = REL_TOL, sigma_tol: float = SIGMA_TOL) -> OracleReport:
    """Fit ``c = P_k(X) / (C(n+k, k) * moment_k)`` at the smallest usable even ``k``
    and check that the same ``c`` predicts every other ``k``.

    A comparison passes when the relative deviation is within ``rel_tol`` or
    within ``sigma_tol`` standard errors, whichever is looser. Where the
    symbolic class vanishes the moment itself must be within ``sigma_tol``
    standard errors of zero.
    """
    rs = symbolic.orbit.root_system
    point = cartan_coordinates(rs, tuple(Fraction(c) for c in x))
    n = symbolic.n_fiber
    sym = {e.k: symbolic.evaluate(e.k, point) for e in estimates}
    usable = sorted(e.k for e in estimates if e.k % 2 == 0 and sym[e.k] != 0 and e.value != 0)
    if len(usable) < 2:
        raise DomainError(
            "fewer than two even k with a nonvanishing symbolic class at this X; "
            "choose a different evaluation point")
    by_k = {e.k: e for e in estimates}
    ref = by_k[usable[0]]
    c = float(sym[ref.k]) / (math.comb(n + ref.k, ref.k) * ref.value)
    ref_rel = ref.std_error / abs(ref.value)
    report = OracleReport(ref.k, c, rel_tol=rel_tol, sigma_tol=sigma_tol)
    for e in sorted(estimates, key=lambda e: e.k):
        if e.k == ref.k:
            continue
        predicted = c * math.comb(n + e.k, e.k) * e.value
        s = sym[e.k]
        if s == 0:
            ok = abs(e.value) <= sigma_tol * e.std_error
            report.comparisons.append(KComparison(e.k, s, e.value, e.std_error, predicted,
                                                  None, None, ok))
            continue
        rel = abs(float(s) - predicted) / abs(float(s))
        sigma = math.hypot(e.std_error / abs(e.value), ref_rel) if e.value else math.inf
        ok = rel <= max(rel_tol, sigma_tol * sigma)
        report.comparisons.append(KComparison(e.k, s, e.value, e.std_error, predicted,
                                              rel, sigma, ok))
    return report
