"""Spectral functions, the discrete Calderon sum and the dyadic-band inequality."""
from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .bracket import bracket, bracket_at
from .field import Field2D, Grid
from .quad import eta_rule, xi_integral
from .report import VerificationReport
from .wavelet import GeneratorFamily
from .weyl import kernel_values
from .zak import ZakParams


def uniform_eta(H: float, n: int) -> np.ndarray:
    """``n`` left endpoints of ``[-H, H)``."""
    return -H + np.arange(n) * (2.0 * H / n)


@dataclass
class SpectralFunction:
    eta_grid: np.ndarray
    values: np.ndarray
    per_j: dict = field(default_factory=dict)

    def __post_init__(self):
        self.eta_grid = np.asarray(self.eta_grid, float)
        self.values = np.asarray(self.values, float)

    @property
    def step(self) -> float:
        e = self.eta_grid
        return float(e[1] - e[0]) if e.size > 1 else 0.0

    def rows(self):
        """``(eta, value, term_j...)`` tuples with ``j`` ascending."""
        js = sorted(self.per_j)
        for i, e in enumerate(self.eta_grid):
            yield (float(e), float(self.values[i]), *(float(self.per_j[j][i]) for j in js))


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("TWC_THREADS", "1")))
    except ValueError:
        return 1


def sigma_principal(psi: Field2D, eta_grid, grid: Optional[Grid] = None) -> SpectralFunction:
    """``int |K_psi(xi, eta)|^2 dxi`` at ``lambda = 1``."""
    eta = np.asarray(eta_grid, float)
    return SpectralFunction(eta, xi_integral(psi, 1, eta, grid=grid))


def sigma_general(psi: Field2D, point, params: ZakParams = ZakParams(),
                  grid: Optional[Grid] = None, rel_eps: float = 1e-8) -> float:
    """``int |K_psi(q, eta)|^2 dq / [psi, psi](xi, xi')``, zero off the support set."""
    xi, xip, eta = point
    b = bracket(psi, params, rel_eps, grid)
    eps = b.eps_support
    den = bracket_at(psi, xi, xip, params, grid)
    if eps <= 0 or den <= eps:
        return 0.0
    return float(xi_integral(psi, 1, [eta], grid=grid)[0] / den)


def sigma_sum(gens: Sequence[Field2D], eta_grid, grid: Optional[Grid] = None) -> SpectralFunction:
    eta = np.asarray(eta_grid, float)
    total = np.zeros(eta.shape)
    for g in gens:
        total = total + sigma_principal(g, eta, grid).values
    return SpectralFunction(eta, total)


def _term(psi: Field2D, j: int, eta: np.ndarray, grid) -> np.ndarray:
    lam = Fraction(4) ** (-j)
    return 2.0 ** j * xi_integral(psi, lam, 2.0 ** j * eta, grid=grid)


def sigma_w0j(psi_j: Field2D, j: int, eta_grid, grid: Optional[Grid] = None) -> SpectralFunction:
    """``2^j int |K^{4^-j}_{psi_j}(xi, 2^j eta)|^2 dxi``."""
    if j < 0:
        raise ValueError("j must be >= 0")
    eta = np.asarray(eta_grid, float)
    t = _term(psi_j, j, eta, grid)
    return SpectralFunction(eta, t, {j: t})


def calderon_sum(fam: GeneratorFamily, eta_grid, grid: Optional[Grid] = None,
                 j_min: Optional[int] = None, j_max: Optional[int] = None) -> SpectralFunction:
    """Truncated ``sum_j 2^j ||K^{4^-j}_{psi_j}(., 2^j eta)||^2`` with per-j curves.

    Terms are computed independently (``TWC_THREADS`` workers) and added
    in ascending ``j``.
    """
    eta = np.asarray(eta_grid, float)
    js = [j for j in sorted(fam) if (j_min is None or j >= j_min) and (j_max is None or j <= j_max)]
    workers = min(_threads(), max(1, len(js)))
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            terms = list(ex.map(lambda j: _term(fam[j], j, eta, grid), js))
    else:
        terms = [_term(fam[j], j, eta, grid) for j in js]
    total = np.zeros(eta.shape)
    for t in terms:
        total = total + t
    return SpectralFunction(eta, total, dict(zip(js, terms)))


def sigma_l1(s: SpectralFunction) -> float:
    """Rectangle-rule integral of ``s`` over its uniform window."""
    return float(s.step * np.sum(s.values))


def band_mask(eta, lo: float, hi: float, edges, width: float) -> np.ndarray:
    """``lo <= |eta| <= hi`` minus ``width``-neighbourhoods of the given ``|eta|`` edges."""
    a = np.abs(np.asarray(eta, float))
    keep = (a >= lo) & (a <= hi)
    for e in edges:
        keep &= np.abs(a - e) > width
    return keep


def check_calderon(fam: GeneratorFamily, eta_grid, lo: float, hi: float,
                   tolerance: float = 1e-6, grid: Optional[Grid] = None,
                   name: str = "spectral.calderon") -> tuple[VerificationReport, SpectralFunction]:
    """``max |sum - 1|`` over ``lo <= |eta| <= hi`` away from dyadic edges (2 grid steps)."""
    t0 = time.perf_counter()
    s = calderon_sum(fam, eta_grid, grid)
    edges = [2.0 ** i for i in range(-40, 41) if lo / 2 <= 2.0 ** i <= 2 * hi]
    mask = band_mask(s.eta_grid, lo, hi, edges, 2 * s.step)
    dev = float(np.max(np.abs(s.values[mask] - 1.0), initial=0.0))
    rep = VerificationReport.deviation(
        name, {"j_range": list(fam.j_range or ()), "band": [lo, hi], "n_eta": int(s.eta_grid.size)},
        dev, tolerance, compared=int(np.count_nonzero(mask)))
    rep.runtime_ms = (time.perf_counter() - t0) * 1e3
    return rep, s


def inequality_lhs(f: Field2D, j: int, M: int = 32, n_t: Optional[int] = None,
                   panel: float = 1 / 64, grid: Optional[Grid] = None) -> float:
    """``int_{T^2} int_1^2 2^{j/2} |sum_m K^{4^j}_f(2^-j (xi + m), eta) e^{-2 pi i m xi'}|``.

    The torus integral uses the Zak node layout; ``eta`` uses a Gauss rule.
    """
    p = ZakParams(M=M, H=1.0, n_t=n_t)
    lam = Fraction(4) ** j
    eta, w = eta_rule(1.0, 2.0, panel)
    a = 2.0 ** -j
    XI = a * (p.xi[None, :, None] + p.ms[None, None, :])
    ETA = np.broadcast_to(eta[:, None, None], (eta.size, p.nt, p.ms.size))
    K = kernel_values(f, lam, np.broadcast_to(XI, ETA.shape), ETA, grid=grid)
    buf = np.zeros(K.shape[:-1] + (p.nt,), dtype=complex)
    buf[..., np.mod(p.ms, p.nt)] = K
    Z = np.fft.fft(buf, axis=-1)
    return float(2.0 ** (j / 2) * np.sum(w * np.mean(np.abs(Z), axis=(1, 2))))


def inequality_rhs(gens: Sequence[Field2D], j: int, panel: float = 1 / 64,
                   grid: Optional[Grid] = None) -> float:
    """``(int_{2^j}^{2^{j+1}} sigma_V)^{1/2}``."""
    eta, w = eta_rule(2.0 ** j, 2.0 ** (j + 1), panel * 2.0 ** j)
    return float(np.sqrt(np.sum(w * sigma_sum(gens, eta, grid).values)))


def mainineq_check(f: Field2D, gens: Sequence[Field2D], j: int, M: int = 32,
                   tolerance: float = 1e-6, grid: Optional[Grid] = None) -> VerificationReport:
    """Dyadic-band inequality for ``f`` against the spectral function of ``gens``."""
    t0 = time.perf_counter()
    if j < 0:
        raise ValueError("j must be >= 0")
    lhs = inequality_lhs(f, j, M, grid=grid)
    rhs = inequality_rhs(gens, j, grid=grid)
    rep = VerificationReport.inequality("spectral.mainineq", {"j": j, "M": M},
                                        lhs, rhs, tolerance, slack=rhs - lhs)
    rep.runtime_ms = (time.perf_counter() - t0) * 1e3
    return rep
