"""Weyl-Zak transform ``Z(xi, xi', eta) = sum_m K(m + xi, eta) e^{-2 pi i m xi'}``.

The series is truncated to ``m in [-M + offset, M + offset]``. ``xi`` is
sampled at cell midpoints of ``[0, 1)``, ``xi'`` at ``p / n_t`` with
``n_t >= 2M + 1`` so the truncated series is recovered exactly from its
samples, and ``eta`` at left endpoints of ``[-H, H)``.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .field import Field2D, Grid, GridError, SampledField, l2_norm
from .ops import TwistIndex, twisted_translate
from .quad import xi_integral
from .report import VerificationReport
from .weyl import kernel_values


@dataclass(frozen=True)
class ZakParams:
    M: int = 32
    H: float = 64.0
    n_eta: int = 1024
    n_t: Optional[int] = None
    m_offset: int = 0

    def __post_init__(self):
        if self.M < 1 or self.H <= 0:
            raise ValueError("need M >= 1 and H > 0")
        if self.n_t is not None and self.n_t < 2 * self.M + 1:
            raise ValueError("n_t must be at least 2M + 1")

    @property
    def nt(self) -> int:
        return self.n_t if self.n_t is not None else 2 * self.M + 2

    @property
    def xi(self) -> np.ndarray:
        return (np.arange(self.nt) + 0.5) / self.nt

    @property
    def xip(self) -> np.ndarray:
        return np.arange(self.nt) / self.nt

    @property
    def d_eta(self) -> float:
        return 2.0 * self.H / self.n_eta

    @property
    def eta(self) -> np.ndarray:
        return -self.H + np.arange(self.n_eta) * self.d_eta

    @property
    def ms(self) -> np.ndarray:
        return np.arange(-self.M, self.M + 1) + self.m_offset

    def with_(self, **kw) -> "ZakParams":
        d = dict(M=self.M, H=self.H, n_eta=self.n_eta, n_t=self.n_t, m_offset=self.m_offset)
        d.update(kw)
        return ZakParams(**d)


@dataclass
class ZakField:
    """``data[i_eta, i_xi, i_xi']``."""

    data: np.ndarray
    params: ZakParams
    meta: dict = field(default_factory=dict)

    @property
    def M(self):
        return self.params.M

    @property
    def H(self):
        return self.params.H

    def norm2(self) -> float:
        p = self.params
        return float(p.d_eta * np.sum(np.abs(self.data) ** 2) / p.nt ** 2)


def _terms(phi: Field2D, p: ZakParams, eta: np.ndarray, grid):
    xi = p.xi
    ms = p.ms
    XI = xi[None, :, None] + ms[None, None, :]
    ETA = np.broadcast_to(eta[:, None, None], (eta.size, xi.size, ms.size))
    return kernel_values(phi, 1, np.broadcast_to(XI, ETA.shape), ETA, grid=grid)


def _series(terms: np.ndarray, p: ZakParams) -> np.ndarray:
    nt = p.nt
    buf = np.zeros(terms.shape[:-1] + (nt,), dtype=complex)
    idx = np.mod(p.ms, nt)
    buf[..., idx] = terms
    return np.fft.fft(buf, axis=-1)


def weyl_zak(phi: Field2D, params: ZakParams = ZakParams(), grid: Optional[Grid] = None,
             eta: Optional[np.ndarray] = None) -> ZakField:
    """Truncated Weyl-Zak transform on the ``(eta, xi, xi')`` grid (``lambda = 1``)."""
    if isinstance(phi, SampledField):
        grid = phi.grid
        if grid.extent < params.M + 1 + abs(params.m_offset):
            raise GridError(f"extent {grid.extent} too small for M={params.M}")
    eta = params.eta if eta is None else np.asarray(eta, float)
    chunk = max(1, (1 << 22) // (params.nt * (2 * params.M + 1)))
    data = np.empty((eta.size, params.nt, params.nt), dtype=complex)
    for c0 in range(0, eta.size, chunk):
        data[c0:c0 + chunk] = _series(_terms(phi, params, eta[c0:c0 + chunk], grid), params)
    return ZakField(data, params, {"eta": eta})


def check_zak_translation(phi: Field2D, k: int, l: int, params: ZakParams = ZakParams(),
                          tolerance: float = 1e-10, grid=None) -> VerificationReport:
    """``Z T_(k,l) phi = e^{2 pi i (k xi + l xi')} e^{i pi k l} Z phi``.

    The right side uses the series index range shifted by ``l`` so both
    sides sum the same kernel samples (matched truncation).
    """
    t0 = time.perf_counter()
    zt = weyl_zak(twisted_translate(phi, TwistIndex(k, l, 1)), params, grid)
    z = weyl_zak(phi, params.with_(m_offset=params.m_offset + l), grid)
    xi, xip = params.xi, params.xip
    turns = np.mod(2 * (k * xi[:, None] + l * xip[None, :]) + k * l, 2.0)
    factor = np.exp(1j * np.pi * turns)
    dev = float(np.max(np.abs(zt.data - factor[None] * z.data)))
    rep = VerificationReport.deviation(
        "zak.translation", {"k": k, "l": l, "M": params.M, "H": params.H,
                            "n_eta": params.n_eta},
        dev, tolerance, zak_scale=float(np.max(np.abs(z.data))))
    rep.runtime_ms = (time.perf_counter() - t0) * 1e3
    return rep


def check_parseval_xi_prime(phi: Field2D, params: ZakParams = ZakParams(),
                            tolerance: float = 1e-10, grid=None) -> VerificationReport:
    """``int_0^1 |Z|^2 dxi' = sum_m |K(m + xi, eta)|^2`` at every ``(xi, eta)``."""
    t0 = time.perf_counter()
    eta = params.eta
    terms = _terms(phi, params, eta, grid)
    z = _series(terms, params)
    lhs = np.mean(np.abs(z) ** 2, axis=-1)
    rhs = np.sum(np.abs(terms) ** 2, axis=-1)
    scale = max(float(np.max(rhs)), 1e-300)
    dev = float(np.max(np.abs(lhs - rhs)))
    rep = VerificationReport.deviation(
        "zak.parseval_xi_prime", {"M": params.M, "H": params.H, "n_eta": params.n_eta},
        dev / scale, tolerance, absolute_deviation=dev, scale=scale)
    rep.runtime_ms = (time.perf_counter() - t0) * 1e3
    return rep


def check_zak_marginal(phi: Field2D, params: ZakParams = ZakParams(),
                       tolerance: float = 1e-6, grid=None) -> VerificationReport:
    """Per-``eta`` comparison of ``int_{T^2} |Z|^2`` with ``int |K(xi, eta)|^2 dxi``.

    The kernel integral is restricted to ``[-M + offset, M + offset + 1)``,
    the range the truncated series covers; the discarded tail is reported.
    """
    t0 = time.perf_counter()
    z = weyl_zak(phi, params, grid)
    lhs = np.mean(np.abs(z.data) ** 2, axis=(1, 2))
    lo = -params.M + params.m_offset
    window = (float(lo), float(lo + 2 * params.M + 1))
    rhs = xi_integral(phi, 1, params.eta, window=window, grid=grid)
    full = xi_integral(phi, 1, params.eta, grid=grid)
    dev = float(np.max(np.abs(lhs - rhs)))
    rep = VerificationReport.deviation(
        "zak.marginal", {"M": params.M, "H": params.H, "n_eta": params.n_eta},
        dev, tolerance, tail_mass=float(params.d_eta * np.sum(np.abs(full - rhs))),
        peak=float(np.max(rhs)))
    rep.runtime_ms = (time.perf_counter() - t0) * 1e3
    return rep


def check_isometry(phi: Field2D, params: ZakParams = ZakParams(M=32, H=64.0),
                   norm: Optional[float] = None, tolerance: float = 1e-3,
                   grid: Optional[Grid] = None) -> VerificationReport:
    """``||Z phi||^2`` over ``T^2 x [-H, H)`` against ``||phi||^2``.

    Also reports the kernel mass inside the same truncation window, which
    separates series/window truncation from quadrature error.
    """
    t0 = time.perf_counter()
    if norm is None:
        norm = l2_norm(phi, grid or Grid(8.0, 2048))
    z = weyl_zak(phi, params, grid)
    zn = z.norm2()
    lo = -params.M + params.m_offset
    inwin = params.d_eta * float(np.sum(
        xi_integral(phi, 1, params.eta, window=(lo, lo + 2 * params.M + 1), grid=grid)))
    dev = abs(zn - norm ** 2)
    rep = VerificationReport.deviation(
        "zak.isometry", {"M": params.M, "H": params.H, "n_eta": params.n_eta},
        dev, tolerance, zak_norm2=zn, field_norm2=norm ** 2,
        window_kernel_mass=inwin, window_defect=abs(zn - inwin))
    rep.runtime_ms = (time.perf_counter() - t0) * 1e3
    return rep
