"""Bracket map, frame bounds and membership residuals."""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .field import Block, Field2D, Grid, block_inner
from .ops import TwistIndex, twisted_translate
from .report import VerificationReport
from .zak import ZakField, ZakParams, weyl_zak


@dataclass
class BracketMap:
    """``[phi, phi]`` on the ``(xi, xi')`` Zak grid."""

    data: np.ndarray
    eps_support: float
    omega_mask: np.ndarray
    params: ZakParams

    def l1(self) -> float:
        return float(np.mean(self.data))


def bracket_from_zak(z: ZakField, rel_eps: float = 1e-8) -> BracketMap:
    raw = z.params.d_eta * np.sum(z.data * np.conj(z.data), axis=0)
    peak = float(np.max(np.abs(raw.real), initial=0.0))
    if np.max(np.abs(raw.imag), initial=0.0) > 1e-12 * max(peak, 1.0):
        raise ArithmeticError("bracket has a non-negligible imaginary part")
    data = np.maximum(raw.real, 0.0)
    eps = rel_eps * float(np.max(data, initial=0.0))
    mask = data > eps if eps > 0 else np.zeros(data.shape, bool)
    return BracketMap(data, eps, mask, z.params)


def bracket(phi: Field2D, params: ZakParams = ZakParams(), rel_eps: float = 1e-8,
            grid: Optional[Grid] = None) -> BracketMap:
    """``[phi, phi](xi, xi') = int |Z phi|^2 d eta`` over ``[-H, H)``."""
    return bracket_from_zak(weyl_zak(phi, params, grid), rel_eps)


@dataclass
class FrameBounds:
    A: float
    B: float
    degenerate: bool = False

    def __iter__(self):
        return iter((self.A, self.B))


def frame_bounds(b: BracketMap) -> FrameBounds:
    """Grid min and max of the bracket over its support set."""
    if not np.any(b.omega_mask):
        return FrameBounds(0.0, 0.0, degenerate=True)
    vals = b.data[b.omega_mask]
    return FrameBounds(float(vals.min()), float(vals.max()))


def membership_residual(f: Field2D, phi: Field2D, params: ZakParams = ZakParams(),
                        rel_eps: float = 1e-8, grid: Optional[Grid] = None):
    """Best multiplier ``r(xi, xi')`` with ``Z f ~ r Z phi`` and the residual.

    Returns ``(r, residual)`` with residual ``||Z f - r Z phi|| / ||Z f||``,
    both norms taken over the same Zak window.
    """
    zf = weyl_zak(f, params, grid)
    zp = weyl_zak(phi, params, grid)
    b = bracket_from_zak(zp, rel_eps)
    cross = params.d_eta * np.sum(zf.data * np.conj(zp.data), axis=0)
    r = np.zeros(cross.shape, dtype=complex)
    r[b.omega_mask] = cross[b.omega_mask] / b.data[b.omega_mask]
    diff = zf.data - r[None] * zp.data
    num = np.sqrt(params.d_eta * np.sum(np.abs(diff) ** 2) / params.nt ** 2)
    den = np.sqrt(zf.norm2())
    return r, (float(num / den) if den > 0 else 0.0)


def lattice(radius: int):
    return [(k, l) for k in range(-radius, radius + 1) for l in range(-radius, radius + 1)]


def lattice_gram(phi: Field2D, radius: int, grid: Grid) -> np.ndarray:
    """Gram matrix of ``{T_(k,l) phi : |k|, |l| <= radius}`` by grid quadrature."""
    idx = lattice(radius)
    blocks = [Block(twisted_translate(phi, TwistIndex(k, l, 1)), grid) for k, l in idx]
    n = len(idx)
    G = np.zeros((n, n), dtype=complex)
    for a in range(n):
        for b in range(a, n):
            v = block_inner(blocks[a], blocks[b], grid.h)
            G[a, b] = v
            G[b, a] = np.conj(v)
    return G


def check_frame_bounds(phi: Field2D, radius: int = 8, grid: Optional[Grid] = None,
                       params: ZakParams = ZakParams(M=36, H=32.0, n_eta=512),
                       slack: float = 0.05) -> VerificationReport:
    """Bracket bounds against the truncated-lattice Gram spectrum.

    Passes when ``A <= lam_min + slack`` and ``B >= lam_max - slack``.
    """
    t0 = time.perf_counter()
    grid = grid or Grid(16.0, 4096)
    A, B = frame_bounds(bracket(phi, params))
    ev = np.linalg.eigvalsh(lattice_gram(phi, radius, grid))
    lo, hi = float(ev.min()), float(ev.max())
    dev = max(A - lo, hi - B, 0.0)
    rep = VerificationReport.deviation(
        "bracket.frame_bounds", {"radius": radius, "M": params.M, "H": params.H},
        dev, slack, A=A, B=B, gram_min=lo, gram_max=hi)
    rep.runtime_ms = (time.perf_counter() - t0) * 1e3
    return rep


def bracket_at(phi: Field2D, xi: float, xip: float, params: ZakParams = ZakParams(),
               grid: Optional[Grid] = None) -> float:
    """Bracket at one ``(xi, xi')`` point with the same ``eta`` rule as :func:`bracket`."""
    from .weyl import kernel_values

    eta = params.eta
    ms = params.ms
    K = kernel_values(phi, 1, xi + ms[None, :], eta[:, None], grid=grid)
    turns = np.mod(-2.0 * ms * xip, 2.0)
    z = K @ np.exp(1j * np.pi * turns)
    return float(params.d_eta * np.sum(np.abs(z) ** 2))
