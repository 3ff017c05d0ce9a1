"""Weyl transform kernels.

``K^lam_g(xi, eta) = int g(x, eta - xi) exp(i pi lam x (eta + xi)) dx``.

Chirp fields get the closed form of the x-integral; sampled fields use the
rectangle rule, either as a direct O(n^3) sum or through a chirp-z
factorisation (O(n^2 log n)).
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.signal import czt

from .field import (ChirpField, Field2D, Grid, GridError, SampledField,
                    interpolate, sample)
from .ops import TwistIndex, dilate, dyadic, twisted_translate
from .report import VerificationReport


@dataclass
class WeylKernel:
    """Kernel samples ``data[i_eta, i_xi]`` on a grid over ``(xi, eta)``."""

    lam: Fraction
    grid: Grid
    data: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.lam = dyadic(self.lam)
        if self.data.shape != (self.grid.n, self.grid.n):
            raise GridError("kernel data does not match grid")


def _atom_kernel(t, lam: float, xi, eta):
    y = eta - xi
    # grouped so the xi term vanishes exactly when lam == alpha
    w = np.pi * ((float(t.alpha) + lam) * eta + (lam - float(t.alpha)) * xi + float(t.beta))
    ax, bx = float(t.ax), float(t.bx)
    ftx = np.exp(-1j * w * bx / ax) * t.px.ft(w / ax) / abs(ax)
    c = t.coef * np.exp(1j * np.pi * float(t.phase % 2))
    return (c * np.exp(1j * np.pi * float(t.gamma) * y)
            * t.qy(float(t.ay) * y + float(t.by)) * ftx)


def _sampled_kernel_points(g: SampledField, lam: float, xi, eta, order="nearest",
                           chunk: int = 1 << 14):
    grid = g.grid
    x = grid.nodes
    xi = np.asarray(xi, float).ravel()
    eta = np.asarray(eta, float).ravel()
    out = np.empty(xi.shape, dtype=complex)
    for c0 in range(0, xi.size, chunk):
        sl = slice(c0, c0 + chunk)
        y = (eta[sl] - xi[sl])[:, None]
        s = (eta[sl] + xi[sl])[:, None]
        rows = interpolate(g, np.broadcast_to(x[None, :], (y.shape[0], x.size)),
                           np.broadcast_to(y, (y.shape[0], x.size)), order)
        turns = np.mod(lam * x[None, :] * s, 2.0)
        out[sl] = grid.h * np.sum(rows * np.exp(1j * np.pi * turns), axis=1)
    return out


def kernel_values(g: Field2D, lam, xi, eta, grid: Optional[Grid] = None,
                  order: str = "nearest"):
    """Pointwise ``K^lam_g`` at arrays ``xi, eta`` (broadcast together)."""
    lamq = dyadic(lam)
    lamf = float(lamq)
    xi, eta = np.broadcast_arrays(np.asarray(xi, float), np.asarray(eta, float))
    if isinstance(g, ChirpField):
        out = np.zeros(xi.shape, dtype=complex)
        for t in g.terms:
            out = out + _atom_kernel(t, lamf, xi, eta)
        return out
    if not isinstance(g, SampledField):
        if grid is None:
            raise GridError("non-closed-form fields need a grid for the kernel")
        g = sample(g, grid)
    return _sampled_kernel_points(g, lamf, xi, eta, order).reshape(xi.shape)


def _phase_matrix(grid: Grid, lam: float) -> np.ndarray:
    n, X, h = grid.n, grid.extent, grid.h
    x = grid.nodes
    s = -2 * X + np.arange(2 * n - 1) * h
    return np.exp(1j * np.pi * np.mod(lam * s[:, None] * x[None, :], 2.0))


def kernel_direct(g: SampledField, lam) -> np.ndarray:
    """Direct O(n^3) rectangle-rule kernel on ``g``'s own grid."""
    lamf = float(dyadic(lam))
    grid = g.grid
    n, h = grid.n, grid.h
    E = _phase_matrix(grid, lamf)
    out = np.zeros((n, n), dtype=complex)
    a = np.arange(n)
    for b in range(n):
        c = b - a + n // 2
        ok = (c >= 0) & (c < n)
        aa = a[ok]
        out[b, aa] = h * np.sum(g.data[c[ok], :] * E[aa + b, :], axis=1)
    return out


def kernel_fft(g: SampledField, lam) -> np.ndarray:
    """Same sum as :func:`kernel_direct` via one chirp-z transform per row."""
    lamf = float(dyadic(lam))
    grid = g.grid
    n, X, h = grid.n, grid.extent, grid.h
    i = np.arange(n)
    t = np.arange(2 * n - 1)
    pre = np.exp(1j * np.pi * np.mod(-2 * lamf * X * h * i, 2.0))
    post = np.exp(1j * np.pi * np.mod(lamf * (2 * X * X - X * h * t), 2.0))
    w = np.exp(1j * np.pi * lamf * h * h)
    F = czt(g.data * pre[None, :], m=2 * n - 1, w=w, a=1.0, axis=-1) * post[None, :]
    F *= h
    a = np.arange(n)
    out = np.zeros((n, n), dtype=complex)
    for b in range(n):
        c = b - a + n // 2
        ok = (c >= 0) & (c < n)
        out[b, a[ok]] = F[c[ok], a[ok] + b]
    return out


def weyl_kernel(g: Field2D, lam, out: Optional[Grid] = None, method: str = "auto",
                order: str = "nearest") -> WeylKernel:
    """Kernel samples on ``out`` (defaults to the field's grid).

    ``method`` is ``"exact"`` (closed form, chirp fields), ``"fft"`` or
    ``"direct"`` (rectangle rule on a sampled field); ``"auto"`` picks exact
    when available and fft otherwise.
    """
    lamq = dyadic(lam)
    if out is None:
        if not isinstance(g, SampledField):
            raise GridError("analytic fields need an output grid")
        out = g.grid
    if method == "auto":
        method = "exact" if isinstance(g, ChirpField) else "fft"
    if method == "exact":
        if not isinstance(g, ChirpField):
            raise ValueError("exact kernels need a ChirpField")
        XI, ETA = np.meshgrid(out.nodes, out.nodes)
        return WeylKernel(lamq, out, kernel_values(g, lamq, XI, ETA), {"method": "exact"})
    gs = sample(g, out, order)
    fn = {"fft": kernel_fft, "direct": kernel_direct}[method]
    return WeylKernel(lamq, out, fn(gs, lamq), {"method": method, "interpolation": order})


def hs_norm(K: WeylKernel) -> float:
    """Grid L2 norm of the kernel samples."""
    return float(np.sqrt(K.grid.h ** 2 * np.sum(np.abs(K.data) ** 2)))


def inverse_weyl_kernel(K: WeylKernel, out: Optional[Grid] = None) -> SampledField:
    """Field whose kernel reproduces ``K``.

    In ``y = eta - xi``, ``s = eta + xi`` the kernel is a Fourier integral in
    ``x``; inverting it gives ``g(x, y) = |lam|/2 int K(y, s) e^{-i pi lam x s} ds``,
    evaluated along each kernel diagonal (``ds = 2h``) with a chirp-z sum.
    """
    grid = K.grid
    lamf = float(K.lam)
    n, X, h = grid.n, grid.extent, grid.h
    x = grid.nodes
    data = np.zeros((n, n), dtype=complex)
    w = np.exp(-2j * np.pi * lamf * h * h)
    for c in range(n):
        d = c - n // 2
        a0, a1 = max(0, -d), min(n, n - d)
        if a1 <= a0:
            continue
        a = np.arange(a0, a1)
        vals = K.data[a + d, a]
        if not np.any(vals):
            continue
        r = np.arange(a1 - a0)
        s0 = -2 * X + (2 * a0 + d) * h
        pre = np.exp(1j * np.pi * np.mod(2 * lamf * h * X * r, 2.0))
        post = np.exp(-1j * np.pi * np.mod(lamf * x * s0, 2.0))
        data[c, :] = abs(lamf) * h * czt(vals * pre, m=n, w=w, a=1.0) * post
    g = SampledField(grid, data, {"source": "inverse_weyl_kernel"})
    if out is not None and out != grid:
        g = sample(g, out)
    return g


def check_dilation_kernel(phi: Field2D, lam, j: int, k: int = 0, l: int = 0,
                          grid: Optional[Grid] = None, tolerance: float = 1e-8,
                          order: str = "nearest") -> VerificationReport:
    """Both dilation relations for kernels of dilated (and translated) fields.

    Compares ``K^lam_{D_{2^j} phi}(xi, eta)`` with ``K^{lam 4^-j}_phi(2^j xi, 2^j eta)``
    and, for the even-index translate ``T_(2k, l)`` at ``lam 4^-j``, the kernel
    with ``e^{2 pi i lam 4^-j k (2^{j+1} xi + l)} K^{lam 4^-j}_phi(2^j xi + l, 2^j eta)``.
    """
    t0 = time.perf_counter()
    lamq = dyadic(lam)
    mu = lamq / Fraction(4) ** j
    grid = grid or Grid(4.0, 64)
    XI, ETA = np.meshgrid(grid.nodes, grid.nodes)
    a = 2.0 ** j
    skipped = 0
    mask = np.ones(XI.shape, bool)
    if isinstance(phi, SampledField):
        # both sides need kernel arguments on phi's grid
        pg = phi.grid

        def on_grid(v):
            u = (v + pg.extent) / pg.h
            return (np.abs(u - np.rint(u)) < 1e-9) & (u >= 0) & (u < pg.n)

        mask = on_grid(a * XI) & on_grid(a * ETA) & on_grid(a * XI + l)
        skipped = int(np.size(mask) - np.count_nonzero(mask))
        XI, ETA = XI[mask], ETA[mask]
    kw = dict(grid=getattr(phi, "grid", None), order=order)

    d_phi = dilate(phi, j, order)
    lhs1 = kernel_values(d_phi, lamq, XI, ETA, **kw)
    rhs1 = kernel_values(phi, mu, a * XI, a * ETA, **kw)
    tr = dilate(twisted_translate(phi, TwistIndex(2 * k, l, mu)), j, order)
    lhs2 = kernel_values(tr, lamq, XI, ETA, **kw)
    turns = np.mod(2 * float(mu) * k * (2 * a * XI + l), 2.0)
    rhs2 = np.exp(1j * np.pi * turns) * kernel_values(phi, mu, a * XI + l, a * ETA, **kw)
    dev1 = float(np.max(np.abs(lhs1 - rhs1), initial=0.0))
    dev2 = float(np.max(np.abs(lhs2 - rhs2), initial=0.0))
    rep = VerificationReport.deviation(
        "weyl.dilation_kernel",
        {"lambda": float(lamq), "j": j, "k2": 2 * k, "l": l,
         "grid": {"extent": grid.extent, "n": grid.n}},
        max(dev1, dev2), tolerance,
        dilation_deviation=dev1, translate_deviation=dev2,
        kernel_scale=float(np.max(np.abs(rhs1), initial=0.0)),
        skipped=skipped, compared=int(np.size(XI)))
    rep.runtime_ms = (time.perf_counter() - t0) * 1e3
    return rep
