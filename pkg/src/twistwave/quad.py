"""Panel Gauss-Legendre quadrature of ``|K(xi, eta)|^2`` over ``xi``.

For chirp fields the integrand is smooth between known break points (jumps
of the y-profile in ``eta - xi`` and jumps of band-limited Fourier
integrals), so splitting panels there gives near machine-precision sums.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Optional

import numpy as np

from .field import ChirpField, Field2D, Grid, SampledField, sample
from .ops import dyadic

GL_ORDER = 20
PANEL = 0.25

_gl_x, _gl_w = np.polynomial.legendre.leggauss(GL_ORDER)


def panel_rule(a: float, b: float, breaks=(), panel: float = PANEL):
    """Nodes and weights of a composite Gauss rule on ``[a, b]``."""
    if b <= a:
        return np.empty(0), np.empty(0)
    pts = sorted({a, b, *[p for p in breaks if a < p < b]})
    xs, ws = [], []
    for lo, hi in zip(pts, pts[1:]):
        m = max(1, int(np.ceil((hi - lo) / panel)))
        edges = np.linspace(lo, hi, m + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[:-1] + edges[1:])
        xs.append((mid[:, None] + half[:, None] * _gl_x[None, :]).ravel())
        ws.append((half[:, None] * _gl_w[None, :]).ravel())
    return np.concatenate(xs), np.concatenate(ws)


def _xi_structure(f: ChirpField, lam: Fraction, eta: float):
    lamf = float(lam)
    lo, hi = np.inf, -np.inf
    brk = []
    for t in f.terms:
        ylo, yhi = t.y_effective()
        lo, hi = min(lo, eta - yhi), max(hi, eta - ylo)
        brk += [eta - yb for yb in t.y_breaks()]
        slope = lamf - float(t.alpha)
        if slope != 0:
            for fb in t.px.ft_breaks():
                w = float(t.ax) * fb
                brk.append((w / np.pi - (float(t.alpha) + lamf) * eta - float(t.beta)) / slope)
    return lo, hi, brk


def xi_integral(f: Field2D, lam, eta, window: Optional[tuple] = None,
                grid: Optional[Grid] = None, panel: float = PANEL) -> np.ndarray:
    """``int |K^lam_f(xi, eta)|^2 dxi`` for each entry of ``eta``.

    ``window`` restricts the ``xi`` range. Sampled (or generic analytic)
    fields use the rectangle rule over the grid nodes.
    """
    from .weyl import kernel_values

    lamq = dyadic(lam)
    eta = np.atleast_1d(np.asarray(eta, float))
    if not isinstance(f, ChirpField):
        if grid is None:
            grid = getattr(f, "grid", None)
        fs = sample(f, grid) if not isinstance(f, SampledField) else f
        g = fs.grid
        xi = g.nodes
        if window is not None:
            xi = xi[(xi >= window[0]) & (xi < window[1])]
        out = np.empty(eta.shape)
        for i, e in enumerate(eta):
            K = kernel_values(fs, lamq, xi, np.full(xi.shape, e))
            out[i] = g.h * np.sum(np.abs(K) ** 2)
        return out
    if not f.terms:
        return np.zeros(eta.shape)
    nodes, weights, owner = [], [], []
    for i, e in enumerate(eta):
        lo, hi, brk = _xi_structure(f, lamq, float(e))
        if window is not None:
            lo, hi = max(lo, window[0]), min(hi, window[1])
        x, w = panel_rule(lo, hi, brk, panel)
        nodes.append(x)
        weights.append(w)
        owner.append(np.full(x.size, i))
    x = np.concatenate(nodes)
    w = np.concatenate(weights)
    idx = np.concatenate(owner)
    K = kernel_values(f, lamq, x, eta[idx])
    return np.bincount(idx, weights=w * np.abs(K) ** 2, minlength=eta.size)


def eta_rule(a: float, b: float, panel: float = 0.125):
    """Composite Gauss rule in ``eta``."""
    return panel_rule(a, b, (), panel)
