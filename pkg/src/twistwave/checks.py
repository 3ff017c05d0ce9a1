"""Verification suites shared by the CLI and the acceptance tests."""
from __future__ import annotations

import csv
import time
from fractions import Fraction
from importlib import resources
from typing import Callable

import numpy as np

from . import bracket as br
from . import spectral as sp
from . import wavelet as wv
from . import zak as zk
from .config import RunConfig
from .field import FunctionField, Grid, gaussian, l2_norm, sample
from .ops import TwistIndex, composition_phase, dilate, twisted_translate, wavelet_op
from .report import VerificationReport
from .weyl import (check_dilation_kernel, hs_norm, inverse_weyl_kernel, kernel_direct,
                   kernel_fft, weyl_kernel)

LAMBDAS_HS = (4, -4, 1, -1, Fraction(1, 4), Fraction(-1, 4))


def _timed(fn):
    def wrapper(*a, **kw):
        t0 = time.perf_counter()
        rep = fn(*a, **kw)
        rep.runtime_ms = (time.perf_counter() - t0) * 1e3
        return rep
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def named_field(name: str):
    if name == "gaussian":
        return gaussian()
    if name.startswith("haar"):
        return wv.haar_generator(int(name[4:] or 0))
    if name == "frame_combo":
        return frame_combo()
    raise ValueError(f"unknown field {name!r}")


def frame_combo(psi=None):
    """``psi + 0.5 T_(1,0) psi`` for the Haar ``psi_0`` by default."""
    psi = psi if psi is not None else wv.haar_generator(0)
    return psi + 0.5 * twisted_translate(psi, TwistIndex(1, 0, 1))


# ---------------------------------------------------------------------------
# ops


@_timed
def check_composition(lam, rng=range(-2, 3), grid: Grid = Grid(4.0, 64),
                      tolerance: float = 1e-12) -> VerificationReport:
    """``T1 T2 g = c T_(k1+k2, l1+l2) g`` on grid nodes for the unit Gaussian.

    The left side composes the defining formula on a black-box evaluator;
    the right side uses the closed-form translated atoms.
    """
    g = gaussian()
    box = FunctionField(g, bbox=None)
    X, Y = np.meshgrid(grid.nodes, grid.nodes)
    worst = 0.0
    for k1 in rng:
        for l1 in rng:
            for k2 in rng:
                for l2 in rng:
                    t1, t2 = TwistIndex(k1, l1, lam), TwistIndex(k2, l2, lam)
                    lhs = twisted_translate(twisted_translate(box, t2), t1)(X, Y)
                    rhs = composition_phase(t1, t2) * twisted_translate(
                        g, TwistIndex(k1 + k2, l1 + l2, lam))(X, Y)
                    worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return VerificationReport.deviation(
        "ops.composition", {"lambda": float(Fraction(lam)), "range": [min(rng), max(rng)],
                            "grid": {"extent": grid.extent, "n": grid.n}},
        worst, tolerance)


@_timed
def check_sampled_translate(grid: Grid = Grid(8.0, 256), tolerance: float = 1e-12) -> VerificationReport:
    """Index-roll translation of samples against samples of the analytic translate."""
    g = gaussian()
    gs = sample(g, grid)
    worst = 0.0
    for k, l, lam in ((1, 0, 1), (-2, 1, Fraction(1, 4)), (2, 3, Fraction(-1, 16))):
        t = TwistIndex(k, l, lam)
        a = twisted_translate(gs, t).data
        b = sample(twisted_translate(g, t), grid).data
        worst = max(worst, float(np.max(np.abs(a - b))))
    return VerificationReport.deviation("ops.sampled_translate", {"n": grid.n}, worst, tolerance)


def suite_ops(cfg: RunConfig):
    tol = cfg.tol("identity")
    reps = [check_composition(lam, tolerance=tol) for lam in (1, Fraction(1, 4), Fraction(1, 16))]
    reps.append(check_sampled_translate(tolerance=tol))
    return reps


# ---------------------------------------------------------------------------
# weyl


@_timed
def check_hs(name: str, lam, grid: Grid = Grid(8.0, 512), tolerance: float = 1e-6) -> VerificationReport:
    """``hs_norm(K^lam_g)`` against ``|lam|^{-1/2} ||g||`` (grid norms on one box)."""
    g = named_field(name)
    gn = l2_norm(g, grid)
    hs = hs_norm(weyl_kernel(g, lam, grid))
    want = abs(float(Fraction(lam))) ** -0.5 * gn
    return VerificationReport.deviation(
        "weyl.hs_relation", {"field": name, "lambda": float(Fraction(lam)),
                             "grid": {"extent": grid.extent, "n": grid.n}},
        abs(hs - want) / gn, tolerance, hs_norm=hs, expected=want, field_norm=gn)


@_timed
def check_fft_oracle(grid: Grid = Grid(4.0, 256), lam=1, tolerance: float = 1e-10) -> VerificationReport:
    """Chirp-z kernel path against the direct O(n^3) sum, relative to the peak."""
    gs = sample(gaussian(), grid)
    a = kernel_fft(gs, lam)
    b = kernel_direct(gs, lam)
    scale = float(np.max(np.abs(b)))
    return VerificationReport.deviation(
        "weyl.fft_vs_direct", {"n": grid.n, "extent": grid.extent, "lambda": float(Fraction(lam))},
        float(np.max(np.abs(a - b))) / scale, tolerance, scale=scale)


@_timed
def check_roundtrip(grid: Grid = Grid(4.0, 256), lam=1, tolerance: float = 1e-8) -> VerificationReport:
    gs = sample(gaussian(), grid)
    back = inverse_weyl_kernel(weyl_kernel(gs, lam))
    n = grid.n
    inner_sl = slice(n // 8, n - n // 8)
    diff = np.abs(back.data - gs.data)[inner_sl, inner_sl]
    scale = float(np.max(np.abs(gs.data)))
    return VerificationReport.deviation(
        "weyl.roundtrip", {"n": n, "lambda": float(Fraction(lam))},
        float(np.max(diff)) / scale, tolerance)


def suite_weyl(cfg: RunConfig):
    reps = []
    for name in ("gaussian", "haar0"):
        for lam in LAMBDAS_HS:
            reps.append(check_hs(name, lam, tolerance=cfg.tol("hs")))
    for name in ("gaussian", "haar0"):
        phi = named_field(name)
        for j in (0, 1, 2):
            for k2, l in ((0, 0), (2, 1), (4, 3)):
                r = check_dilation_kernel(phi, 1, j, k2 // 2, l, tolerance=cfg.tol("kernel"))
                r.parameters["field"] = name
                reps.append(r)
    reps.append(check_fft_oracle(tolerance=cfg.tol("oracle")))
    reps.append(check_roundtrip())
    return reps


# ---------------------------------------------------------------------------
# zak


def marginal_params(p: zk.ZakParams) -> zk.ZakParams:
    """Same ``eta`` step with ``H <= M - 2`` so the series window holds every
    kernel row of a unit-support generator."""
    H = min(p.H, float(p.M - 2))
    return p.with_(H=H, n_eta=max(2, int(round(2 * H / p.d_eta))))


def suite_zak(cfg: RunConfig):
    p = cfg.zak_params()
    reps = []
    for name in ("haar0", "gaussian"):
        phi = named_field(name)
        for k, l in ((0, 0), (1, 1), (2, 1)):
            r = zk.check_zak_translation(phi, k, l, p, cfg.tol("zak"))
            r.parameters["field"] = name
            reps.append(r)
        for r in (zk.check_parseval_xi_prime(phi, p, cfg.tol("zak")),
                  zk.check_zak_marginal(phi, marginal_params(p), cfg.tol("marginal")),
                  zk.check_isometry(phi, p, norm=1.0, tolerance=cfg.tol("isometry"))):
            r.parameters["field"] = name
            reps.append(r)
    return reps


# ---------------------------------------------------------------------------
# bracket


@_timed
def check_bracket_invariance(phi, radius: int = 4, params=zk.ZakParams(M=16, H=8.0, n_eta=128),
                             tolerance: float = 1e-10) -> VerificationReport:
    """``[T_(k,l) phi, T_(k,l) phi] = [phi, phi]`` with matched series ranges."""
    ref = {}
    worst = 0.0
    for k in range(-radius, radius + 1):
        for l in range(-radius, radius + 1):
            if l not in ref:
                ref[l] = br.bracket(phi, params.with_(m_offset=l)).data
            b = br.bracket(twisted_translate(phi, TwistIndex(k, l, 1)), params).data
            worst = max(worst, float(np.max(np.abs(b - ref[l]))))
    return VerificationReport.deviation("bracket.translation_invariance",
                                        {"radius": radius, "M": params.M, "H": params.H},
                                        worst, tolerance)


@_timed
def check_membership_translate(phi, k: int, l: int, params=zk.ZakParams(M=16, H=8.0, n_eta=128),
                               tolerance: float = 1e-8) -> VerificationReport:
    """``T_(k,l) phi`` lies in the space of ``phi`` with the predicted multiplier."""
    f = twisted_translate(phi, TwistIndex(k, l, 1))
    p = params
    r, res = br.membership_residual(f, phi, p)
    b = br.bracket(phi, p)
    turns = np.mod(2 * (k * p.xi[:, None] + l * p.xip[None, :]) + k * l, 2.0)
    want = np.exp(1j * np.pi * turns)
    mult = float(np.max(np.abs(r - want)[b.omega_mask], initial=0.0))
    return VerificationReport.deviation("bracket.membership_translate", {"k": k, "l": l},
                                        res, tolerance, multiplier_deviation=mult)


@_timed
def check_bracket_l1(phi, params, norm: float = 1.0, tolerance: float = 1e-9) -> VerificationReport:
    b = br.bracket(phi, params)
    l1 = b.l1()
    return VerificationReport.deviation("bracket.l1_bound", {"M": params.M, "H": params.H},
                                        max(l1 - norm ** 2, 0.0), tolerance, l1=l1)


def suite_bracket(cfg: RunConfig):
    psi = wv.haar_generator(0)
    reps = [br.check_frame_bounds(frame_combo(psi), int(cfg.get("frame_radius")),
                                  slack=cfg.tol("frame_slack"))]
    reps.append(check_bracket_invariance(frame_combo(psi)))
    reps.append(check_membership_translate(psi, 1, 1))
    reps.append(check_bracket_l1(psi, cfg.zak_params()))
    return reps


# ---------------------------------------------------------------------------
# spectral


def _load_regression(name: str):
    with resources.files("twistwave").joinpath("data", name).open() as fh:
        rows = list(csv.reader(fh))
    return np.array([[float(v) for v in r] for r in rows[1:]])


def haar_regression_check(cfg: RunConfig, s=None, tolerance: float = 1e-6) -> VerificationReport:
    """Haar Calderon curve against the frozen closed-form table for ``j in [-3, 3]``."""
    t0 = time.perf_counter()
    ref = _load_regression("haar_calderon.csv")
    if s is None or s.eta_grid.shape != ref[:, 0].shape or np.any(s.eta_grid != ref[:, 0]):
        s = sp.calderon_sum(wv.haar_family(-3, 3), ref[:, 0])
    dev = float(np.max(np.abs(s.values - ref[:, 1])))
    per = {str(j): float(np.max(np.abs(s.per_j[j] - ref[:, 2 + i])))
           for i, j in enumerate(sorted(s.per_j))}
    rep = VerificationReport.deviation("spectral.haar_regression",
                                       {"j_range": [-3, 3], "n_eta": int(ref.shape[0])},
                                       dev, tolerance, per_j=per)
    rep.runtime_ms = (time.perf_counter() - t0) * 1e3
    return rep


def lattice_combos(psi, count: int, seed: int, radius: int = 2, norm_grid=Grid(8.0, 1024)):
    """``count`` unit-norm combinations of 1 to 3 twisted translates of ``psi``."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        size = 1 + i % 3
        pts = set()
        while len(pts) < size:
            pts.add(tuple(int(v) for v in rng.integers(-radius, radius + 1, 2)))
        f = None
        for k, l in sorted(pts):
            c = complex(rng.normal(), rng.normal())
            term = c * twisted_translate(psi, TwistIndex(k, l, 1))
            f = term if f is None else f + term
        out.append((1.0 / l2_norm(f, norm_grid)) * f)
    return out


@_timed
def check_sigma_invariance(psi, eta, tolerance: float = 1e-10) -> VerificationReport:
    base = sp.sigma_principal(psi, eta).values
    worst = 0.0
    for k, l in ((1, 0), (0, 1), (2, -3)):
        s = sp.sigma_principal(twisted_translate(psi, TwistIndex(k, l, 1)), eta).values
        worst = max(worst, float(np.max(np.abs(s - base))))
    return VerificationReport.deviation("spectral.sigma_translation_invariance", {},
                                        worst, tolerance)


def suite_spectral(cfg: RunConfig):
    H = float(cfg.get("spectral.H"))
    eta = sp.uniform_eta(H, int(cfg.get("spectral.n_eta")))
    lo, hi = cfg.get("spectral.band")
    reps = []
    rep, _ = sp.check_calderon(wv.design_tiling_family(range(-3, 4)), eta, lo, hi,
                               cfg.tol("calderon"), name="spectral.calderon_tiling")
    reps.append(rep)
    reps.append(haar_regression_check(cfg, tolerance=cfg.tol("calderon")))
    psi = wv.haar_generator(0)
    for i, g in enumerate(lattice_combos(psi, 5, int(cfg.get("seed")))):
        for j in (0, 1, 2):
            r = sp.mainineq_check(dilate(g, j), [psi], j, tolerance=cfg.tol("inequality"))
            r.parameters["combo"] = i
            reps.append(r)
    reps.append(check_sigma_invariance(psi, np.linspace(-8, 8, 257)))
    return reps


# ---------------------------------------------------------------------------
# wavelet


def gram_indices(cfg: RunConfig):
    g = cfg.data["gram"]
    return wv.system_indices(g["j"], range(g["k"][0], g["k"][1] + 1),
                             range(g["l"][0], g["l"][1] + 1), range(g["m"][0], g["m"][1] + 1))


def family_from_cfg(cfg: RunConfig, js=None) -> wv.GeneratorFamily:
    fam = cfg.data["family"]
    if js is None:
        js = range(int(fam["j_min"]), int(fam["j_max"]) + 1)
    if fam["kind"] == "haar":
        return wv.GeneratorFamily({j: wv.haar_generator(j, bool(fam["corrupted"])) for j in js})
    if fam["kind"] == "tiling":
        return wv.design_tiling_family(js)
    from .io import read_family

    return read_family(fam["path"])


def run_gram(cfg: RunConfig):
    idx = gram_indices(cfg)
    modified = bool(cfg.get("gram.modified"))
    fam = family_from_cfg(cfg, sorted({i.j for i in idx}))
    t0 = time.perf_counter()
    res = wv.gram_check(wv.build_system(fam, idx, modified), cfg.grid(), idx)
    rep = wv.gram_report(res, cfg.tol("gram"),
                         params={"family": cfg.get("family.kind"), "modified": modified,
                                 "corrupted": bool(cfg.get("family.corrupted")),
                                 "grid": {"extent": cfg.grid().extent, "n": cfg.grid().n}})
    rep.runtime_ms = (time.perf_counter() - t0) * 1e3
    return rep, res


@_timed
def check_coset(tolerance: float = 1e-14) -> VerificationReport:
    """Round trip and phase for a block of ``(k, l, j)`` including negatives."""
    worst = 0.0
    for j in range(4):
        n = 1 << j
        for k in range(-9, 10):
            for l in range(-9, 10):
                p, q, r, s, ph = wv.coset_decompose(k, l, j)
                ok = p * n + r == k and q * n + s == l and 0 <= r < n and 0 <= s < n
                want = np.exp(-1j * np.pi * (p * s - q * r) / n)
                worst = max(worst, abs(ph - want) if ok else np.inf)
    return VerificationReport.deviation("wavelet.coset", {"j": [0, 3]}, worst, tolerance)


@_timed
def check_factorization(psi_j, j: int, tolerance: float = 1e-12) -> VerificationReport:
    """``phase * wavelet_op(psi, j, k, l) = T_(p,q) wavelet_op(psi, j, r, s)`` on nodes.

    ``phase`` is the coset phase; the composition law puts it on this side.
    """
    grid = Grid(4.0, 128)
    X, Y = np.meshgrid(grid.nodes, grid.nodes)
    worst = 0.0
    for k in range(-5, 6):
        for l in range(-5, 6):
            p, q, r, s, ph = wv.coset_decompose(k, l, j)
            lhs = ph * wavelet_op(psi_j, j, k, l)(X, Y)
            rhs = twisted_translate(wavelet_op(psi_j, j, r, s), TwistIndex(p, q, 1))(X, Y)
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return VerificationReport.deviation("wavelet.factorization", {"j": j}, worst, tolerance)


def w0j_combo(psi_j, j: int, seed: int, grid=Grid(32.0, 1 << 14)):
    """Unit-norm combination of three ``W_{0,j}`` basis elements."""
    rng = np.random.default_rng(seed + 101 * j)
    n = 1 << j
    f = None
    pts = set()
    while len(pts) < 3:
        pts.add((int(rng.integers(-4, 5)), int(rng.integers(-4, 5)),
                 int(rng.integers(0, n)), int(rng.integers(0, n))))
    for kp, lp, k, l in sorted(pts):
        term = complex(rng.normal(), rng.normal()) * wv.w0j_element(psi_j, j, kp, lp, k, l)
        f = term if f is None else f + term
    return (1.0 / l2_norm(f, grid)) * f


def suite_wavelet(cfg: RunConfig):
    rep, _ = run_gram(cfg)
    reps = [rep, check_coset()]
    fam = family_from_cfg(cfg, [0, 1, 2])
    for j in (0, 1, 2):
        reps.append(check_factorization(fam[j], j))
    R = int(cfg.get("lattice_radius"))
    for j in (0, 1):
        psi = fam[j]
        reps.append(wv.w0j_parseval_check(w0j_combo(psi, j, int(cfg.get("seed"))), psi, j, R,
                                          tolerance=cfg.tol("parseval")))
    return reps


SUITES: dict[str, Callable] = {
    "ops": suite_ops,
    "weyl": suite_weyl,
    "zak": suite_zak,
    "bracket": suite_bracket,
    "spectral": suite_spectral,
    "wavelet": suite_wavelet,
}


def run_suite(name: str, cfg: RunConfig):
    if name == "all":
        return [r for key in SUITES for r in SUITES[key](cfg)]
    return SUITES[name](cfg)
