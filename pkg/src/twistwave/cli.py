"""Command-line entry point: ``twistwave <command> [options] [--dotted.key value ...]``."""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import checks
from .config import ConfigError, RunConfig
from .report import VerificationReport, dumps

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SUITE_NAMES = (*checks.SUITES, "all")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="twistwave", description="Twisted wavelet verification toolkit.")
    p.add_argument("command", choices=("verify", "calderon", "gram", "bracket", "zak", "sigma"))
    p.add_argument("suite", nargs="?", help="suite name for verify")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--out", help="output directory")
    p.add_argument("--format", help="comma-separated subset of json,csv")
    p.add_argument("--seed", type=int)
    p.add_argument("--field", help="field for bracket/zak/sigma: haar<j>, gaussian, frame_combo")
    p.add_argument("--quiet", action="store_true")
    return p


def _split_overrides(rest):
    out = []
    i = 0
    while i < len(rest):
        tok = rest[i]
        if not tok.startswith("--") or "." not in tok:
            raise UsageError(f"unrecognised argument {tok!r}")
        key = tok[2:]
        if "=" in key:
            key, val = key.split("=", 1)
            i += 1
        else:
            if i + 1 >= len(rest):
                raise UsageError(f"missing value for {tok}")
            val = rest[i + 1]
            i += 2
        out.append((key, val))
    return out


def load_config(args, rest) -> RunConfig:
    over = _split_overrides(rest)
    if args.out:
        over.append(("output.dir", args.out))
    if args.format:
        over.append(("output.formats", args.format))
    if args.seed is not None:
        over.append(("seed", str(args.seed)))
    if args.field:
        over.append(("field", args.field))
    return RunConfig.build(args.config, over)


class Writer:
    """Serialised report and table output."""

    def __init__(self, cfg: RunConfig):
        self.dir = Path(cfg.get("output.dir"))
        self.formats = set(cfg.get("output.formats"))
        self.names: dict[str, int] = {}

    def _path(self, stem: str, ext: str) -> Path:
        self.dir.mkdir(parents=True, exist_ok=True)
        return self.dir / f"{stem}.{ext}"

    def report(self, rep: VerificationReport) -> None:
        if "json" not in self.formats:
            return
        n = self.names.get(rep.check_name, 0)
        self.names[rep.check_name] = n + 1
        stem = rep.check_name if n == 0 else f"{rep.check_name}.{n}"
        self._path(stem, "json").write_text(rep.to_json())

    def json(self, stem: str, obj) -> None:
        if "json" in self.formats:
            self._path(stem, "json").write_text(dumps(obj))

    def csv(self, stem: str, fn) -> None:
        if "csv" in self.formats:
            fn(self._path(stem, "csv"))


def summary(reports, stream=None) -> None:
    stream = stream or sys.stdout
    for r in reports:
        print(r.line(), file=stream)
    ok = sum(r.passed for r in reports)
    print(f"{ok}/{len(reports)} checks passed", file=stream)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("TWC_THREADS", "1")))
    except ValueError:
        return 1


def cmd_verify(suite: str, cfg: RunConfig, writer: Writer):
    names = list(checks.SUITES) if suite == "all" else [suite]
    workers = min(_threads(), len(names))
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            groups = list(ex.map(lambda s: checks.SUITES[s](cfg), names))
    else:
        groups = [checks.SUITES[s](cfg) for s in names]
    reports = [r for g in groups for r in g]
    for r in reports:
        writer.report(r)
    return reports


def cmd_calderon(cfg: RunConfig, writer: Writer):
    from . import io
    from . import spectral as sp

    fam = checks.family_from_cfg(cfg)
    H = float(cfg.get("spectral.H"))
    eta = sp.uniform_eta(H, int(cfg.get("spectral.n_eta")))
    lo, hi = cfg.get("spectral.band")
    kind = cfg.get("family.kind")
    reports = []
    if kind == "haar" and fam.j_range == (-3, 3) and not cfg.get("family.corrupted"):
        s = sp.calderon_sum(fam, eta)
        reports.append(checks.haar_regression_check(cfg, s, cfg.tol("calderon")))
    else:
        rep, s = sp.check_calderon(fam, eta, lo, hi, cfg.tol("calderon"))
        reports.append(rep)
    writer.csv("calderon", lambda p: io.write_spectral_csv(p, s))
    edges = [2.0 ** i for i in range(-40, 41)]
    mask = sp.band_mask(eta, lo, hi, edges, 2 * s.step)
    writer.json("calderon_summary", {
        "family": kind, "j_range": list(fam.j_range or ()), "covered_band": [lo, hi],
        "max_abs_total_minus_one": float(np.max(np.abs(s.values[mask] - 1.0), initial=0.0)),
        "l1": sp.sigma_l1(s)})
    for r in reports:
        writer.report(r)
    return reports


def cmd_gram(cfg: RunConfig, writer: Writer):
    from . import io

    rep, res = checks.run_gram(cfg)
    writer.csv("gram", lambda p: io.write_gram_csv(p, res))
    writer.json("gram_summary", {"defect": res.defect, "size": len(res.indices),
                                 "tolerance": rep.tolerance, "pass": rep.passed})
    writer.report(rep)
    return [rep]


def cmd_bracket(cfg: RunConfig, writer: Writer):
    from . import bracket as br
    from . import io

    phi = checks.named_field(cfg.get("field"))
    p = cfg.zak_params()
    b = br.bracket(phi, p)
    fb = br.frame_bounds(b)
    writer.csv("bracket", lambda path: io.write_bracket_csv(path, b))
    rep = checks.check_bracket_l1(phi, p, norm=1.0)
    rep.parameters["field"] = cfg.get("field")
    rep.metrics.update(A=fb.A, B=fb.B, degenerate=fb.degenerate)
    writer.report(rep)
    return [rep]


def cmd_zak(cfg: RunConfig, writer: Writer):
    from . import io
    from . import zak as zk

    phi = checks.named_field(cfg.get("field"))
    p = cfg.zak_params()
    rep = zk.check_isometry(phi, p, norm=1.0, tolerance=cfg.tol("isometry"))
    rep.parameters["field"] = cfg.get("field")
    if "json" in writer.formats or "csv" in writer.formats:
        writer.dir.mkdir(parents=True, exist_ok=True)
        io.write_zak(writer.dir / "zak.twzk", zk.weyl_zak(phi, p))
    writer.report(rep)
    return [rep]


def cmd_sigma(cfg: RunConfig, writer: Writer):
    from . import io
    from . import spectral as sp

    phi = checks.named_field(cfg.get("field"))
    eta = sp.uniform_eta(float(cfg.get("spectral.H")), int(cfg.get("spectral.n_eta")))
    s = sp.sigma_principal(phi, eta)
    writer.csv("sigma", lambda p: io.write_spectral_csv(p, s))
    l1 = sp.sigma_l1(s)
    rep = VerificationReport.deviation("spectral.sigma_l1", {"field": cfg.get("field")},
                                       max(l1 - 1.0, 0.0), cfg.tol("isometry"), l1=l1)
    writer.report(rep)
    return [rep]


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args, rest = build_parser().parse_known_args(argv)
        if args.command == "verify":
            if args.suite not in SUITE_NAMES:
                raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITE_NAMES)}")
        elif args.suite is not None:
            raise UsageError(f"{args.command} takes no positional argument")
        cfg = load_config(args, rest)
        if cfg.get("family.kind") == "file":
            path = cfg.get("family.path")
            if not path or not Path(path).is_file():
                raise ConfigError(f"family file {path!r} is unreadable")
    except (UsageError, ConfigError) as e:
        print(f"twistwave: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    writer = Writer(cfg)
    try:
        if args.command == "verify":
            reports = cmd_verify(args.suite, cfg, writer)
        else:
            reports = globals()[f"cmd_{args.command}"](cfg, writer)
    except (OSError, ValueError) as e:
        print(f"twistwave: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if not args.quiet:
        summary(reports)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
