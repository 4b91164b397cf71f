"""Command-line interface: ``tvsip <command> ...``.

Exit status is 0 on success, 1 on invalid input or usage, and 2 when
``--strict`` is given and a solver reported a numerical failure flag.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .decomp import (BlobGeometry, experiment_1d_distance, experiment_blobs,
                     experiment_two_discs)
from .eigen import make_box_1d, make_disc_2d
from .flow import FlowParams, extinction_time, run_flow
from .grid import l2_norm
from .io import (format_record, load_decomposition, load_trajectory, read_signal,
                 save_decomposition, save_trajectory, spectrum_rows, write_manifest,
                 write_plot, write_rows_csv, write_signal)
from .sip import full_report, tv_handle
from .spectral import (FilterSpec, apply_filter, check_phi_orthogonality, reconstruct,
                       spectrum, transform)
from .tv import TvConfig

log = logging.getLogger("tvsip")

STRICT_FAILURE = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def positive(s: str) -> float:
    x = float(s)
    if not x > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {s}")
    return x


def parse_range(s: str) -> np.ndarray:
    """``start:step:stop`` (inclusive), or a comma-separated list."""
    if ":" in s:
        try:
            a, step, b = (float(x) for x in s.split(":"))
        except ValueError:
            raise argparse.ArgumentTypeError(f"range must be start:step:stop, got {s!r}") from None
        if not step > 0 or b < a:
            raise argparse.ArgumentTypeError(f"bad range {s!r}")
        n = int(np.floor((b - a) / step + 1e-9)) + 1
        return a + step * np.arange(n)
    try:
        return np.array([float(x) for x in s.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad list {s!r}") from None


def parse_kv(items, spec: dict) -> dict:
    """``key=value`` tokens converted with the types in ``spec``."""
    out = {}
    for it in items:
        k, sep, v = it.partition("=")
        if not sep or k not in spec:
            raise UsageError(f"unknown or malformed parameter {it!r}; expected {sorted(spec)}")
        try:
            out[k] = spec[k](v)
        except ValueError:
            raise UsageError(f"bad value for {k}: {v!r}") from None
    return out


def _tv(args) -> TvConfig:
    return TvConfig(variant=args.tv_variant, prox_tol=args.prox_tol,
                    prox_max_iter=args.prox_max_iter)


def _outdir(path) -> Path:
    d = Path(path)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _tv_flags(p):
    p.add_argument("--tv-variant", choices=["isotropic", "anisotropic"], default=None,
                   help="default: anisotropic in 1D, isotropic in 2D")
    p.add_argument("--prox-tol", type=positive, default=1e-6)
    p.add_argument("--prox-max-iter", type=int, default=5000)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="tvsip", description="TV flow spectral decomposition and "
                 "semi-inner-product measures.")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    ap.add_argument("--strict", action="store_true",
                    help="exit with status 2 if any solver did not converge")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("flow", help="run the TV flow and store the trajectory")
    p.add_argument("input")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--dt", type=positive, required=True)
    p.add_argument("--T", type=positive, required=True, dest="horizon")
    p.add_argument("--stop-eps", type=float, default=1e-4)
    p.add_argument("--spacing", type=positive, default=None)
    _tv_flags(p)

    p = sub.add_parser("transform", help="trajectory -> bands, spectra CSV and SVG")
    p.add_argument("trajectory", help="directory written by 'flow'")
    p.add_argument("--out", required=True)

    p = sub.add_parser("filter", help="apply a scale filter to stored bands")
    p.add_argument("bands", help="directory written by 'transform'")
    p.add_argument("--kind", required=True,
                   choices=["lowpass", "highpass", "bandpass", "bandstop", "custom"])
    p.add_argument("--t1", type=positive)
    p.add_argument("--t2", type=positive)
    p.add_argument("--h-file", help="CSV with one weight per band (kind=custom)")
    p.add_argument("--out", required=True, help="output signal (.csv, .pgm or .f64)")

    p = sub.add_parser("measures", help="s.i.p. measures between two signals")
    p.add_argument("u")
    p.add_argument("v")
    p.add_argument("--csv", help="also write the report as a one-row CSV")
    _tv_flags(p)

    p = sub.add_parser("eigen", help="construct and verify an eigenfunction")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--box1d", nargs="*", metavar="KEY=VALUE",
                   help="n, w, h (box value above the mean), offset, spacing")
    g.add_argument("--disc2d", nargs="*", metavar="KEY=VALUE",
                   help="n, r, height, cy, cx, spacing")
    p.add_argument("--out", help="write the signal (.csv, .pgm or .f64)")
    _tv_flags(p)

    p = sub.add_parser("experiment", help="regenerate a measure experiment")
    p.add_argument("name", choices=["blobs", "boxes1d", "discs2d"])
    p.add_argument("--out", default="out", help="output directory (default: ./out)")
    p.add_argument("--n", type=int, help="grid size (default depends on the experiment)")
    p.add_argument("--r", type=positive, default=12.0, help="disc radius (discs2d)")
    p.add_argument("--h", type=positive, default=1.0, help="disc height (discs2d)")
    p.add_argument("--d-over-r", type=parse_range, default=None,
                   help="start:step:stop, default 0:0.25:5")
    p.add_argument("--w1", type=int, default=8)
    p.add_argument("--w2", type=int, default=8)
    p.add_argument("--h1", type=positive, default=1.0)
    p.add_argument("--h2", type=positive, default=1.0)
    p.add_argument("--d", type=parse_range, default=None, help="box distances (boxes1d)")
    p.add_argument("--no-flow", action="store_true", help="blobs: measures only")
    _tv_flags(p)
    return ap


# ------------------------------------------------------------- commands

def cmd_flow(args) -> bool:
    f = read_signal(args.input, args.spacing)
    params = FlowParams(dt=args.dt, horizon=args.horizon, tv=_tv(args), stop_eps=args.stop_eps)
    traj = run_flow(f, params)
    out = save_trajectory(traj, args.out)
    write_manifest(out / "manifest.json", {
        "command": "flow", "input": args.input, "dt": args.dt, "horizon": args.horizon,
        "stop_eps": args.stop_eps, "tv_variant": args.tv_variant, "prox_tol": args.prox_tol,
        "prox_max_iter": args.prox_max_iter, "steps": traj.n_steps,
    })
    print(f"steps = {traj.n_steps}")
    print(f"extinction_time = {extinction_time(traj):.6g}")
    print(f"converged = {traj.all_converged}")
    return traj.all_converged


def cmd_transform(args) -> bool:
    traj = load_trajectory(args.trajectory)
    dec = transform(traj)
    spec = spectrum(traj, dec)
    out = save_decomposition(dec, args.out)
    write_rows_csv(spectrum_rows(spec), out / "spectrum.csv")
    write_plot(spec, out / "spectrum.svg")
    f = traj.state(0) + traj.mean
    rec = reconstruct(dec)
    nf = l2_norm(f)
    err = l2_norm(rec - f) / nf if nf > 0 else l2_norm(rec - f)
    overlap = check_phi_orthogonality(traj, dec)
    write_manifest(out / "manifest.json", {
        "command": "transform", "trajectory": args.trajectory, "bands": len(dec.times),
        "dt": dec.dt, "reconstruction_error": err, "s2_clamped": spec.clamped,
        "phi_u_overlap": overlap,
    })
    print(f"bands = {len(dec.times)}")
    print(f"reconstruction_error = {err:.3e}")
    print(f"phi_u_overlap = {overlap:.3e}")
    print(f"s2_clamped = {spec.clamped}")
    return traj.all_converged


def cmd_filter(args) -> bool:
    dec = load_decomposition(args.bands)
    h = None
    if args.kind == "custom":
        if not args.h_file:
            raise UsageError("--kind custom needs --h-file")
        h = read_signal(args.h_file).values
    spec = FilterSpec(args.kind, t1=args.t1, t2=args.t2, custom_h=h)
    out = apply_filter(dec, spec)
    write_signal(out, args.out)
    print(f"wrote {args.out}")
    return True


def cmd_measures(args) -> bool:
    u, v = read_signal(args.u), read_signal(args.v)
    rep = full_report(u, v, tv_handle(_tv(args)))
    rec = rep.as_dict()
    sys.stdout.write(format_record(rec))
    if args.csv:
        write_rows_csv([rec], args.csv)
    return rep.converged


def cmd_eigen(args) -> bool:
    cfg = _tv(args)
    F = tv_handle(cfg)
    if args.box1d is not None:
        kv = parse_kv(args.box1d, {"n": int, "w": int, "h": float, "a": float,
                                   "offset": int, "spacing": float})
        a = kv.get("h", kv.get("a", 1.0))
        pair = make_box_1d(kv.get("n", 256), kv.get("w", 20), a, offset=kv.get("offset", 0),
                           spacing=kv.get("spacing", 1.0), F=F)
    else:
        kv = parse_kv(args.disc2d, {"n": int, "r": float, "height": float, "cy": float,
                                    "cx": float, "spacing": float})
        n = kv.get("n", 128)
        c = (n - 1) / 2
        pair = make_disc_2d(n, kv.get("r", n / 8), (kv.get("cy", c), kv.get("cx", c)),
                            kv.get("height", 1.0), spacing=kv.get("spacing", 1.0), F=F)
    print(f"lambda = {pair.lam:.6g}")
    print(f"residual = {pair.residual:.3e}")
    if args.out:
        write_signal(pair.signal, args.out)
    return True


def _curve_out(curve, out: Path, stem: str, xlabel: str, extra_meta: dict) -> None:
    write_rows_csv(curve.rows(), out / f"{stem}.csv")
    curve.metadata["xlabel"] = xlabel
    write_plot(curve, out / f"{stem}.svg")
    write_manifest(out / "manifest.json", dict(curve.metadata, **extra_meta))
    for row in curve.rows():
        print(f"{row['x']:.4g}, O={row['O']:.4f}, L={row['L']:.4f}")


def cmd_experiment(args) -> bool:
    out = _outdir(args.out)
    cfg = _tv(args) if args.prox_max_iter != 5000 or args.tv_variant or args.prox_tol != 1e-6 \
        else None
    tolmeta = {"prox_tol": args.prox_tol, "prox_max_iter": args.prox_max_iter,
               "tv_variant": args.tv_variant}
    if args.name == "boxes1d":
        n = args.n or 256
        curve = experiment_1d_distance(n, args.w1, args.h1, args.w2, args.h2, args.d, tv=cfg)
        _curve_out(curve, out, "boxes1d", "d", tolmeta)
        return not np.any(curve.flags & 2)
    if args.name == "discs2d":
        n = args.n or int(np.ceil(10 * args.r))
        xs = args.d_over_r if args.d_over_r is not None else parse_range("0:0.25:5")
        curve = experiment_two_discs(n, args.r, args.h, xs, tv=cfg)
        _curve_out(curve, out, "discs2d", "d/r", tolmeta)
        return not np.any(curve.flags & 2)
    geom = BlobGeometry(n=args.n or 128)
    res = experiment_blobs(geom, tv=cfg, with_flow=not args.no_flow)
    ok = True
    meta = dict(experiment="blobs", **vars(geom), **tolmeta)
    for name, r in res.items():
        rec = r.report.as_dict()
        rec.update(t_cut=r.t_cut, err_low=r.err_low, err_high=r.err_high,
                   spectrum_defect=r.spectrum_defect)
        (out / f"blobs_{name}.txt").write_text(format_record(rec))
        write_signal(r.small + r.large, out / f"blobs_{name}_f.pgm")
        if r.low is not None:
            write_signal(r.low, out / f"blobs_{name}_lpf.pgm")
            write_signal(r.high, out / f"blobs_{name}_hpf.pgm")
        if r.spectra:
            write_rows_csv(spectrum_rows(r.spectra["f"]), out / f"blobs_{name}_spectrum.csv")
            write_plot(r.spectra["f"], out / f"blobs_{name}_spectrum.svg", markers=[r.t_cut])
        ok &= r.report.converged
        print(f"{name}: O={r.report.orth_O:.4f} L={r.report.lis_L:.4f}")
    write_manifest(out / "manifest.json", meta)
    return ok


COMMANDS = {"flow": cmd_flow, "transform": cmd_transform, "filter": cmd_filter,
            "measures": cmd_measures, "eigen": cmd_eigen, "experiment": cmd_experiment}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        ok = COMMANDS[args.command](args)
    except UsageError as e:
        print(f"tvsip: error: {e}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as e:
        print(f"tvsip: error: {e}", file=sys.stderr)
        return 1
    if not ok:
        print("tvsip: warning: a solver hit its iteration cap", file=sys.stderr)
        if args.strict:
            return STRICT_FAILURE
    return 0


if __name__ == "__main__":
    sys.exit(main())
