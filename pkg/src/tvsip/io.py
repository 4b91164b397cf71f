"""File formats, persistence and SVG plots.

Formats, chosen by extension:

``.csv``
    1D signal, one value per line, optional ``# h=<spacing>`` header.
``.pgm``
    2D image, P2 (ASCII) or P5 (binary), 8 or 16 bit. Read values are
    rescaled to [0, 1]; writing maps the signal's range onto [0, maxval].
``.f64``
    Raw little-endian float64 with a JSON sidecar (``<name>.json``) holding
    ``shape``, ``spacing`` and ``mean``. This is the lossless format.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .flow import FlowParams, FlowTrajectory
from .grid import GridSpec, ParameterError, Signal
from .spectral import SpectralDecomposition, Spectrum
from .tv import TvConfig


class ParseError(ValueError):
    """Malformed input file, located by ``line`` (text) or ``offset`` (bytes)."""

    def __init__(self, path, message: str, *, line: int | None = None,
                 offset: int | None = None):
        where = f"line {line}" if line is not None else f"byte {offset}"
        super().__init__(f"{path}: {where}: {message}")
        self.line = line
        self.offset = offset


# ---------------------------------------------------------------- signals

def read_csv(path) -> Signal:
    path = Path(path)
    spacing = 1.0
    vals = []
    with open(path, newline="") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("h="):
                    try:
                        spacing = float(body[2:])
                    except ValueError:
                        raise ParseError(path, f"bad spacing header {line!r}", line=lineno) from None
                continue
            try:
                vals.append(float(line.split(",")[0]))
            except ValueError:
                raise ParseError(path, f"not a number: {line!r}", line=lineno) from None
    if len(vals) < 2:
        raise ParseError(path, "need at least two samples", line=0)
    return Signal.from_array(vals, spacing)


def write_csv_signal(sig: Signal, path) -> None:
    if sig.grid.dims != 1:
        raise ParameterError("CSV holds 1D signals only; use .pgm or .f64")
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# h={sig.grid.spacing[0]!r}\n")
        for x in sig.values:
            fh.write(f"{float(x)!r}\n")


def _pgm_tokens(data: bytes, path, count: int, pos: int = 0):
    """Read ``count`` whitespace-separated header tokens, skipping comments."""
    out = []
    n = len(data)
    while len(out) < count:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos < n and data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise ParseError(path, "truncated header", offset=pos)
        out.append((data[start:pos], start))
    return out, pos


def read_pgm(path, spacing: float = 1.0) -> Signal:
    path = Path(path)
    data = path.read_bytes()
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise ParseError(path, f"unknown magic {magic!r}", offset=0)
    toks, pos = _pgm_tokens(data, path, 3, 2)
    try:
        w, h, maxval = (int(t) for t, _ in toks)
    except ValueError:
        bad = next(o for t, o in toks if not t.isdigit())
        raise ParseError(path, "non-integer header field", offset=bad) from None
    if w < 1 or h < 1 or not 0 < maxval < 65536:
        raise ParseError(path, f"bad header {w}x{h} maxval {maxval}", offset=toks[0][1])
    size = w * h
    if magic == b"P5":
        pos += 1  # single whitespace byte after maxval
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        need = size * dtype.itemsize
        if len(data) - pos < need:
            raise ParseError(path, f"expected {need} pixel bytes, found {len(data) - pos}",
                             offset=len(data))
        pix = np.frombuffer(data, dtype=dtype, count=size, offset=pos).astype(float)
    else:
        body = data[pos:]
        words = body.split()
        if len(words) < size:
            raise ParseError(path, f"expected {size} pixels, found {len(words)}", offset=len(data))
        try:
            pix = np.array([int(x) for x in words[:size]], dtype=float)
        except ValueError:
            bad = next(i for i, x in enumerate(words[:size]) if not x.isdigit())
            line = data[:pos].count(b"\n") + body[:body.find(words[bad])].count(b"\n") + 1
            raise ParseError(path, f"bad pixel {words[bad]!r}", line=line) from None
    if np.any(pix > maxval):
        raise ParseError(path, "pixel value above maxval", offset=pos)
    return Signal.from_array(pix.reshape(h, w) / maxval, spacing)


def write_pgm(sig: Signal, path, *, binary: bool = True, bits: int = 8) -> None:
    """Quantize the signal range onto [0, 2**bits - 1]."""
    if sig.grid.dims != 2:
        raise ParameterError("PGM holds 2D images only")
    if bits not in (8, 16):
        raise ParameterError("bits must be 8 or 16")
    maxval = 2 ** bits - 1
    v = sig.values
    lo, hi = float(v.min()), float(v.max())
    scaled = np.zeros_like(v) if hi == lo else (v - lo) / (hi - lo)
    q = np.rint(scaled * maxval).astype(np.int64)
    h, w = v.shape
    header = f"{'P5' if binary else 'P2'}\n{w} {h}\n{maxval}\n".encode()
    with open(path, "wb") as fh:
        fh.write(header)
        if binary:
            fh.write(q.astype(">u2" if bits == 16 else "u1").tobytes())
        else:
            for row in q:
                fh.write((" ".join(str(x) for x in row) + "\n").encode())


def _sidecar(path: Path) -> Path:
    return path.with_suffix(".json")


def write_raw(arr: np.ndarray, path, meta: dict) -> None:
    path = Path(path)
    np.ascontiguousarray(arr, dtype="<f8").tofile(path)
    meta = dict(meta, shape=list(arr.shape), dtype="<f8")
    _sidecar(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def read_raw(path) -> tuple[np.ndarray, dict]:
    path = Path(path)
    side = _sidecar(path)
    try:
        meta = json.loads(side.read_text())
    except FileNotFoundError:
        raise ParseError(side, "missing JSON sidecar", offset=0) from None
    except json.JSONDecodeError as e:
        raise ParseError(side, e.msg, line=e.lineno) from None
    shape = tuple(meta.get("shape", ()))
    data = path.read_bytes()
    need = 8 * int(np.prod(shape)) if shape else 0
    if not shape or len(data) != need:
        raise ParseError(path, f"expected {need} bytes for shape {shape}, found {len(data)}",
                         offset=min(len(data), need))
    return np.frombuffer(data, dtype="<f8").reshape(shape).astype(np.float64), meta


def write_signal(sig: Signal, path, **kw) -> None:
    path = Path(path)
    ext = path.suffix.lower()
    if ext == ".csv":
        write_csv_signal(sig, path)
    elif ext == ".pgm":
        write_pgm(sig, path, **kw)
    elif ext == ".f64":
        write_raw(sig.values, path, {"spacing": list(sig.grid.spacing), "mean": sig.mean()})
    else:
        raise ParameterError(f"unknown signal format {ext!r} (use .csv, .pgm or .f64)")


def read_signal(path, spacing: float | None = None) -> Signal:
    """Read a signal; ``spacing`` overrides the file's own (PGM has none)."""
    path = Path(path)
    ext = path.suffix.lower()
    if ext == ".csv":
        sig = read_csv(path)
        return sig if spacing is None else Signal.from_array(sig.values, spacing)
    if ext == ".pgm":
        return read_pgm(path, 1.0 if spacing is None else spacing)
    if ext == ".f64":
        arr, meta = read_raw(path)
        sp = meta.get("spacing", 1.0) if spacing is None else spacing
        return Signal.from_array(arr, sp)
    raise ParameterError(f"unknown signal format {ext!r} (use .csv, .pgm or .f64)")


# ------------------------------------------------------------ persistence

def save_trajectory(traj: FlowTrajectory, directory) -> Path:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    p = traj.params
    meta = {
        "kind": "trajectory",
        "spacing": list(traj.grid.spacing),
        "mean": traj.mean,
        "dt": p.dt,
        "horizon": p.horizon,
        "stop_eps": p.stop_eps,
        "extra_steps": p.extra_steps,
        "tv": {"variant": p.tv.variant, "prox_tol": p.tv.prox_tol,
               "prox_max_iter": p.tv.prox_max_iter, "solver": p.tv.solver},
        "converged": [bool(x) for x in traj.converged],
        "iterations": [int(x) for x in traj.iterations],
    }
    write_raw(traj.states, d / "states.f64", meta)
    write_raw(traj.subgradients, d / "subgradients.f64", {"kind": "subgradients"})
    return d


def load_trajectory(directory) -> FlowTrajectory:
    d = Path(directory)
    states, meta = read_raw(d / "states.f64")
    subs, _ = read_raw(d / "subgradients.f64")
    tv = TvConfig(**meta["tv"])
    params = FlowParams(dt=meta["dt"], horizon=meta["horizon"], tv=tv,
                        stop_eps=meta["stop_eps"], extra_steps=meta["extra_steps"])
    grid = GridSpec(states.shape[1:], tuple(meta["spacing"]))
    return FlowTrajectory(params, meta["dt"] * np.arange(len(states)), states, subs,
                          meta["mean"], np.array(meta["converged"], dtype=bool),
                          np.array(meta["iterations"], dtype=int), grid)


def save_decomposition(dec: SpectralDecomposition, directory) -> Path:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    write_raw(dec.residual, d / "residual.f64", {"kind": "residual"})
    write_raw(dec.bands, d / "bands.f64", {
        "kind": "bands", "dt": dec.dt, "mean": dec.mean,
        "times": [float(t) for t in dec.times],
        "spacing": list(dec.grid.spacing), "residual": "residual.f64",
    })
    return d


def load_decomposition(directory) -> SpectralDecomposition:
    d = Path(directory)
    bands, meta = read_raw(d / "bands.f64")
    residual, _ = read_raw(d / meta.get("residual", "residual.f64"))
    grid = GridSpec(bands.shape[1:], tuple(meta["spacing"]))
    return SpectralDecomposition(np.array(meta["times"]), bands, residual,
                                 meta["mean"], meta["dt"], grid)


def format_record(record: dict) -> str:
    """Flat ``key = value`` text, one pair per line, keys in given order."""
    lines = []
    for k, v in record.items():
        lines.append(f"{k} = {v:.10g}" if isinstance(v, float) else f"{k} = {v}")
    return "\n".join(lines) + "\n"


def write_rows_csv(rows, path) -> None:
    """Write dict rows as CSV; the header comes from the first row."""
    rows = list(rows)
    if not rows:
        raise ParameterError("no rows to write")
    with open(path, "w", newline="") as fh:
        wr = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        wr.writeheader()
        for r in rows:
            wr.writerow({k: (f"{v:.10g}" if isinstance(v, float) else v) for k, v in r.items()})


def spectrum_rows(spec: Spectrum):
    for t, a, b in zip(spec.times, spec.s1, spec.s2):
        yield {"t": float(t), "S1": float(a), "S2": float(b)}


def write_manifest(path, params: dict) -> None:
    def clean(x):
        if isinstance(x, dict):
            return {str(k): clean(v) for k, v in x.items()}
        if isinstance(x, (list, tuple, np.ndarray)):
            return [clean(v) for v in x]
        if isinstance(x, np.generic):
            return x.item()
        if isinstance(x, Path):
            return str(x)
        return x
    Path(path).write_text(json.dumps(clean(params), indent=2, sort_keys=True) + "\n")


# ------------------------------------------------------------------ plots

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _nice(x: float) -> str:
    return f"{x:.4g}"


def svg_plot(x, series: dict, *, xlabel: str = "", ylabel: str = "", title: str = "",
             markers=(), width: int = 640, height: int = 400) -> str:
    """Standalone SVG line plot of one or more series over a shared x."""
    x = np.asarray(x, dtype=float)
    if x.size == 0 or not series:
        raise ParameterError("cannot plot an empty series")
    ys = {k: np.asarray(v, dtype=float) for k, v in series.items()}
    for k, v in ys.items():
        if v.shape != x.shape:
            raise ParameterError(f"series {k!r} does not match x")
    ml, mr, mt, mb = 64, 20, 36, 48
    pw, ph = width - ml - mr, height - mt - mb
    allv = np.concatenate([v[np.isfinite(v)] for v in ys.values()] or [np.zeros(1)])
    x0, x1 = float(x.min()), float(x.max())
    y0, y1 = (float(allv.min()), float(allv.max())) if allv.size else (0.0, 1.0)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5

    def sx(v):
        return ml + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return mt + (1 - (v - y0) / (y1 - y0)) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
           f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" font-size="14">{title}</text>',
           f'<line x1="{ml}" y1="{mt + ph}" x2="{ml + pw}" y2="{mt + ph}" stroke="black"/>',
           f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + ph}" stroke="black"/>']
    for i in range(5):
        xv = x0 + (x1 - x0) * i / 4
        yv = y0 + (y1 - y0) * i / 4
        out.append(f'<text x="{sx(xv):.1f}" y="{mt + ph + 16}" text-anchor="middle" '
                   f'font-size="10">{_nice(xv)}</text>')
        out.append(f'<text x="{ml - 6}" y="{sy(yv) + 3:.1f}" text-anchor="end" '
                   f'font-size="10">{_nice(yv)}</text>')
    out.append(f'<text x="{ml + pw / 2:.1f}" y="{height - 8}" text-anchor="middle" '
               f'font-size="12">{xlabel}</text>')
    out.append(f'<text x="14" y="{mt + ph / 2:.1f}" text-anchor="middle" font-size="12" '
               f'transform="rotate(-90 14 {mt + ph / 2:.1f})">{ylabel}</text>')
    for m in markers:
        if x0 <= m <= x1:
            out.append(f'<line x1="{sx(m):.1f}" y1="{mt}" x2="{sx(m):.1f}" y2="{mt + ph}" '
                       f'stroke="gray" stroke-dasharray="4 3"/>')
    for i, (name, v) in enumerate(ys.items()):
        col = _COLORS[i % len(_COLORS)]
        ok = np.isfinite(v)
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x[ok], v[ok]))
        if ok.sum() == 1:
            a, b = x[ok][0], v[ok][0]
            out.append(f'<circle cx="{sx(a):.2f}" cy="{sy(b):.2f}" r="3" fill="{col}"/>')
        elif pts:
            out.append(f'<polyline fill="none" stroke="{col}" stroke-width="1.5" points="{pts}"/>')
        out.append(f'<text x="{ml + pw - 4}" y="{mt + 14 + 14 * i}" text-anchor="end" '
                   f'font-size="11" fill="{col}">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_plot(obj, path, *, markers=(), title: str = "") -> None:
    """Plot a :class:`~tvsip.decomp.MeasureCurve` or a :class:`Spectrum` as SVG."""
    if isinstance(obj, Spectrum):
        svg = svg_plot(obj.times, {"S1": obj.s1, "S2": obj.s2}, xlabel="t",
                       ylabel="spectrum", title=title or "spectrum", markers=markers)
    elif hasattr(obj, "o_values"):
        svg = svg_plot(obj.abscissa, {"O": obj.o_values, "L": obj.l_values},
                       xlabel=str(obj.metadata.get("xlabel", "distance")), ylabel="measure",
                       title=title or str(obj.metadata.get("experiment", "")), markers=markers)
    else:
        raise ParameterError(f"cannot plot {type(obj).__name__}")
    Path(path).write_text(svg)

