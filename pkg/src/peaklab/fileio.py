"""File formats: trace CSV, experiment reports, P5 PGM heat maps.

All text outputs are ASCII with LF line endings.  Lines starting with
'#' are configuration/provenance comments: writers can embed the run
configuration there and every reader skips them, so embedding never
breaks a format.  Identical configuration (including the seed) always
produces byte-identical files.

Trace CSV: header ``k,vertex,boundary_size,connected`` then one row per
step, ``connected`` as 0/1.  An early-stopped trace carries the comment
``# stopped_early = 1`` so that read(write(t)) == t.

Experiment report: '#' provenance lines, then ``key = value`` parameter
lines (sorted), then ``[rows]`` with a CSV block, then ``[summary]``
with sorted ``key = value`` lines.  Floats are rendered with repr, which
round-trips exactly.  Wall-clock runtime is deliberately not serialized.

PGM: binary ``P5``, maxval 255, one pixel per lattice vertex, pixel =
floor(255 * (rank - 1) / (N - 1)) where rank is the label (labelings) or
the attachment index + 1 (traces); vertices missing from a partial trace
render as 0.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional, Union

from . import __version__
from .experiments import ExperimentReport
from .graphs import Graph
from .labelings import ClusterTrace, Labeling


def format_config(config: dict) -> list[str]:
    """Render a flat config mapping as sorted "key = value" lines."""
    return [f"{key} = {_fmt(config[key])}" for key in sorted(config)]


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return str(value)


def standard_header(command: str, config: dict) -> list[str]:
    """Comment lines embedding the artifact version and run config."""
    lines = [f"peaklab = {__version__}", f"command = {command}"]
    lines.extend(format_config(config))
    return lines


def read_config_comments(path) -> dict:
    """Recover the "# key = value" configuration comments of a text file."""
    out: dict = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line.startswith("#"):
                break
            key, sep, value = line[1:].strip().partition(" = ")
            if sep:
                out[key.strip()] = value.strip()
    return out


# ---------------------------------------------------------------------------
# trace CSV


def write_trace_csv(trace: ClusterTrace, path, header_lines: Iterable[str] = ()) -> None:
    try:
        with open(path, "w", newline="\n") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            if trace.stopped_early:
                fh.write("# stopped_early = 1\n")
            fh.write("k,vertex,boundary_size,connected\n")
            for k, v in enumerate(trace.addition_order):
                fh.write(
                    f"{k},{v},{trace.boundary_size[k]},"
                    f"{1 if trace.connected_flags[k] else 0}\n"
                )
    except OSError as exc:
        raise OSError(f"cannot write trace to {path}: {exc}") from exc


def read_trace_csv(path) -> ClusterTrace:
    order: list[int] = []
    sizes: list[int] = []
    conn: list[bool] = []
    stopped_early = False
    try:
        with open(path) as fh:
            header_seen = False
            for raw in fh:
                line = raw.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    if "stopped_early" in line and line.rstrip().endswith("1"):
                        stopped_early = True
                    continue
                if not header_seen:
                    if line != "k,vertex,boundary_size,connected":
                        raise ValueError(f"{path}: unexpected trace header {line!r}")
                    header_seen = True
                    continue
                _k, v, b, c = line.split(",")
                order.append(int(v))
                sizes.append(int(b))
                conn.append(c == "1")
    except OSError as exc:
        raise OSError(f"cannot read trace from {path}: {exc}") from exc
    return ClusterTrace(tuple(order), tuple(sizes), tuple(conn), stopped_early)


# ---------------------------------------------------------------------------
# experiment reports


def write_report(report: ExperimentReport, path, extra_header: Iterable[str] = ()) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# peaklab = {__version__}\n")
        for line in extra_header:
            fh.write(f"# {line}\n")
        fh.write(f"experiment = {report.name}\n")
        merged = dict(report.parameters)
        merged.update(report.seed_provenance)
        for line in format_config(merged):
            fh.write(line + "\n")
        fh.write("[rows]\n")
        fh.write(",".join(report.columns) + "\n")
        for row in report.rows:
            fh.write(",".join(str(x) for x in row) + "\n")
        fh.write("[summary]\n")
        for line in format_config(report.summary):
            fh.write(line + "\n")


def read_report(path) -> dict:
    """Parse a report file into its textual blocks (values stay strings)."""
    params: dict = {}
    summary: dict = {}
    columns: Optional[tuple] = None
    rows: list[tuple] = []
    section = "params"
    with open(path) as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            if line == "[rows]":
                section = "rows"
                continue
            if line == "[summary]":
                section = "summary"
                continue
            if section in ("params", "summary"):
                key, _, value = line.partition(" = ")
                if not _:
                    key, _, value = line.partition("=")
                target = params if section == "params" else summary
                target[key.strip()] = value.strip()
            else:
                if columns is None:
                    columns = tuple(line.split(","))
                else:
                    rows.append(tuple(line.split(",")))
    return {"parameters": params, "columns": columns, "rows": rows, "summary": summary}


# ---------------------------------------------------------------------------
# PGM rendering


def render_pgm(
    source: Union[Labeling, ClusterTrace],
    g: Graph,
    mode: str = "order-heat",
    header_lines: Iterable[str] = (),
) -> bytes:
    """Grayscale rank heat map of a labeling or trace on a 2-d lattice."""
    if mode != "order-heat":
        raise ValueError(f"unknown render mode {mode!r}")
    if g.coords is None:
        raise ValueError("rendering requires a graph with lattice coordinates")
    if g.family == "grid":
        width, height = g.meta["n"], g.meta["m"]

        def pixel_index(v: int) -> int:
            j, k = g.coords[v]
            return (k - 1) * width + (j - 1)

    elif g.family == "torus" and g.meta["dim"] == 2:
        side = g.meta["side"]
        width = height = side

        def pixel_index(v: int) -> int:
            c0, c1 = g.coords[v]
            return c0 * width + c1

    else:
        raise ValueError("rendering requires a 2-d grid or torus")

    n = g.n_vertices
    ranks = [0] * n
    if isinstance(source, Labeling):
        if source.n != n:
            raise ValueError("labeling size does not match the graph")
        for v in range(n):
            ranks[v] = source.labels[v]
    else:
        for i, v in enumerate(source.addition_order):
            ranks[v] = i + 1

    data = bytearray(width * height)
    for v in range(n):
        rank = ranks[v]
        value = 0 if rank <= 0 or n == 1 else (255 * (rank - 1)) // (n - 1)
        data[pixel_index(v)] = value
    header = bytearray(b"P5\n")
    for line in header_lines:
        header += f"# {line}\n".encode("ascii")
    header += f"{width} {height}\n255\n".encode("ascii")
    return bytes(header) + bytes(data)


def write_pgm(source, g: Graph, path, header_lines: Iterable[str] = ()) -> None:
    payload = render_pgm(source, g, header_lines=header_lines)
    with open(path, "wb") as fh:
        fh.write(payload)
