"""``dhat`` command line.

Inputs are PV sources (any file not starting with ``{``) or precubical
sets in JSON.  Exit codes: 0 success, 1 any error including bad usage,
and for ``analyze`` 2 when a deadlock was found.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from . import __version__
from .freeomega import CellLimitError, OmegaError, glob, realize
from .homology import (
    NERVES,
    THEORIES,
    HomologyError,
    chain_from_augmented,
    chain_from_precubical,
    cubical_homology,
    nerve_homology,
    report_json,
)
from .nerves import NerveError
from .precubical import PrecubicalError, PrecubicalSet, validate
from .pvlang import PVError, analyze as analyze_model, build_model, parse_pv

DEFAULT_MAX_CELLS = 200_000
EXIT_OK, EXIT_ERROR, EXIT_DEADLOCK = 0, 1, 2

ERRORS = (PVError, PrecubicalError, OmegaError, HomologyError, NerveError, OSError, ValueError)


def default_max_cells() -> int:
    raw = os.environ.get("DHAT_MAX_CELLS")
    if raw is None:
        return DEFAULT_MAX_CELLS
    try:
        n = int(raw)
    except ValueError:
        raise click.UsageError(f"DHAT_MAX_CELLS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise click.UsageError("DHAT_MAX_CELLS must be a positive integer")
    return n


class Input:
    """A loaded input file: a PV model or a bare precubical set."""

    def __init__(self, path: str):
        text = Path(path).read_text(encoding="utf-8")
        self.path = path
        self.model = None
        if text.lstrip().startswith("{"):
            try:
                self.complex = PrecubicalSet.from_json(text)
            except (json.JSONDecodeError, KeyError, TypeError) as e:
                raise PrecubicalError(f"bad precubical JSON: {e}") from None
            problems = validate(self.complex)
            if problems:
                raise PrecubicalError(f"invalid precubical set: {problems[0]}")
        else:
            self.program = parse_pv(text)
            self.model = build_model(self.program)
            self.complex = self.model.complex


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def _fail(err: Exception) -> None:
    click.echo(f"error: {err}", err=True)
    sys.exit(EXIT_ERROR)


def _table(inp: Input, max_dim: int, max_cells: int | None, allow_truncation: bool, globs: int):
    cap = max_cells if max_cells is not None else default_max_cells()
    _, table = realize(inp.complex, max_dim, cap, allow_truncation)
    for _ in range(globs):
        table = glob(table)
    return table


def _degrees(raw: str | None):
    if raw is None:
        return None
    try:
        return sorted({int(x) for x in raw.split(",") if x.strip()})
    except ValueError:
        raise click.BadParameter(f"expected comma separated integers, got {raw!r}") from None


limits = [
    click.option("--max-dim", type=click.IntRange(min=1), default=2, show_default=True, help="Highest cell dimension generated."),
    click.option("--max-cells", type=click.IntRange(min=1), default=None, help="Cell cap (default: $DHAT_MAX_CELLS or 200000)."),
    click.option("--allow-truncation", is_flag=True, help="Return a truncated table instead of failing at the cap."),
    click.option("--glob", "globs", type=click.IntRange(min=0), default=0, help="Apply the globe construction this many times."),
]


def with_limits(f):
    for opt in reversed(limits):
        f = opt(f)
    return f


class Group(click.Group):
    """Usage errors exit with 1 so that 2 only ever means a deadlock."""

    def make_context(self, *args, **kwargs):
        try:
            return super().make_context(*args, **kwargs)
        except click.UsageError as e:
            e.exit_code = EXIT_ERROR
            raise

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = EXIT_ERROR
            raise


@click.group(cls=Group)
@click.version_option(__version__, prog_name="dhat")
def main():
    """Directed homology and deadlock analysis of PV programs and precubical sets."""


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="json", show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
def analyze(file, fmt, output):
    """Deadlocks, unreachable and unsafe states of a PV program."""
    try:
        inp = Input(file)
        if inp.model is None:
            raise PVError("analyze needs a PV program")
        report = analyze_model(inp.model)
    except ERRORS as e:
        _fail(e)
    if fmt == "json":
        text = report.to_json(__version__)
    else:
        lines = [f"dhat {__version__}"]
        for key in ("deadlocks", "unreachable", "unsafe"):
            pts = getattr(report, key)
            lines.append(f"{key}: {len(pts)}")
            lines += ["  (" + ",".join(map(str, p)) + ")" for p in pts]
        text = "\n".join(lines) + "\n"
    _emit(text, output)
    sys.exit(EXIT_DEADLOCK if report.deadlocks else EXIT_OK)


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--theory", type=click.Choice(THEORIES), default="cube", show_default=True)
@click.option("--degrees", default=None, help="Comma separated degrees, e.g. 0,1.")
@click.option("--augmentation", type=click.Choice(["full", "realized"]), default="full", show_default=True)
@with_limits
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
def homology(file, theory, degrees, augmentation, max_dim, max_cells, allow_truncation, globs, output):
    """Homology groups under one theory."""
    degs = _degrees(degrees)
    try:
        inp = Input(file)
        if theory == "cube":
            if globs:
                raise HomologyError("--glob applies to the nerve theories only")
            report = cubical_homology(inp.complex, degs)
        else:
            table = _table(inp, max_dim, max_cells, allow_truncation, globs)
            report = nerve_homology(table, theory, (0, 1) if degs is None else degs, augmentation=augmentation)
    except (CellLimitError, *ERRORS) as e:
        _fail(e)
    _emit(report_json(report, __version__), output)


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@with_limits
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
def cells(file, max_dim, max_cells, allow_truncation, globs, fmt, output):
    """List the cells of the free ω-category on the input."""
    try:
        table = _table(Input(file), max_dim, max_cells, allow_truncation, globs)
    except (CellLimitError, *ERRORS) as e:
        _fail(e)
    if fmt == "json":
        text = json.dumps({"version": __version__, **table.to_dict()}, indent=2, ensure_ascii=False) + "\n"
    else:
        counts = table.counts()
        lines = [f"dhat {__version__}", "counts: " + " ".join(map(str, counts))]
        if table.truncated:
            lines.append("truncated: true")
        for c in table.sorted_cells():
            bnd = "; ".join(
                f"s{p}={table.label(c.s(p))} t{p}={table.label(c.t(p))}" for p in range(c.dim)
            )
            lines.append(f"{c.dim} {table.label(c.support)}" + (f"  {bnd}" if bnd else ""))
        text = "\n".join(lines) + "\n"
    _emit(text, output)


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["json", "sparse"]), default="json", show_default=True)
@click.option("--theory", type=click.Choice(THEORIES), default="cube", show_default=True,
              help="Chain complex exported in sparse format.")
@click.option("--augmentation", type=click.Choice(["full", "realized"]), default="full", show_default=True)
@with_limits
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
def export(file, fmt, theory, augmentation, max_dim, max_cells, allow_truncation, globs, output):
    """Export the cell table (json) or a boundary matrix listing (sparse)."""
    try:
        inp = Input(file)
        if fmt == "json":
            table = _table(inp, max_dim, max_cells, allow_truncation, globs)
            text = json.dumps({"version": __version__, **table.to_dict()}, indent=2, ensure_ascii=False) + "\n"
        else:
            if theory == "cube":
                C = chain_from_precubical(inp.complex)
            else:
                table = _table(inp, max_dim, max_cells, allow_truncation, globs)
                C = chain_from_augmented(NERVES[theory](table, N=1, augmentation=augmentation))
            head = [f"# dhat {__version__} theory {theory}", "# degree row col value"]
            head += [f"# basis {n} {C.size(n)}" for n in C.degrees]
            text = "\n".join(head) + "\n" + C.to_sparse()
    except (CellLimitError, *ERRORS) as e:
        _fail(e)
    _emit(text, output)


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", "--svg", type=click.Path(dir_okay=False), default=None)
@click.option("--scale", type=click.IntRange(min=10), default=60, show_default=True)
def render(file, output, scale):
    """SVG diagram of a two-process program."""
    from .render import render_svg

    try:
        inp = Input(file)
        if inp.model is None:
            raise PVError("render needs a PV program")
        svg = render_svg(inp.model, scale=scale)
    except ERRORS as e:
        _fail(e)
    _emit(svg, output)


if __name__ == "__main__":
    main()
