"""Command-line entry point: ``fareywalk <group> <command> [options]``.

Exit codes: 0 success, 2 usage or validation error, 3 resource cap exceeded.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

import click

from . import __version__
from .errors import ResourceCapError, ValidationError
from .exact import Arc, ExtRational
from .farey import FAREY_LEVEL_CAP, farey_pair_level, farey_sequence
from .group import SPHERE_CAP, sphere, tile
from .minkowski import Dyadic, mbar, measure_arc, question_mark, question_mark_inverse
from .orbit import convolution_cdf, stationarity_check, word_limit_table
from .walk import (
    REFERENCES,
    WALK_CAP,
    EnsembleStats,
    WalkConfig,
    WalkMeasure,
    angular_ecdf,
    clt_check,
    estimate_lyapunov,
    ks_distance,
    radial_profile,
    run_ensemble,
)

OUTPUT_DIR_ENV = "FAREYWALK_OUTPUT_DIR"


# ---------------------------------------------------------------------------
# manifests and output files


@dataclass
class RunManifest:
    subcommand: str
    flags: dict
    seed: Optional[int] = None
    version: str = __version__
    duration: float = 0.0
    started: float = field(default_factory=time.perf_counter)

    def identity(self) -> dict:
        return {"subcommand": self.subcommand, "flags": self.flags, "seed": self.seed, "version": self.version}

    @property
    def hash(self) -> str:
        blob = json.dumps(self.identity(), sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()

    def to_dict(self) -> dict:
        d = self.identity()
        d["hash"] = self.hash
        d["duration_seconds"] = self.duration
        return d


def _file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _manifest(ctx: click.Context, seed=None, drop=()) -> RunManifest:
    """Flags as given, plus a content digest of every existing input file."""
    flags = {}
    for k, v in sorted(ctx.params.items()):
        # where a file is written never changes what is written
        if k in drop or k == "out":
            continue
        flags[k] = str(v) if isinstance(v, Path) else v
        if k.endswith("_file") or k == "measure_spec":
            if v is not None and Path(str(v)).is_file():
                flags[k + "_sha256"] = _file_digest(v)
    return RunManifest(ctx.command_path.split(" ", 1)[-1], flags, seed)


def resolve_out(out: Optional[str]) -> Optional[Path]:
    if out is None:
        return None
    p = Path(out)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def render_table(columns, rows, fmt: str, manifest: RunManifest) -> str:
    """CSV starts with a ``# manifest`` comment line; JSON carries the hash as a key."""
    if fmt == "json":
        payload = {"manifest": manifest.hash, "columns": list(columns), "rows": [[str(v) for v in r] for r in rows]}
        return json.dumps(payload, indent=1) + "\n"
    buf = io.StringIO()
    buf.write(f"# manifest sha256:{manifest.hash}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([str(v) for v in r])
    return buf.getvalue()


def parse_table(text: str) -> tuple[str, list, list]:
    """Inverse of ``render_table`` for either format: ``(hash, columns, rows)``."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        payload = json.loads(stripped)
        return payload["manifest"], payload["columns"], payload["rows"]
    lines = text.splitlines()
    head = lines[0]
    if not head.startswith("# manifest sha256:"):
        raise ValueError("missing manifest comment line")
    reader = csv.reader(lines[1:])
    columns = next(reader)
    return head.split(":", 1)[1], columns, [list(r) for r in reader]


def write_output(text: str, out: Optional[Path], manifest: RunManifest):
    manifest.duration = time.perf_counter() - manifest.started
    if out is None:
        click.echo(text, nl=False)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    side = out.with_name(out.name + ".manifest.json")
    side.write_text(json.dumps(manifest.to_dict(), indent=1, sort_keys=True, default=str) + "\n")


def _ext(value: str) -> ExtRational:
    try:
        return ExtRational.parse(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise click.BadParameter(str(exc)) from exc


def _arc(value: str) -> Arc:
    try:
        return Arc.parse(value)
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from exc


def _range(value: Optional[str]):
    if value is None:
        return None
    try:
        lo, hi = value.split("..", 1)
        return float(lo), float(hi)
    except ValueError as exc:
        raise click.BadParameter(f"expected lo..hi, got {value!r}") from exc


def _float_suffix(x, show: bool) -> str:
    return f"\t{float(x):.17g}" if show else ""


# let arguments such as -1/3 through instead of parsing them as options
_SIGNED_ARGS = {"ignore_unknown_options": True}

format_option = click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
out_option = click.option("--out", type=str, default=None, help=f"Output file (relative paths resolve under ${OUTPUT_DIR_ENV}).")


@click.group()
@click.version_option(__version__)
def cli():
    """Exact Farey-group orbit statistics and Monte Carlo matrix walks."""


# ---------------------------------------------------------------------------
# farey


@cli.group()
def farey():
    """Mediant-interleaved Farey sequences."""


@farey.command("seq")
@click.option("--level", type=int, required=True)
@click.option("--cap", type=int, default=FAREY_LEVEL_CAP, show_default=True)
def farey_seq(level, cap):
    for x in farey_sequence(level, cap=cap):
        click.echo(str(x))


@farey.command("pair-level", context_settings=_SIGNED_ARGS)
@click.argument("p", callback=lambda c, p, v: _ext(v))
@click.argument("q", callback=lambda c, p, v: _ext(v))
def farey_pair_level_cmd(p, q):
    try:
        level = farey_pair_level(p, q)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    click.echo("none" if level is None else str(level))


# ---------------------------------------------------------------------------
# mink


@cli.group()
def mink():
    """Question-mark function and the extended Minkowski measure."""


@mink.command("eval", context_settings=_SIGNED_ARGS)
@click.argument("x", callback=lambda c, p, v: _ext(v))
@click.option("--float", "show_float", is_flag=True)
def mink_eval(x, show_float):
    value = question_mark(x)
    click.echo(f"{value}{_float_suffix(value, show_float)}")


@mink.command("mbar", context_settings=_SIGNED_ARGS)
@click.argument("x", callback=lambda c, p, v: _ext(v))
@click.option("--float", "show_float", is_flag=True)
def mink_mbar(x, show_float):
    value = mbar(x)
    click.echo(f"{value}{_float_suffix(value, show_float)}")


@mink.command("measure", context_settings=_SIGNED_ARGS)
@click.argument("arc", callback=lambda c, p, v: _arc(v))
@click.option("--float", "show_float", is_flag=True)
def mink_measure(arc, show_float):
    value = measure_arc(arc)
    click.echo(f"{value}{_float_suffix(value, show_float)}")


@mink.command("inverse", context_settings=_SIGNED_ARGS)
@click.argument("d")
def mink_inverse(d):
    try:
        value = Dyadic.from_fraction(Fraction(d))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(str(exc)) from exc
    click.echo(str(question_mark_inverse(value)))


# ---------------------------------------------------------------------------
# group


@cli.group()
def group():
    """Word-metric spheres of the Farey group."""


@group.command("sphere")
@click.option("--n", "n", type=int, required=True)
@click.option("--count-only", is_flag=True)
@click.option("--cap", type=int, default=SPHERE_CAP, show_default=True)
@format_option
@out_option
@click.pass_context
def group_sphere(ctx, n, count_only, cap, fmt, out):
    if count_only:
        click.echo(str(sum(1 for _ in sphere(n, cap=cap))))
        return
    manifest = _manifest(ctx)
    rows = []
    for g in sphere(n, cap=cap):
        m = g.matrix
        p, r, q = tile(g)
        rows.append((g.word or "e", m.a, m.b, m.c, m.d, p, r, q))
    cols = ["word", "a", "b", "c", "d", "tile_p", "tile_r", "tile_q"]
    write_output(render_table(cols, rows, fmt, manifest), resolve_out(out), manifest)
    if out:
        click.echo(f"wrote {len(rows)} elements of word length {n}")


# ---------------------------------------------------------------------------
# orbit


@cli.group()
def orbit():
    """Exact orbit counts, stationarity and convolution powers."""


@orbit.command("limit")
@click.option("--arc", "arc", required=True, callback=lambda c, p, v: _arc(v))
@click.option("--base", default="0", callback=lambda c, p, v: _ext(v), show_default=True)
@click.option("--nmax", type=int, required=True)
@click.option("--cap", type=int, default=None)
@format_option
@out_option
@click.pass_context
def orbit_limit(ctx, arc, base, nmax, cap, fmt, out):
    manifest = _manifest(ctx)
    table = word_limit_table(arc, base, nmax, cap=cap)
    rows = [(r.n, r.count, r.ratio.numerator, r.ratio.denominator, table.target) for r in table.rows]
    cols = ["n", "count", "ratio_num", "ratio_den", "target"]
    write_output(render_table(cols, rows, fmt, manifest), resolve_out(out), manifest)
    if out:
        click.echo(f"limit measure of {arc}: {table.target}")


@orbit.command("stationarity")
@click.option("--arc", "arc", required=True, callback=lambda c, p, v: _arc(v))
def orbit_stationarity(arc):
    lhs, rhs = stationarity_check(arc)
    click.echo(f"lhs {lhs}")
    click.echo(f"rhs {rhs}")
    click.echo("stationary" if lhs == rhs else "NOT stationary")


@orbit.command("convolution")
@click.option("--n", "n", type=int, required=True)
@click.option("--x0", default="0", callback=lambda c, p, v: _ext(v), show_default=True)
@click.option("--points", "points_file", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--cap", type=int, default=None)
@format_option
@out_option
@click.pass_context
def orbit_convolution(ctx, n, x0, points_file, cap, fmt, out):
    manifest = _manifest(ctx)
    lines = [ln.strip() for ln in Path(points_file).read_text().splitlines()]
    try:
        points = [ExtRational.parse(ln) for ln in lines if ln and not ln.startswith("#")]
    except ValueError as exc:
        raise ValidationError(f"bad point in {points_file}: {exc}") from exc
    cdf = convolution_cdf(n, x0, points, cap=cap)
    rows = [(t, F, mbar(t)) for t, F in zip(points, cdf)]
    write_output(render_table(["t", "cdf", "mbar"], rows, fmt, manifest), resolve_out(out), manifest)


# ---------------------------------------------------------------------------
# walk


@cli.group()
def walk():
    """Monte Carlo random matrix products."""


def _load_measure(spec: str) -> WalkMeasure:
    if spec == "farey":
        return WalkMeasure.farey()
    path = Path(spec)
    if not path.exists():
        raise ValidationError(f"measure file {spec} not found")
    return WalkMeasure.from_json(path.read_text())


def _load_stats(path: str) -> EnsembleStats:
    return EnsembleStats.from_csv(Path(path).read_text())


@walk.command("run")
@click.option("--measure", "measure_spec", default="farey", show_default=True, help="JSON measure file, or 'farey'.")
@click.option("--steps", type=int, required=True)
@click.option("--walks", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--x0", default="1,0", show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--walk-cap", type=int, default=WALK_CAP, show_default=True)
@out_option
@click.pass_context
def walk_run(ctx, measure_spec, steps, walks, seed, x0, workers, walk_cap, out):
    # workers only schedules chunks and never changes the output
    manifest = _manifest(ctx, seed, drop=("workers",))
    try:
        x0v = tuple(float(v) for v in x0.split(","))
        if len(x0v) != 2:
            raise ValueError
    except ValueError:
        raise ValidationError(f"--x0 must be two comma-separated numbers, got {x0!r}")
    measure = _load_measure(measure_spec)
    config = WalkConfig(steps, walks, seed, x0v, walk_cap=walk_cap)
    stats = run_ensemble(measure, config, workers=workers)
    text = stats.to_csv(header=f"# manifest sha256:{manifest.hash}")
    write_output(text, resolve_out(out), manifest)
    if out:
        lam, s = estimate_lyapunov(stats)
        click.echo(f"{walks} walks x {steps} steps: lambda_hat {lam:.6f}  s_hat {s:.6f}")


@walk.command("lyapunov")
@click.option("--stats", "stats_file", required=True, type=click.Path(exists=True, dir_okay=False))
def walk_lyapunov(stats_file):
    lam, s = estimate_lyapunov(_load_stats(stats_file))
    click.echo(f"lambda_hat {lam!r}")
    click.echo(f"s_hat {s!r}")


@walk.command("radial")
@click.option("--stats", "stats_file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--alpha", type=float, default=None, help="Rescaling exponent; defaults to lambda_hat.")
@click.option("--lambda", "lam_override", type=float, default=None, help="Override lambda_hat.")
@click.option("--lo", type=float, default=-1.5, show_default=True)
@click.option("--hi", type=float, default=1.5, show_default=True)
@click.option("--bins", type=int, default=3, show_default=True)
@format_option
@out_option
@click.pass_context
def walk_radial(ctx, stats_file, alpha, lam_override, lo, hi, bins, fmt, out):
    manifest = _manifest(ctx)
    stats = _load_stats(stats_file)
    lam, s = estimate_lyapunov(stats)
    if lam_override is not None:
        lam = lam_override
    a = lam if alpha is None else alpha
    prof = radial_profile(stats, a, (lo, hi, bins))
    rows = [
        (repr(float(e0)), repr(float(e1)), int(k), repr(float(m)))
        for e0, e1, k, m in zip(prof.edges[:-1], prof.edges[1:], prof.counts, prof.mass)
    ]
    write_output(render_table(["bin_lo", "bin_hi", "count", "mass"], rows, fmt, manifest), resolve_out(out), manifest)
    click.echo(f"# alpha {a!r} slope {prof.slope!r} predicted {(lam - a) / s ** 2!r}", err=out is None)


@walk.command("angular")
@click.option("--stats", "stats_file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--window", default=None, help="Raw-radius window lo..hi.")
@click.option("--support", default=None, help="Direction range lo..hi (default 0..1 for --reference mink).")
@click.option("--reference", type=click.Choice(sorted(REFERENCES)), default="mink", show_default=True)
def walk_angular(stats_file, window, support, reference):
    stats = _load_stats(stats_file)
    supp = _range(support)
    if supp is None and reference == "mink":
        supp = (0.0, 1.0)
    ecdf = angular_ecdf(stats, window=_range(window), support=supp)
    click.echo(f"samples {len(ecdf)}")
    click.echo(f"ks {ks_distance(ecdf, REFERENCES[reference])!r}")


@walk.command("clt")
@click.option("--stats", "stats_file", required=True, type=click.Path(exists=True, dir_okay=False))
def walk_clt(stats_file):
    report = clt_check(_load_stats(stats_file))
    if report.degenerate:
        click.echo(report.message)
        return
    click.echo(f"ks {report.ks!r}")
    for level, emp, ref in report.deciles:
        click.echo(f"q{level:.1f} empirical {emp:+.4f} normal {ref:+.4f} error {emp - ref:+.4f}")


def main(argv=None) -> int:
    """Run the CLI and return its exit code instead of exiting."""
    try:
        rv = cli.main(args=argv, prog_name="fareywalk", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        exc.show()
        return 2
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.Abort:
        return 1
    except ResourceCapError as exc:
        click.echo(f"error: {exc}", err=True)
        return 3
    except (ValidationError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return rv if isinstance(rv, int) else 0


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
