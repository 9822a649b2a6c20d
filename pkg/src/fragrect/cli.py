"""Command-line surface.

Subcommands: simulate (tree snapshots and fragmentation frames), render
(frames to SVG), rates (path functionals), kappa-map (straight-line
growth-rate map), verify (statistical acceptance suites), optimize
(grid-path search).  Every command is deterministic given its seed and
configuration; reruns produce byte-identical files.

Options can come from a YAML config file (one block per command) with
command-line flags taking precedence.  Exit codes: 0 success, 2 config
error, 3 resource cap exceeded, 4 infeasible problem, 5 verification
failure.
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import click
import numpy as np
import yaml

from . import simulator
from . import functionals as F
from .errors import ConfigError, DomainError, InfeasibleError, ResourceCapError
from .kernels import IMPLEMENTATION
from .optimizer import OptProblem, optimize
from .paths import PLGrid, path_from_csv, path_to_csv
from .verify import ALL_SUITES, CLI_SUITES, run_suite

EXIT_CONFIG = 2
EXIT_RESOURCE = 3
EXIT_INFEASIBLE = 4
EXIT_VERIFY = 5


def _load_config(config_path, section: str) -> dict:
    if config_path is None:
        return {}
    try:
        with open(config_path) as fh:
            data = yaml.safe_load(fh) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {config_path}: {exc}")
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    block = data.get(section, {})
    if not isinstance(block, dict):
        raise ConfigError(f"config section {section!r} must be a mapping")
    return block


def _merge(config: dict, **flags):
    """Flags override config; config fills in unset flags."""
    out = dict(config)
    for key, value in flags.items():
        if value is not None:
            out[key] = value
    return out


@click.group()
@click.version_option(message="%(prog)s %(version)s")
def main():
    """Shape-dependent rectangle fragmentation toolkit."""


@main.command()
@click.option("--config", type=click.Path(exists=True), default=None, help="YAML config file.")
@click.option("--seed", type=int, default=None)
@click.option("--t", "t_horizon", type=float, default=None, help="Time horizon.")
@click.option("--generations", type=int, default=None, help="Generation horizon.")
@click.option("--cap", type=int, default=None, help="Materialized-vertex cap.")
@click.option("--out", type=click.Path(), default=None, help="Tree snapshot CSV path.")
@click.option("--frames", type=click.Path(), default=None, help="Fragmentation frames CSV path.")
@click.option(
    "--frame-times", default=None, help="Comma-separated times for frame export."
)
def simulate(config, seed, t_horizon, generations, cap, out, frames, frame_times):
    """Expand a marked tree and export its snapshot (and optional frames)."""
    try:
        opts = _merge(
            _load_config(config, "simulate"),
            seed=seed,
            t=t_horizon,
            generations=generations,
            cap=cap,
            out=out,
            frames=frames,
            frame_times=frame_times,
        )
        opts.setdefault("seed", 1)
        opts.setdefault("cap", simulator.DEFAULT_CAP)
        if (opts.get("t") is None) == (opts.get("generations") is None):
            raise ConfigError("specify exactly one of --t and --generations")
        if opts.get("out") is None:
            raise ConfigError("--out is required")
        tree = simulator.expand_tree(
            int(opts["seed"]),
            t=opts.get("t"),
            generations=opts.get("generations"),
            cap=int(opts["cap"]),
        )
    except (ConfigError, DomainError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except ResourceCapError as exc:
        click.echo(
            f"error: {exc} ({exc.n_vertices} vertices materialized, t={exc.t_reached:.4f})",
            err=True,
        )
        sys.exit(EXIT_RESOURCE)

    with open(opts["out"], "w") as fh:
        fh.write("vertex_id,B,H,X,Y,T_birth,T_death\n")
        for row in simulator.tree_snapshot_rows(tree):
            fh.write(",".join(repr(v) if isinstance(v, float) else str(v) for v in row) + "\n")
    click.echo(f"wrote {len(tree)} vertices to {opts['out']}")

    if opts.get("frames"):
        times_raw = opts.get("frame_times")
        if times_raw is None:
            times = [tree.t_horizon if tree.t_horizon is not None else 0.0]
        else:
            times = [float(x) for x in str(times_raw).split(",")]
        with open(opts["frames"], "w") as fh:
            fh.write("frame,vertex_id,x0,y0,base,height\n")
            for k, ft in enumerate(times):
                for row in simulator.fragmentation_frame(tree, ft):
                    cells = ",".join(repr(v) if isinstance(v, float) else str(v) for v in row)
                    fh.write(f"{k},{cells}\n")
        click.echo(f"wrote {len(times)} frames to {opts['frames']}")


def _shape_color(base: float, height: float, threshold: float) -> str:
    if abs(math.log(base / height)) <= threshold:
        return "#f2d338"  # near-square: yellow
    if height > base:
        return "#c43b3b"  # tall: red
    return "#3ba85a"  # fat: green


@main.command()
@click.option("--frames", "frames_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_pattern", type=click.Path(), required=True,
              help="Output SVG path; use {frame} for multi-frame input.")
@click.option("--threshold", type=float, default=0.1, show_default=True,
              help="Near-square log-ratio threshold.")
@click.option("--size", type=int, default=640, show_default=True, help="SVG pixel size.")
def render(frames_path, out_pattern, threshold, size):
    """Render fragmentation frames as SVG subdivisions of the unit square."""
    frames = {}
    try:
        with open(frames_path) as fh:
            header = fh.readline().strip()
            if header != "frame,vertex_id,x0,y0,base,height":
                raise ConfigError(f"unexpected frames header: {header!r}")
            for lineno, line in enumerate(fh, start=2):
                line = line.strip()
                if not line:
                    continue
                parts = line.split(",")
                if len(parts) != 6:
                    raise ConfigError(f"malformed frame row at line {lineno}")
                frame = int(parts[0])
                frames.setdefault(frame, []).append(
                    (parts[1], float(parts[2]), float(parts[3]), float(parts[4]), float(parts[5]))
                )
    except (ConfigError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)

    for frame, rects in sorted(frames.items()):
        if len(frames) > 1:
            if "{frame}" not in out_pattern:
                stem = Path(out_pattern)
                out = str(stem.with_name(f"{stem.stem}_{frame:03d}{stem.suffix}"))
            else:
                out = out_pattern.format(frame=frame)
        else:
            out = out_pattern.format(frame=frame) if "{frame}" in out_pattern else out_pattern
        lines = [
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{size}" height="{size}" viewBox="0 0 1 1">'
        ]
        for vid, x0, y0, b, h in rects:
            color = _shape_color(b, h, threshold)
            lines.append(
                f'<rect x="{x0!r}" y="{1.0 - y0 - h!r}" width="{b!r}" height="{h!r}" '
                f'fill="{color}" stroke="#222222" stroke-width="0.002"/>'
            )
        lines.append("</svg>")
        with open(out, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        click.echo(f"frame {frame}: {len(rects)} rectangles -> {out}")


@main.command()
@click.option("--path-csv", type=click.Path(exists=True), required=True,
              help="Input path CSV (component,time,value,is_jump).")
@click.option("--a", type=float, default=0.0, show_default=True)
@click.option("--b", type=float, default=1.0, show_default=True)
@click.option("--out-profile", type=click.Path(), default=None,
              help="Cumulative profile CSV (s, Ktilde).")
@click.option("--out-summary", type=click.Path(), default=None,
              help="Summary CSV (I, J, K, bottleneck, classification).")
def rates(path_csv, a, b, out_profile, out_summary):
    """Evaluate the rate functionals of a stored path."""
    try:
        with open(path_csv) as fh:
            path = path_from_csv(fh)
        report = F.rate_report(path, a, b)
    except DomainError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    if out_profile:
        with open(out_profile, "w") as fh:
            fh.write("s,Ktilde\n")
            for s, v in zip(report.profile_s, report.profile_v):
                fh.write(f"{float(s)!r},{float(v)!r}\n")
    if out_summary:
        with open(out_summary, "w") as fh:
            fh.write("I,J,K,bottleneck,classification\n")
            bn = "" if report.bottleneck is None else repr(float(report.bottleneck))
            fh.write(
                f"{report.i_value!r},{report.j_value!r},{report.k_value!r},{bn},"
                f"{report.classification}\n"
            )
    click.echo(
        f"I={report.i_value:.9g} J={report.j_value:.9g} K={report.k_value:.9g} "
        f"class={report.classification}"
        + (f" bottleneck={report.bottleneck:.6g}" if report.bottleneck is not None else "")
    )


@main.command("kappa-map")
@click.option("--lam-max", type=float, default=10.0, show_default=True)
@click.option("--mu-max", type=float, default=10.0, show_default=True)
@click.option("--steps", type=int, default=100, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def kappa_map(lam_max, mu_max, steps, out):
    """Export the straight-line growth rate over a slope grid."""
    inside = 0
    rows = []
    diag = []
    for i in range(1, steps + 1):
        lam = lam_max * i / steps
        for j in range(1, steps + 1):
            mu = mu_max * j / steps
            lo, hi = (lam, mu) if lam <= mu else (mu, lam)
            member = F.kappa_region_contains(lo, hi)
            k = F.kappa(lo, hi)
            rows.append((lam, mu, k, member))
            inside += member
            if i == j:
                diag.append((lam, k))
    with open(out, "w") as fh:
        fh.write("lambda,mu,kappa,in_region\n")
        for lam, mu, k, member in rows:
            fh.write(f"{lam!r},{mu!r},{k!r},{int(member)}\n")
    # bracket the diagonal roots
    brackets = []
    for (l0, k0), (l1, k1) in zip(diag[:-1], diag[1:]):
        if (k0 <= 0.0 < k1) or (k0 > 0.0 >= k1):
            brackets.append((l0, l1))
    click.echo(
        f"wrote {len(rows)} rows to {out}; {inside} inside the region; "
        f"diagonal sign changes in {brackets}"
    )


@main.command()
@click.argument("suite", required=False)
@click.option("--list", "list_suites", is_flag=True, help="List available suites.")
@click.option("--quick", is_flag=True, help="Reduced replica counts.")
@click.option("--seed", type=int, default=None)
@click.option("--threads", type=int, default=1, show_default=True,
              help="Worker threads for replica-parallel suites.")
def verify(suite, list_suites, quick, seed, threads):
    """Run a verification suite and report pass/fail per check."""
    if list_suites or suite is None:
        click.echo("available suites: " + " ".join(CLI_SUITES))
        sys.exit(0 if list_suites else EXIT_CONFIG)
    if suite not in ALL_SUITES:
        click.echo(
            f"error: unknown suite {suite!r}; available: {' '.join(CLI_SUITES)}", err=True
        )
        sys.exit(EXIT_CONFIG)
    result = run_suite(suite, quick=quick, seed=seed, threads=threads)
    for line in result.lines():
        click.echo(line)
    sys.exit(0 if result.passed else EXIT_VERIFY)


@main.command("optimize")
@click.option("--config", type=click.Path(exists=True), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--n", type=int, default=None, help="Grid size.")
@click.option("--m-bound", "m_bound", type=float, default=None, help="Cone bound M.")
@click.option("--endpoint", default=None, help="Endpoint 'x,y' to pin f(1).")
@click.option("--out-path", type=click.Path(), default=None, help="Best path CSV.")
@click.option("--out-log", type=click.Path(), default=None, help="Convergence log JSONL.")
def optimize_cmd(config, seed, n, m_bound, endpoint, out_path, out_log):
    """Maximize the growth functional over grid paths."""
    try:
        opts = _merge(
            _load_config(config, "optimize"),
            seed=seed,
            n=n,
            M=m_bound,
            endpoint=endpoint,
            out_path=out_path,
            out_log=out_log,
        )
        opts.setdefault("seed", 1)
        opts.setdefault("n", 8)
        opts.setdefault("M", 3.0)
        ep = opts.get("endpoint")
        if isinstance(ep, str):
            parts = ep.split(",")
            if len(parts) != 2:
                raise ConfigError("endpoint must be 'x,y'")
            ep = (float(parts[0]), float(parts[1]))
        elif isinstance(ep, (list, tuple)):
            ep = (float(ep[0]), float(ep[1]))
        problem = OptProblem(n=int(opts["n"]), M=float(opts["M"]), endpoint=ep)
    except (ConfigError, DomainError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    try:
        result = optimize(problem, seed=int(opts["seed"]))
    except InfeasibleError as exc:
        click.echo(f"infeasible: {exc} ({exc.certificate})", err=True)
        sys.exit(EXIT_INFEASIBLE)
    if opts.get("out_log"):
        with open(opts["out_log"], "w") as fh:
            for start, it, val in result.log:
                fh.write(json.dumps({"start": start, "iteration": it, "value": val}) + "\n")
    if opts.get("out_path"):
        with open(opts["out_path"], "w") as fh:
            path_to_csv(result.best.to_path(), fh)
    if not result.feasible:
        click.echo("no feasible path: every profile goes negative (growth rate -inf)")
        sys.exit(EXIT_INFEASIBLE)
    click.echo(f"best value {result.value:.9g} after {result.multistarts} starts")


if __name__ == "__main__":
    main()
