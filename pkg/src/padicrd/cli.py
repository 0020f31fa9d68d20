"""Command-line front end: embed, operator, spectrum, turing, simulate, converge, replica.

Runs are driven by a TOML configuration file plus flag overrides (flags
win).  Every subcommand writes machine-readable reports (JSON / CSV,
floats at 17 significant digits) and rendered figures into --out, and
prints a human summary at 6 significant digits.

Exit codes: 0 success, 2 configuration error, 3 numerical failure
(blow-up or non-convergence).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import figures
from .documents import write_json
from .expressions import ParseError
from .kinetics import (
    KineticsModel,
    SteadyStateError,
    brusselator,
    cima,
    parse_kinetics,
    steady_state,
)
from .network import GraphFormatError, embed, load_graph, refine
from .operators import (
    build_full_level,
    build_graph_laplacian,
    build_replica_block,
    build_replica_full,
    build_scaled_lambda,
    operator_to_csv,
    operator_to_document,
)
from .padic import digit_weight
from .simulate import (
    IntegrationError,
    Perturbation,
    PerturbationError,
    SimConfig,
    convergence_study,
    integrate,
    pattern_report,
    replica_compare,
    trajectory_to_csv,
)
from .spectra import eig_symmetric, spectrum_infinity, spectrum_level_predicted
from .turing import turing_check

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class ConfigError(ValueError):
    pass


_SCHEMA = {
    "graph": {"path", "n", "edges", "labels", "p", "N"},
    "model": {"kind", "A", "B", "C"},
    "kinetics": {"f", "g", "params", "guess"},
    "box": {"a", "b"},
    "run": {
        "eps", "d", "M", "levels", "integrator", "dt", "t_end", "stride",
        "seed", "out", "figures",
    },
    "perturbation": {"kind", "amplitude", "eigen_index", "vertex", "j", "level", "offset"},
}


def load_config(path) -> dict:
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    for section, keys in doc.items():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        if not isinstance(keys, dict):
            raise ConfigError(f"[{section}] must be a table")
        unknown = set(keys) - _SCHEMA[section]
        if unknown:
            raise ConfigError(f"unknown key(s) {sorted(unknown)} in [{section}]")
    return doc


def _cfg(config: dict, section: str, key: str, default=None):
    return config.get(section, {}).get(key, default)


def _build_graph(args, config):
    source = args.graph or _cfg(config, "graph", "path")
    if source is None:
        table = config.get("graph", {})
        if "n" in table:
            return load_graph({k: v for k, v in table.items() if k in ("n", "edges", "labels", "p", "N")})
        raise ConfigError("no graph given: use --graph PATH or a [graph] config table")
    return load_graph(source)


def _build_embedding(args, config):
    graph = _build_graph(args, config)
    p = args.p if args.p is not None else _cfg(config, "graph", "p")
    N = args.N if args.N is not None else _cfg(config, "graph", "N")
    return embed(graph, p=p, N=N)


def _build_model(args, config) -> KineticsModel:
    kind = args.model or _cfg(config, "model", "kind", "brusselator")
    box = None
    if "box" in config:
        box = (float(config["box"]["a"]), float(config["box"]["b"]))

    def param(name, default):
        flag = getattr(args, name, None)
        if flag is not None:
            return flag
        return float(_cfg(config, "model", name, default))

    if kind == "brusselator":
        return brusselator(param("A", 2.0), param("B", 4.5), box=box)
    if kind == "cima":
        return cima(param("A", 10.0), param("B", 2.0), param("C", 1.0), box=box)
    if kind == "custom":
        table = config.get("kinetics", {})
        if "f" not in table or "g" not in table:
            raise ConfigError("custom kinetics need kinetics.f and kinetics.g in the config")
        params = {k: float(v) for k, v in table.get("params", {}).items()}
        model = parse_kinetics(table["f"], table["g"], params, box=box)
        if "guess" in table:
            guess = table["guess"]
            steady_state(model, guess=(float(guess[0]), float(guess[1])))
        return model
    raise ConfigError(f"unknown model kind {kind!r}")


def _build_sim_config(args, config, embedding) -> SimConfig:
    run = config.get("run", {})
    pert_table = config.get("perturbation", {})
    pert = Perturbation(
        kind=pert_table.get("kind", "random"),
        amplitude=float(pert_table.get("amplitude", 1e-4)),
        eigen_index=pert_table.get("eigen_index"),
        vertex=int(pert_table.get("vertex", 0)),
        j=int(pert_table.get("j", 1)),
        level=pert_table.get("level"),
        offset=int(pert_table.get("offset", 0)),
    )
    M = args.M[0] if args.M else run.get("M", embedding.N)
    return SimConfig(
        M=int(M),
        eps=args.eps if args.eps is not None else float(run.get("eps", 0.3)),
        d=args.d if args.d is not None else float(run.get("d", 1.0)),
        integrator=run.get("integrator", "rk4"),
        dt=float(run["dt"]) if "dt" in run else None,
        t_end=args.t_end if args.t_end is not None else float(run.get("t_end", 1.0)),
        stride=int(run.get("stride", 1)),
        seed=args.seed if args.seed is not None else int(run.get("seed", 0)),
        perturbation=pert,
    )


def _out_dir(args, config) -> Path:
    out = Path(args.out or _cfg(config, "run", "out", "out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _figures_enabled(args, config) -> bool:
    if args.no_figures:
        return False
    return bool(_cfg(config, "run", "figures", True))


def _fmt(x) -> str:
    return format(float(x), ".6g")


def cmd_embed(args, config) -> int:
    embedding = _build_embedding(args, config)
    out = _out_dir(args, config)
    doc = {
        "p": embedding.p,
        "N": embedding.N,
        "n": embedding.n,
        "gamma_max": embedding.gamma_max,
        "symmetric": embedding.graph.is_symmetric,
        "zero_diagonal": embedding.graph.has_zero_diagonal,
        "vertices": [
            {
                "vertex": k,
                "label": embedding.graph.labels[k] if embedding.graph.labels else str(k),
                "digits": list(code.digits),
                "value": code.value,
                "degree": int(embedding.degrees[k]),
            }
            for k, code in enumerate(embedding.codes)
        ],
    }
    path = write_json(doc, out / "embedding.json")
    print(f"p = {embedding.p}, N = {embedding.N}, {embedding.n} vertices, "
          f"max degree {embedding.gamma_max}")
    for row in doc["vertices"]:
        print(f"  vertex {row['vertex']:>3}  code {tuple(row['digits'])}  "
              f"value {row['value']:>4}  degree {row['degree']}")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_operator(args, config) -> int:
    embedding = _build_embedding(args, config)
    out = _out_dir(args, config)
    M = args.M[0] if args.M else embedding.N
    kind = args.kind
    if kind == "graph_laplacian":
        op = build_graph_laplacian(embedding)
    elif kind == "full_level":
        op = build_full_level(refine(embedding, M))
    elif kind == "replica_block":
        op = build_replica_block(embedding, M)
    elif kind == "replica_full":
        op = build_replica_full(embedding, M)
    elif kind == "scaled_lambda":
        op = build_scaled_lambda(refine(embedding, M), args.lam)
    else:
        raise ConfigError(f"unknown operator kind {kind!r}")
    operator_to_csv(op, out / "operator.csv")
    write_json(operator_to_document(op), out / "operator.json")
    if _figures_enabled(args, config):
        figures.save_operator_heatmap(op, out / "operator.png")
    row_sum = np.abs(op.entries.sum(axis=1)).max()
    print(f"{op.kind}: {op.dim}x{op.dim} at level {op.level} "
          f"(max |row sum| = {_fmt(row_sum)}, symmetric = {op.is_symmetric()})")
    print(f"wrote {out / 'operator.csv'}, {out / 'operator.json'}")
    return EXIT_OK


def cmd_spectrum(args, config) -> int:
    embedding = _build_embedding(args, config)
    out = _out_dir(args, config)
    if args.space == "infinity":
        spec = spectrum_infinity(embedding)
        graph_spec = eig_symmetric(build_graph_laplacian(embedding), source="graph")
        doc = {"infinity": spec.to_document(), "graph": graph_spec.to_document()}
        reports, labels = [graph_spec, spec], ["graph", "infinity"]
        print("non-zero spectrum on the continuum:")
        for value, mult in spec.grouped():
            print(f"  {_fmt(value):>12}  multiplicity {mult} (finite trace)")
    else:
        M = args.M[0] if args.M else embedding.N
        predicted = spectrum_level_predicted(embedding, M)
        computed = eig_symmetric(build_full_level(refine(embedding, M)),
                                 source="level_computed")
        gap = float(np.abs(predicted.eigenvalues - computed.eigenvalues).max())
        doc = {
            "level": M,
            "predicted": predicted.to_document(),
            "computed": computed.to_document(),
            "max_difference": gap,
        }
        reports, labels = [predicted, computed], ["predicted", "computed"]
        print(f"level {M} spectrum (predicted vs computed, max difference {_fmt(gap)}):")
        for value, mult in computed.grouped():
            print(f"  {_fmt(value):>12}  multiplicity {mult}")
    path = write_json(doc, out / "spectrum.json")
    if _figures_enabled(args, config):
        figures.save_spectrum_figure(reports, labels, out / "spectrum.png")
    print(f"wrote {path}")
    return EXIT_OK


def _parse_levels(tokens, embedding) -> list:
    levels = []
    for tok in tokens:
        tok = tok.strip()
        if tok in ("N", "n"):
            levels.append(embedding.N)
        elif tok in ("infinity", "inf"):
            levels.append("infinity")
        else:
            levels.append(int(tok))
    return levels


def cmd_turing(args, config) -> int:
    embedding = _build_embedding(args, config)
    model = _build_model(args, config)
    out = _out_dir(args, config)
    run = config.get("run", {})
    eps = args.eps if args.eps is not None else float(run.get("eps", 0.3))
    d = args.d if args.d is not None else float(run.get("d", 1.0))
    levels = _parse_levels(
        args.levels.split(",") if args.levels else [str(x) for x in run.get("levels", ["N", "infinity"])],
        embedding,
    )
    report = turing_check(model, eps, d, embedding, levels=levels)
    path = write_json(report.to_document(), out / "turing.json")
    if _figures_enabled(args, config):
        figures.save_dispersion_figure(report, out / "dispersion.png")

    print(f"steady state ({_fmt(report.steady[0])}, {_fmt(report.steady[1])}), "
          f"trace {_fmt(report.trace)}, det {_fmt(report.det)}")
    for name, (ok, value) in report.conditions.items():
        print(f"  {name}: {'PASS' if ok else 'fail'}  ({_fmt(value)})")
    if report.critical.value is not None:
        roots = ", ".join(_fmt(r) for r in report.critical.roots)
        print(f"  critical d = {_fmt(report.critical.value)} (quadratic roots: {roots})")
    else:
        print(f"  critical d: none (roots: {report.critical.roots})")
    if report.band is not None:
        print(f"  band: ({_fmt(report.band.kappa1)}, {_fmt(report.band.kappa2)})")
    else:
        print("  band: none")
    for space in report.spaces:
        modes = ", ".join(
            f"{_fmt(m.kappa)}{'*' if m.unstable else ''}" for m in space.modes
        )
        verdict = "pattern" if space.pattern else "no pattern"
        print(f"  {space.space}: {verdict}  modes [{modes}]"
              + (f"  ({space.annotation})" if space.annotation else ""))
    print(f"wrote {path}")
    return EXIT_OK


def cmd_simulate(args, config) -> int:
    embedding = _build_embedding(args, config)
    model = _build_model(args, config)
    out = _out_dir(args, config)
    sim = _build_sim_config(args, config, embedding)
    grid = refine(embedding, sim.M if sim.M is not None else embedding.N)
    op = build_full_level(grid)
    traj = integrate(model, op, op, sim, grid)
    report = pattern_report(traj, model)
    trajectory_to_csv(traj, out / "trajectory.csv")
    write_json(report.to_document(), out / "pattern.json")
    if _figures_enabled(args, config):
        figures.save_trajectory_figure(traj, report, out / "simulate.png")
    print(f"integrated to t = {_fmt(traj.times[-1])} at level {grid.M} "
          f"({len(traj.times)} samples, dim {grid.dim})")
    print(f"verdict: {report.verdict} ({report.cluster_count} ball means)")
    for mode in report.modes:
        rate = "n/a" if mode.fitted_rate is None else _fmt(mode.fitted_rate)
        print(f"  {mode.kind} mode kappa = {_fmt(mode.eigenvalue)}: fitted rate {rate}")
    print(f"wrote {out / 'trajectory.csv'}, {out / 'pattern.json'}")
    if traj.halted:
        print(f"run halted early ({traj.halted}) at t = {_fmt(traj.t_max)}")
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_converge(args, config) -> int:
    embedding = _build_embedding(args, config)
    model = _build_model(args, config)
    out = _out_dir(args, config)
    sim = _build_sim_config(args, config, embedding)
    m_cfg = config.get("run", {}).get("M")
    M_list = args.M or ([int(x) for x in m_cfg] if isinstance(m_cfg, list) else None)
    if not M_list:
        raise ConfigError("converge needs --M LIST (for example --M 2,3,4)")
    report = convergence_study(model, embedding, digit_weight, M_list, sim)
    path = write_json(report.to_document(), out / "convergence.json")
    if _figures_enabled(args, config):
        figures.save_convergence_figure(report, out / "convergence.png")
    print(f"gaps against level {report.finest} (t_end = {_fmt(report.t_end)}, "
          f"dt = {_fmt(report.dt)}):")
    for M, gap in zip(report.levels, report.gaps):
        print(f"  level {M}: {_fmt(gap)}")
    print(f"non-increasing within 5%: {report.non_increasing()}")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_replica(args, config) -> int:
    embedding = _build_embedding(args, config)
    out = _out_dir(args, config)
    run = config.get("run", {})
    M = args.M[0] if args.M else int(run.get("M", embedding.N + 1))
    eps = args.eps if args.eps is not None else float(run.get("eps", 0.3))
    seed = args.seed if args.seed is not None else int(run.get("seed", 0))
    t_end = args.t_end if args.t_end is not None else float(run.get("t_end", 1.0))
    report = replica_compare(embedding, M, eps, t_end=t_end, seed=seed)
    path = write_json(report.to_document(), out / "replica.json")
    if _figures_enabled(args, config):
        figures.save_replica_figure(report, out / "replica.png")
    print(f"level {M} spectrum:  "
          + ", ".join(f"{_fmt(v)} (x{m})" for v, m in report.spectrum_full.grouped()))
    print(f"replica spectrum: "
          + ", ".join(f"{_fmt(v)} (x{m})" for v, m in report.spectrum_replica.grouped()))
    print(f"spectra match: {report.spectra_match} -> block identification "
          f"{'supported' if report.identification_supported else 'NOT supported'} numerically")
    print(f"max trajectory distance: {_fmt(report.max_trajectory_distance)}")
    print(f"wrote {path}")
    return EXIT_OK


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="padicrd",
        description="hierarchical diffusion operators on networks: spectra, "
        "instability analysis, and pattern simulation",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "embed": cmd_embed,
        "operator": cmd_operator,
        "spectrum": cmd_spectrum,
        "turing": cmd_turing,
        "simulate": cmd_simulate,
        "converge": cmd_converge,
        "replica": cmd_replica,
    }
    for name, handler in commands.items():
        sp = sub.add_parser(name)
        sp.set_defaults(handler=handler)
        sp.add_argument("--graph", help="edge-list or JSON graph file")
        sp.add_argument("--p", type=int, help="prime base (default 2)")
        sp.add_argument("--N", type=int, help="embedding level (default minimal)")
        sp.add_argument("--M", type=_int_list, help="refinement level(s), comma separated")
        sp.add_argument("--model", choices=["brusselator", "cima", "custom"])
        sp.add_argument("--A", type=float, help="model parameter A")
        sp.add_argument("--B", type=float, help="model parameter B")
        sp.add_argument("--C", type=float, help="model parameter C")
        sp.add_argument("--eps", type=float, help="diffusivity of the activator")
        sp.add_argument("--d", type=float, help="diffusivity ratio")
        sp.add_argument("--t-end", dest="t_end", type=float)
        sp.add_argument("--config", help="TOML run configuration")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", help="output directory (default ./out)")
        sp.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
        if name == "operator":
            sp.add_argument(
                "--kind",
                default="graph_laplacian",
                choices=["graph_laplacian", "full_level", "replica_block",
                         "replica_full", "scaled_lambda"],
            )
            sp.add_argument("--lam", type=float, default=1.0)
        if name == "spectrum":
            sp.add_argument("--space", choices=["level", "infinity"], default="level")
        if name == "turing":
            sp.add_argument("--levels", help="comma list: N, integers, infinity")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config) if args.config else {}
        return args.handler(args, config)
    except (IntegrationError, SteadyStateError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, GraphFormatError, ParseError, PerturbationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
