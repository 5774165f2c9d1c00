"""Command-line interface.

Subcommands: ``embed`` (data file to coordinates), ``synth`` (planted
scenario validation), ``neighbors`` and ``partition`` (queries over an
embedding), ``plot`` (SVG map).  Data goes to stdout or ``--out`` files;
logs go to stderr.  Exit codes: 2 for parse/usage problems, 3 when the
missing-data policy empties the roster, 4 for disconnected trade graphs,
5 for eigensolver non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .analysis import bipartition, nearest_neighbors
from .embedding import (
    Embedding,
    compose_map,
    embed,
    read_coordinates,
    write_coordinates,
)
from .errors import (
    ConvergenceError,
    DegenerateRosterError,
    DisconnectedGraphError,
    DuplicateDyadError,
    InsufficientSpectrumError,
    IsolatedVertexError,
    NegativeFlowError,
    NoDataError,
    ParseError,
    RosterMismatchError,
    SchemaError,
    SubsetTooSmallError,
    TradeMapError,
    UnknownCountryError,
)
from .graph import affinity, connected_components, degrees, normalized_laplacian
from .ingest import (
    COW_MISSING_SENTINEL,
    POLICIES,
    POLICY_DROP_INCOMPLETE,
    DyadSchema,
    FlowMatrix,
    build_flow_matrix,
    load_labels,
    parse_dyadic_csv,
    select_subgraph,
)
from .plot import LABEL_MODES, PlotSpec, render_svg
from .spectral import symmetric_eigen
from .synth import (
    gravity_flows,
    planted_cluster_scenario,
    read_scenario,
    recovery_score,
    write_scenario,
)

logger = logging.getLogger(__name__)

EXIT_PARSE = 2
EXIT_EMPTY_ROSTER = 3
EXIT_DISCONNECTED = 4
EXIT_NO_CONVERGENCE = 5


def read_config(path: str) -> dict[str, str]:
    """Read a flat ``key = value`` config file; '#' starts a comment line."""
    config: dict[str, str] = {}
    for line_number, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        if not sep:
            raise SchemaError(
                f"{path}:{line_number}: expected 'key = value', got {stripped!r}"
            )
        config[key.strip()] = value.strip()
    return config


def _setting(args, name: str, config: dict[str, str], default=None):
    value = getattr(args, name.replace("-", "_"), None)
    if value is not None:
        return value
    return config.get(name, default)


def _load_flow(args) -> FlowMatrix:
    """Run ingestion from CLI flags plus optional config file."""
    config = read_config(args.config) if getattr(args, "config", None) else {}
    input_path = _setting(args, "input", config)
    if input_path is None:
        raise SchemaError("no input file given (use --input or a config file)")
    year_raw = _setting(args, "year", config)
    if year_raw is None:
        raise SchemaError("no year given (use --year or a config file)")
    year = int(year_raw)
    policy = _setting(args, "policy", config, POLICY_DROP_INCOMPLETE)
    schema = DyadSchema(
        reporter=_setting(args, "reporter-col", config, "reporter"),
        partner=_setting(args, "partner-col", config, "partner"),
        year=_setting(args, "year-col", config, "year"),
        export_value=_setting(args, "value-col", config, "export_value"),
    )
    sentinel = float(_setting(args, "missing-sentinel", config, COW_MISSING_SENTINEL))
    delimiter = _setting(args, "delimiter", config, ",")

    with open(input_path, newline="") as handle:
        records = parse_dyadic_csv(handle, schema, sentinel, delimiter)

    subset_raw = _setting(args, "subset", config)
    if subset_raw:
        subset = [code.strip() for code in subset_raw.split(",") if code.strip()]
        year_codes = {r.reporter for r in records if r.year == year} | {
            r.partner for r in records if r.year == year
        }
        for code in subset:
            if code not in year_codes:
                raise UnknownCountryError(code)
        if len(set(subset)) < 3:
            raise SubsetTooSmallError(
                f"subset has {len(set(subset))} countries; at least 3 are required"
            )
        keep = set(subset)
        # Restrict before the missing-data policy so completeness is judged
        # within the collection being mapped, not against the whole world.
        records = [r for r in records if r.reporter in keep and r.partner in keep]

    flow = build_flow_matrix(records, year, policy)

    labels_path = _setting(args, "labels", config)
    if labels_path:
        with open(labels_path, newline="") as handle:
            label_map = load_labels(handle)
        flow = FlowMatrix(
            flow.roster.relabeled(label_map), flow.values, flow.missing_mask
        )
    return flow


def _preprocess(flow: FlowMatrix, args) -> FlowMatrix:
    """Optional isolated-vertex and largest-component restrictions."""
    if getattr(args, "drop_isolated", False):
        deg = degrees(affinity(flow)).degrees
        isolated = [flow.roster.codes[i] for i in np.flatnonzero(deg <= 0.0)]
        if isolated:
            logger.warning(
                "dropping %d isolated countries: %s",
                len(isolated),
                ", ".join(isolated),
            )
            keep = [c for c in flow.roster.codes if c not in set(isolated)]
            flow = select_subgraph(flow, keep)
    if getattr(args, "largest_component", False):
        components = connected_components(affinity(flow))
        if len(components) > 1:
            largest = max(components, key=len)
            codes = [flow.roster.codes[i] for i in largest]
            logger.warning(
                "graph has %d components; keeping the largest with %d countries",
                len(components),
                len(codes),
            )
            flow = select_subgraph(flow, codes)
    return flow


def _dump_grid(path: Path, codes, matrix: np.ndarray) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["code"] + list(codes))
        for code, row in zip(codes, np.atleast_2d(matrix)):
            writer.writerow([code] + [repr(float(v)) for v in row])


def _embedding_from_args(args) -> Embedding:
    """Either load saved coordinates or run the full pipeline."""
    coords_path = getattr(args, "coords", None)
    if coords_path:
        with open(coords_path, newline="") as handle:
            return read_coordinates(handle)
    flow = _preprocess(_load_flow(args), args)
    return compose_map(flow, k=getattr(args, "k", 2) or 2)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_embed(args) -> int:
    flow = _preprocess(_load_flow(args), args)
    logger.info("roster has %d countries for year %s", flow.n, args.year)

    aff = affinity(flow)
    lap = normalized_laplacian(aff)
    if args.dump_matrices:
        prefix = args.dump_matrices
        _dump_grid(Path(prefix + ".affinity.csv"), flow.roster.codes, aff.values)
        _dump_grid(
            Path(prefix + ".degrees.csv"),
            flow.roster.codes,
            lap.degrees.degrees[:, None],
        )
        _dump_grid(Path(prefix + ".laplacian.csv"), flow.roster.codes, lap.values)

    emb = embed(lap, k=args.k)
    logger.info(
        "embedded %d countries: spectral gap %s, degenerate=%s",
        emb.n,
        "n/a" if math.isnan(emb.spectral_gap) else f"{emb.spectral_gap:.6g}",
        emb.degeneracy_flag,
    )
    if args.dump_spectrum:
        spectrum = symmetric_eigen(lap.values)
        with open(args.dump_spectrum, "w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["index", "eigenvalue"])
            for i, value in enumerate(spectrum.eigenvalues):
                writer.writerow([i, repr(float(value))])

    buffer = io.StringIO()
    write_coordinates(emb, buffer)
    _emit(buffer.getvalue(), args.out)
    if args.svg:
        spec = PlotSpec(label_mode=args.label_mode, color_file=args.color_file)
        Path(args.svg).write_text(render_svg(emb, spec))
    return 0


def _cluster_centers(clusters: int, separation: float) -> list[tuple[float, float]]:
    if clusters == 1:
        return [(0.0, 0.0)]
    if clusters == 2:
        return [(0.0, 0.0), (separation, 0.0)]
    radius = separation / (2.0 * math.sin(math.pi / clusters))
    return [
        (
            radius * math.cos(2.0 * math.pi * j / clusters),
            radius * math.sin(2.0 * math.pi * j / clusters),
        )
        for j in range(clusters)
    ]


def _format_score(value: Optional[float]) -> str:
    return "n/a" if value is None else repr(round(value, 12))


def cmd_synth(args) -> int:
    if args.repeat < 1:
        raise ValueError("--repeat must be at least 1")
    accuracies: list[float] = []
    correlations: list[float] = []
    for offset in range(args.repeat):
        seed = args.seed + offset
        if args.load_scenario:
            with open(args.load_scenario) as handle:
                scenario = read_scenario(handle)
        else:
            centers = _cluster_centers(
                args.clusters, args.separation_ratio * args.spread
            )
            scenario = planted_cluster_scenario(
                seed,
                max(1, args.n // args.clusters),
                centers,
                args.spread,
                (args.mass_min, args.mass_max),
                args.gravity_constant,
            )
        if args.save_scenario and offset == 0:
            with open(args.save_scenario, "w", newline="") as handle:
                write_scenario(scenario, handle)
        flow = gravity_flows(scenario, args.noise)
        emb = compose_map(flow, k=2)
        score = recovery_score(scenario, emb)
        if score.partition_accuracy is not None:
            accuracies.append(score.partition_accuracy)
        correlations.append(score.distance_rank_correlation)
        sys.stdout.write(
            f"seed={scenario.seed} n={scenario.n} "
            f"partition_accuracy={_format_score(score.partition_accuracy)} "
            f"distance_rank_correlation={_format_score(score.distance_rank_correlation)}\n"
        )
    if args.repeat > 1:
        acc_mean = _format_score(float(np.mean(accuracies)) if accuracies else None)
        acc_min = _format_score(float(np.min(accuracies)) if accuracies else None)
        sys.stdout.write(
            f"repeats={args.repeat} "
            f"accuracy_mean={acc_mean} accuracy_min={acc_min} "
            f"rank_correlation_mean={_format_score(float(np.mean(correlations)))} "
            f"rank_correlation_min={_format_score(float(np.min(correlations)))}\n"
        )
    return 0


def cmd_neighbors(args) -> int:
    emb = _embedding_from_args(args)
    ranked = nearest_neighbors(emb, args.of, args.k)
    if args.csv:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["rank", "code", "distance"])
        for rank, (code, distance) in enumerate(ranked, start=1):
            writer.writerow([rank, code, repr(distance)])
        _emit(buffer.getvalue(), args.out)
    else:
        width = max(len(code) for code, _ in ranked)
        lines = [f"neighbors of {args.of}:"]
        for rank, (code, distance) in enumerate(ranked, start=1):
            label = emb.roster.label_for(code)
            suffix = f"  {label}" if label != code else ""
            lines.append(f"{rank:3d}  {code:<{width}}  {distance:.6g}{suffix}")
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_partition(args) -> int:
    emb = _embedding_from_args(args)
    split = bipartition(emb, args.zero_band)
    if args.csv:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["code", "side"])
        for code in emb.roster.codes:
            side = "positive" if code in set(split.positive) else "negative"
            writer.writerow([code, side])
        _emit(buffer.getvalue(), args.out)
    else:
        lines = [
            f"positive side ({len(split.positive)}): {', '.join(split.positive)}",
            f"negative side ({len(split.negative)}): {', '.join(split.negative)}",
        ]
        if split.boundary:
            lines.append(
                f"boundary cases within +-{split.boundary_tolerance:g}: "
                + ", ".join(split.boundary)
            )
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_plot(args) -> int:
    emb = _embedding_from_args(args)
    spec = PlotSpec(
        width=args.width,
        height=args.height,
        label_mode=args.label_mode,
        color_file=args.color_file,
        margin_fraction=args.margin_fraction,
    )
    _emit(render_svg(emb, spec), args.out)
    return 0


def _add_pipeline_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("pipeline input")
    group.add_argument("--input", help="dyadic trade CSV file")
    group.add_argument("--year", type=int, help="calendar year to slice")
    group.add_argument("--policy", choices=POLICIES, help="missing-data policy")
    group.add_argument("--config", help="key=value config file; flags override it")
    group.add_argument("--subset", help="comma-separated country codes to restrict to")
    group.add_argument("--labels", help="code,label side file for display names")
    group.add_argument("--delimiter", help="field separator (default comma)")
    group.add_argument("--reporter-col", help="reporter column name")
    group.add_argument("--partner-col", help="partner column name")
    group.add_argument("--year-col", help="year column name")
    group.add_argument("--value-col", help="export value column name")
    group.add_argument(
        "--missing-sentinel",
        type=float,
        help=f"value marking missing dyads (default {COW_MISSING_SENTINEL:g})",
    )
    group.add_argument(
        "--drop-isolated",
        action="store_true",
        help="drop zero-trade countries instead of failing",
    )
    group.add_argument(
        "--largest-component",
        action="store_true",
        help="restrict to the largest connected component before embedding",
    )


def _add_analysis_source_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--coords", help="previously saved coordinates CSV (skips the pipeline)"
    )
    _add_pipeline_arguments(parser)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trademap",
        description="Map countries into the plane from bilateral trade volumes.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="debug logging on stderr"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_embed = sub.add_parser("embed", help="embed a trade file into coordinates")
    _add_pipeline_arguments(p_embed)
    p_embed.add_argument("--k", type=int, default=2, help="embedding dimensions")
    p_embed.add_argument("--out", help="coordinates CSV path (default stdout)")
    p_embed.add_argument("--svg", help="also render an SVG map to this path")
    p_embed.add_argument(
        "--label-mode", choices=LABEL_MODES, default="code", help="SVG label style"
    )
    p_embed.add_argument("--color-file", help="code,color-group CSV for the SVG")
    p_embed.add_argument(
        "--dump-matrices",
        metavar="PREFIX",
        help="write affinity/degree/Laplacian grids as PREFIX.*.csv",
    )
    p_embed.add_argument("--dump-spectrum", help=argparse.SUPPRESS)
    p_embed.set_defaults(func=cmd_embed)

    p_synth = sub.add_parser("synth", help="validate recovery on planted scenarios")
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--clusters", type=int, default=2)
    p_synth.add_argument("--n", type=int, default=40, help="total points")
    p_synth.add_argument("--spread", type=float, default=1.0)
    p_synth.add_argument(
        "--separation-ratio",
        type=float,
        default=10.0,
        help="center separation as a multiple of spread",
    )
    p_synth.add_argument("--noise", type=float, default=0.0, help="lognormal sigma")
    p_synth.add_argument("--mass-min", type=float, default=0.5)
    p_synth.add_argument("--mass-max", type=float, default=2.0)
    p_synth.add_argument("--gravity-constant", type=float, default=1.0)
    p_synth.add_argument(
        "--repeat", type=int, default=1, help="aggregate over this many seeds"
    )
    p_synth.add_argument("--save-scenario", help="write the scenario CSV here")
    p_synth.add_argument("--load-scenario", help="replay a saved scenario CSV")
    p_synth.set_defaults(func=cmd_synth)

    p_nb = sub.add_parser("neighbors", help="rank countries closest to one code")
    _add_analysis_source_arguments(p_nb)
    p_nb.add_argument("--of", required=True, help="country code to query")
    p_nb.add_argument("--k", type=int, default=5, help="number of neighbors")
    p_nb.add_argument("--csv", action="store_true", help="emit rank,code,distance CSV")
    p_nb.add_argument("--out", help="output path (default stdout)")
    p_nb.set_defaults(func=cmd_neighbors)

    p_part = sub.add_parser("partition", help="split countries by map side")
    _add_analysis_source_arguments(p_part)
    p_part.add_argument("--zero-band", type=float, default=0.0)
    p_part.add_argument("--csv", action="store_true", help="emit code,side CSV")
    p_part.add_argument("--out", help="output path (default stdout)")
    p_part.set_defaults(func=cmd_partition)

    p_plot = sub.add_parser("plot", help="render an SVG map")
    _add_analysis_source_arguments(p_plot)
    p_plot.add_argument("--out", help="SVG path (default stdout)")
    p_plot.add_argument("--width", type=int, default=800)
    p_plot.add_argument("--height", type=int, default=600)
    p_plot.add_argument("--label-mode", choices=LABEL_MODES, default="code")
    p_plot.add_argument("--color-file", help="code,color-group CSV")
    p_plot.add_argument("--margin-fraction", type=float, default=0.06)
    p_plot.set_defaults(func=cmd_plot)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (
        ParseError,
        SchemaError,
        NoDataError,
        DuplicateDyadError,
        UnknownCountryError,
        SubsetTooSmallError,
        NegativeFlowError,
        RosterMismatchError,
        InsufficientSpectrumError,
    ) as exc:
        logger.error("%s", exc)
        return EXIT_PARSE
    except (ValueError, OSError) as exc:
        logger.error("%s", exc)
        return EXIT_PARSE
    except DegenerateRosterError as exc:
        logger.error("%s", exc)
        return EXIT_EMPTY_ROSTER
    except (DisconnectedGraphError, IsolatedVertexError) as exc:
        logger.error("%s", exc)
        return EXIT_DISCONNECTED
    except ConvergenceError as exc:
        logger.error("%s", exc)
        return EXIT_NO_CONVERGENCE
    except TradeMapError as exc:  # any future taxonomy member
        logger.error("%s", exc)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
