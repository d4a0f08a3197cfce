"""Batch command-line interface.

Subcommands: ``estimate`` (full pipeline with diagnostics and optional
bands), ``diagnose`` (identification report only), ``simulate``
(synthetic datasets from named presets), ``study`` (instrument
discretization comparison) and ``plotdata`` (plot-ready table emission).

Configuration comes from a JSON file plus flag overrides (flags win);
every run writes a metadata file from which it can be reproduced exactly.
Exit codes: 0 ok, 1 usage/config, 2 data, 3 identification failure,
4 numeric failure.
"""

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .bootstrap import BootstrapConfig, run_bootstrap
from .design.data import read_dataset_csv, write_dataset_csv
from .design.dgp import available_presets, make_preset, simulate
from .design.discretize import discretize_design1, discretize_design2
from .diagnostics import (
    DEFAULT_BINS,
    DEFAULT_THRESHOLD,
    conditional_profile_v,
    conditional_profile_x,
    moment_matrix,
    propensity_check,
    triangular_profiles,
)
from .exceptions import (
    BootstrapError,
    ConfigError,
    ConvergenceError,
    DataError,
    IdentificationError,
    InvalidInputError,
    QrControlError,
)
from .structural import StructuralFunctionEstimator
from .tables import read_tables, write_tables

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_IDENTIFICATION = 3
EXIT_NUMERIC = 4

_BASIS_KEYS = {"p", "q", "r", "s"}

DEFAULT_CONFIG = {
    "input": None,
    "output": "qrcontrol-out",
    "seed": 0,
    "epsilon": 0.01,
    "grid_size": 599,
    "mesh_size": 599,
    "measure": "continuous",
    "basis": {"p": ["1", "x"], "q": ["1", "probit"], "r": ["1"], "s": ["1", "x"]},
    "x_quantiles": [0.1, 0.3, 0.5, 0.7, 0.9],
    "p_levels": [0.25, 0.5, 0.75],
    "discretize": None,
    "bootstrap": None,
    "diagnostics": {"threshold": DEFAULT_THRESHOLD, "bins": DEFAULT_BINS,
                    "tolerance": 0.05},
}


class _Parser(argparse.ArgumentParser):
    """argparse with the documented usage exit code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


# ---------------------------------------------------------------------------
# configuration handling


def _require_keys(section, allowed, where):
    unknown = set(section) - set(allowed)
    if unknown:
        raise ConfigError(
            f"unknown {where} keys: {', '.join(sorted(unknown))}; "
            f"allowed: {', '.join(sorted(allowed))}"
        )


def load_config(path=None, overrides=None):
    """Merge defaults, an optional JSON file and flag overrides (flags win)."""
    config = json.loads(json.dumps(DEFAULT_CONFIG))  # deep copy
    if path is not None:
        try:
            with open(path) as handle:
                file_config = json.load(handle)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as err:
            raise ConfigError(f"config file {path} is not valid JSON: {err}") from None
        if not isinstance(file_config, dict):
            raise ConfigError("config file must hold a JSON object")
        _merge_config(config, file_config)
    if overrides:
        _merge_config(config, overrides)
    _validate_config(config)
    return config


def _merge_config(config, update):
    _require_keys(update, DEFAULT_CONFIG, "config")
    for key, value in update.items():
        if key in ("basis", "diagnostics") and isinstance(value, dict):
            _require_keys(
                value,
                _BASIS_KEYS if key == "basis" else {"threshold", "bins", "tolerance"},
                key,
            )
            config[key].update(value)
        elif key in ("discretize", "bootstrap") and isinstance(value, dict):
            allowed = (
                {"design", "bins"} if key == "discretize"
                else {"replications", "level", "weight_law", "seed"}
            )
            _require_keys(value, allowed, key)
            if config[key] is None:
                config[key] = {}
            config[key].update(value)
        else:
            config[key] = value


def _validate_config(config):
    if config["measure"] not in ("continuous", "counting"):
        raise ConfigError("measure must be 'continuous' or 'counting'")
    if not 0.0 < float(config["epsilon"]) < 0.5:
        raise ConfigError("epsilon must lie in (0, 0.5)")
    for key in ("grid_size", "mesh_size"):
        if int(config[key]) < 2:
            raise ConfigError(f"{key} must be >= 2")
    for key in ("x_quantiles", "p_levels"):
        values = config[key]
        if not values or not all(0.0 < float(t) < 1.0 for t in values):
            raise ConfigError(f"{key} must be a nonempty list inside (0, 1)")
    disc = config["discretize"]
    if disc is not None:
        if int(disc.get("design", 0)) not in (1, 2):
            raise ConfigError("discretize.design must be 1 or 2")
        if int(disc.get("bins", 0)) < 1:
            raise ConfigError("discretize.bins must be >= 1")
    boot = config["bootstrap"]
    if boot is not None:
        BootstrapConfig(
            replications=int(boot.get("replications", 250)),
            level=float(boot.get("level", 0.90)),
            weight_law=boot.get("weight_law", "exponential"),
        )


def _overrides_from_args(args):
    """Collect explicitly given flags into a config-shaped dict."""
    out = {}
    mapping = {
        "input": "input", "output": "output", "seed": "seed",
        "epsilon": "epsilon", "grid_size": "grid_size",
        "mesh_size": "mesh_size", "measure": "measure",
    }
    for attr, key in mapping.items():
        value = getattr(args, attr, None)
        if value is not None:
            out[key] = value
    basis = {}
    for part in _BASIS_KEYS:
        value = getattr(args, f"{part}_terms", None)
        if value is not None:
            basis[part] = [t.strip() for t in value.split(",") if t.strip()]
    if basis:
        out["basis"] = basis
    if getattr(args, "x_quantiles", None) is not None:
        out["x_quantiles"] = [float(t) for t in args.x_quantiles.split(",")]
    if getattr(args, "p_levels", None) is not None:
        out["p_levels"] = [float(t) for t in args.p_levels.split(",")]
    if getattr(args, "design", None) is not None or getattr(args, "bins", None) is not None:
        disc = {}
        if getattr(args, "design", None) is not None:
            disc["design"] = args.design
        if getattr(args, "bins", None) is not None:
            disc["bins"] = args.bins
        out["discretize"] = disc
    if getattr(args, "bootstrap", False) or getattr(args, "replications", None) is not None:
        boot = {}
        if getattr(args, "replications", None) is not None:
            boot["replications"] = args.replications
        if getattr(args, "band_level", None) is not None:
            boot["level"] = args.band_level
        out["bootstrap"] = boot
    diag = {}
    if getattr(args, "threshold", None) is not None:
        diag["threshold"] = args.threshold
    if getattr(args, "diag_bins", None) is not None:
        diag["bins"] = args.diag_bins
    if diag:
        out["diagnostics"] = diag
    return out


def _resolve_config(args):
    if getattr(args, "from_metadata", None):
        try:
            with open(args.from_metadata) as handle:
                metadata = json.load(handle)
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigError(f"cannot read metadata file: {err}") from None
        if "config" not in metadata:
            raise ConfigError("metadata file carries no 'config' entry")
        config = load_config(None, metadata["config"])
    else:
        config = load_config(getattr(args, "config", None))
    overrides = _overrides_from_args(args)
    if overrides:
        _merge_config(config, overrides)
        _validate_config(config)
    return config


# ---------------------------------------------------------------------------
# shared helpers


def _atomic_write(path, text):
    partial = f"{path}.partial"
    with open(partial, "w") as handle:
        handle.write(text)
    os.replace(partial, path)


def _write_metadata(config, outdir, command, elapsed):
    metadata = {
        "command": command,
        "version": __version__,
        "seed": config.get("seed"),
        "elapsed_seconds": round(elapsed, 3),
        "config": config,
    }
    _atomic_write(
        os.path.join(outdir, "metadata.json"), json.dumps(metadata, indent=2) + "\n"
    )


def _load_input(config):
    path = config.get("input")
    if not path:
        raise ConfigError("no input dataset given (config 'input' or --input)")
    data = read_dataset_csv(path)
    disc = config.get("discretize")
    if disc:
        fn = discretize_design1 if int(disc["design"]) == 1 else discretize_design2
        data = data.replace(z=fn(data.z, int(disc["bins"])))
    return data


def _make_estimator(config):
    basis = config["basis"]
    return StructuralFunctionEstimator(
        p_terms=tuple(basis["p"]),
        q_terms=tuple(basis["q"]),
        r_terms=tuple(basis["r"]),
        s_terms=tuple(basis["s"]),
        epsilon=float(config["epsilon"]),
        grid_size=int(config["grid_size"]),
        mesh_size=int(config["mesh_size"]),
        measure=config["measure"],
        x_quantiles=tuple(float(t) for t in config["x_quantiles"]),
        p_levels=tuple(float(t) for t in config["p_levels"]),
    )


def _diagnostic_bundle(first_stage, data, config):
    basis_cfg = config["basis"]
    diag_cfg = config["diagnostics"]
    threshold = float(diag_cfg["threshold"])
    bins = int(diag_cfg["bins"])
    vhat = first_stage.transform(data)
    from .design.basis import BasisSpec

    basis = BasisSpec(
        p_terms=tuple(basis_cfg["p"]), q_terms=tuple(basis_cfg["q"]),
        r_terms=tuple(basis_cfg["r"]), s_terms=tuple(basis_cfg["s"]),
    )
    bundle = {
        "moment": moment_matrix(data, basis, vhat),
        "profile_x": conditional_profile_x(
            data, basis_cfg["q"], vhat, n_bins=bins, threshold=threshold
        ),
        "profile_v": conditional_profile_v(
            data, basis_cfg["p"], vhat, n_bins=bins, threshold=threshold
        ),
        "triangular": triangular_profiles(
            first_stage, data, basis_cfg["p"], basis_cfg["q"],
            n_bins=bins, threshold=threshold,
        ),
        "propensity": None,
    }
    if set(np.unique(data.x)) <= {0.0, 1.0}:
        bundle["propensity"] = propensity_check(
            data, vhat, n_bins=bins, tolerance=float(diag_cfg["tolerance"])
        )
    return bundle


def _profile_rows(name, profile):
    rows = []
    in_set = set(profile.strong_set)
    for cell in profile.cells:
        rows.append(
            (
                name,
                cell.label,
                repr(cell.probability),
                repr(cell.min_eigenvalue),
                "1" if cell.label in in_set else "0",
            )
        )
    return rows


def _write_diagnostics(bundle, outdir):
    rows = [("profile", "cell", "probability", "lambda_min", "pass")]
    moment = bundle["moment"]
    rows.append(
        ("moment", "all", "1.0", repr(moment.min_eigenvalue),
         "1" if moment.rank_ok else "0")
    )
    rows.extend(_profile_rows("x-cells", bundle["profile_x"]))
    rows.extend(_profile_rows("v-cells", bundle["profile_v"]))
    rows.extend(_profile_rows("triangular-x", bundle["triangular"].by_x))
    rows.extend(_profile_rows("triangular-v", bundle["triangular"].by_v))
    if bundle["propensity"] is not None:
        for cell in bundle["propensity"].cells:
            rows.append(
                ("propensity", cell.label, repr(cell.probability),
                 repr(cell.variance), "1" if cell.ok else "0")
            )
    _atomic_write(
        os.path.join(outdir, "diagnostics.csv"),
        "\n".join(",".join(r) for r in rows) + "\n",
    )
    _atomic_write(os.path.join(outdir, "diagnostics.txt"), _render_report(bundle))


def _render_report(bundle):
    moment = bundle["moment"]
    lines = [
        "identification diagnostics",
        "==========================",
        f"moment matrix: dim {moment.matrix.shape[0]}, "
        f"min eigenvalue {moment.min_eigenvalue:.6g}, "
        f"condition {moment.condition_number:.6g}, "
        f"rank {'ok' if moment.rank_ok else 'FAIL'}",
        "",
    ]
    names = {
        "profile_x": "control moments within treatment cells",
        "profile_v": "treatment moments within control cells",
    }
    for key, title in names.items():
        profile = bundle[key]
        lines.append(f"{title} (threshold {profile.threshold:g}):")
        for cell in profile.cells:
            mark = "*" if cell.label in profile.strong_set else " "
            lines.append(
                f"  {mark} {cell.label:>12}  prob {cell.probability:7.4f}  "
                f"count {cell.count:6d}  lambda_min {cell.min_eigenvalue:12.6g}"
                f"{'' if cell.usable else '  (unusable: too few observations)'}"
            )
        lines.append(
            f"  strong set: {len(profile.strong_set)}/{len(profile.cells)} cells"
        )
        lines.append("")
    tri = bundle["triangular"]
    lines.append(
        "triangular reformulation: "
        f"x-set {len(tri.by_x.strong_set)}/{len(tri.by_x.cells)}, "
        f"v-set {len(tri.by_v.strong_set)}/{len(tri.by_v.cells)}, "
        f"identification {'ok' if tri.passes() else 'FAIL'}"
    )
    propensity = bundle["propensity"]
    if propensity is not None:
        lines.append("")
        lines.append(
            f"binary-treatment propensity check (tolerance {propensity.tolerance:g}): "
            f"{'pass' if propensity.passes else 'FAIL'}"
        )
        for cell in propensity.cells:
            mark = "*" if cell.ok else " "
            lines.append(
                f"  {mark} {cell.label:>12}  prob {cell.probability:7.4f}  "
                f"P(X=1|cell) {cell.propensity:7.4f}  Var {cell.variance:7.4f}"
            )
    lines.append("")
    return "\n".join(lines)


def _region_header(config, region, band_level=None):
    header = [
        "qrcontrol structural-function tables",
        f"version: {__version__}",
        f"epsilon: {region.epsilon!r}",
        f"measure: {region.mesh.measure}",
        f"seed: {config['seed']}",
    ]
    if band_level is not None:
        header.append(f"band_level: {band_level!r}")
    return header


# ---------------------------------------------------------------------------
# subcommands


def _cmd_estimate(args):
    config = _resolve_config(args)
    started = time.time()
    data = _load_input(config)
    outdir = config["output"]
    os.makedirs(outdir, exist_ok=True)

    estimator = _make_estimator(config)
    try:
        estimator.fit(data)
    except IdentificationError as err:
        # Report whatever the first stage can still tell us, then bail out.
        from .first_stage import ControlFunction

        cf = ControlFunction(
            s_terms=tuple(config["basis"]["s"]), r_terms=tuple(config["basis"]["r"]),
            epsilon=float(config["epsilon"]), grid_size=int(config["grid_size"]),
        )
        try:
            cf.fit(data.x, data.z, data.z1)
            _write_diagnostics(_diagnostic_bundle(cf, data, config), outdir)
        except QrControlError:
            pass
        _write_metadata(config, outdir, "estimate", time.time() - started)
        print(f"identification failure: {err}", file=sys.stderr)
        return EXIT_IDENTIFICATION

    bundle = _diagnostic_bundle(estimator.first_stage_, data, config)
    _write_diagnostics(bundle, outdir)
    identified = bundle["moment"].rank_ok and bundle["triangular"].passes()
    if not identified:
        _write_metadata(config, outdir, "estimate", time.time() - started)
        print(
            "identification failure: empty identification sets at threshold "
            f"{config['diagnostics']['threshold']}; see diagnostics.txt",
            file=sys.stderr,
        )
        return EXIT_IDENTIFICATION

    boot_cfg = config["bootstrap"]
    if boot_cfg:
        result = run_bootstrap(
            estimator,
            data,
            BootstrapConfig(
                replications=int(boot_cfg.get("replications", 250)),
                level=float(boot_cfg.get("level", 0.90)),
                weight_law=boot_cfg.get("weight_law", "exponential"),
                seed=int(boot_cfg.get("seed", config["seed"])),
            ),
        )
        region = result.region
        band_level = result.config.level
        if result.failed:
            print(
                f"note: {len(result.failed)} bootstrap replications failed",
                file=sys.stderr,
            )
    else:
        region = estimator.evaluate_region()
        band_level = None

    write_tables(
        [region.dsf, region.qsf, region.asf],
        os.path.join(outdir, "estimates.csv"),
        header=_region_header(config, region, band_level),
    )
    _write_metadata(config, outdir, "estimate", time.time() - started)
    print(f"wrote {os.path.join(outdir, 'estimates.csv')}")
    return EXIT_OK


def _cmd_diagnose(args):
    config = _resolve_config(args)
    data = _load_input(config)
    outdir = config["output"]
    os.makedirs(outdir, exist_ok=True)
    from .first_stage import ControlFunction

    cf = ControlFunction(
        s_terms=tuple(config["basis"]["s"]), r_terms=tuple(config["basis"]["r"]),
        epsilon=float(config["epsilon"]), grid_size=int(config["grid_size"]),
    ).fit(data.x, data.z, data.z1)
    bundle = _diagnostic_bundle(cf, data, config)
    _write_diagnostics(bundle, outdir)
    report = _render_report(bundle)
    print(report)
    return EXIT_OK


def _cmd_simulate(args):
    if args.preset not in available_presets():
        raise ConfigError(
            f"unknown preset {args.preset!r}; available: "
            + ", ".join(available_presets())
        )
    spec = make_preset(args.preset, seed=args.seed)
    data, truth = simulate(spec, args.n)
    outdir = os.path.dirname(os.path.abspath(args.output))
    os.makedirs(outdir, exist_ok=True)
    write_dataset_csv(data, args.output)
    print(f"wrote {args.output} ({data.n} rows, preset {args.preset!r})")
    if args.truth:
        from .structural import empirical_quantile

        x_grid = empirical_quantile(data.x, np.array([0.1, 0.3, 0.5, 0.7, 0.9]))
        rows = ["x,p,qsf,asf"]
        for x in x_grid:
            for p in (0.25, 0.5, 0.75):
                rows.append(
                    f"{x!r},{p!r},{truth.qsf(p, x)!r},{truth.asf(float(x))!r}"
                )
        _atomic_write(args.truth, "\n".join(rows) + "\n")
        print(f"wrote {args.truth}")
    return EXIT_OK


def _cmd_study(args):
    config = _resolve_config(args)
    started = time.time()
    data = _load_input(config)
    if np.unique(data.z).shape[0] < max(args.bins_list):
        raise DataError(
            "study requires a continuous (or at least finely valued) instrument"
        )
    outdir = config["output"]
    os.makedirs(outdir, exist_ok=True)

    def qsf_table(dataset):
        estimator = _make_estimator(config)
        estimator.fit(dataset)
        return estimator.evaluate_region().qsf

    benchmark = qsf_table(data)
    write_tables(
        [benchmark], os.path.join(outdir, "benchmark_qsf.csv"),
        header=["continuous-instrument benchmark"],
    )
    rows = [("design", "bins", "status", "sup_deviation")]
    for design in args.designs_list:
        fn = discretize_design1 if design == 1 else discretize_design2
        for bins in args.bins_list:
            try:
                coarse = data.replace(z=fn(data.z, bins))
                table = qsf_table(coarse)
                deviation = float(np.max(np.abs(table.values - benchmark.values)))
                rows.append((str(design), str(bins), "ok", repr(deviation)))
                write_tables(
                    [table],
                    os.path.join(outdir, f"qsf_design{design}_M{bins}.csv"),
                    header=[f"design {design}, M={bins}"],
                )
            except QrControlError as err:
                rows.append((str(design), str(bins), f"error: {err}", ""))
    _atomic_write(
        os.path.join(outdir, "study.csv"),
        "\n".join(",".join(r) for r in rows) + "\n",
    )
    _write_metadata(config, outdir, "study", time.time() - started)
    print(f"wrote {os.path.join(outdir, 'study.csv')}")
    return EXIT_OK


def _cmd_plotdata(args):
    estimates, header = read_tables(args.estimates)
    os.makedirs(args.output, exist_ok=True)
    for estimate in estimates:
        path = os.path.join(args.output, f"plot_{estimate.kind}.csv")
        write_tables(
            [estimate],
            path,
            header=[f"plot data for the {estimate.kind} table"] + header,
        )
        print(f"wrote {path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument wiring


def _add_common_estimation_flags(parser):
    parser.add_argument("--config", help="JSON configuration file")
    parser.add_argument("--from-metadata", help="re-run from a metadata.json")
    parser.add_argument("--input", help="input dataset CSV (y,x,z,z1)")
    parser.add_argument("--output", help="output directory")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--epsilon", type=float, help="trimming constant")
    parser.add_argument("--grid-size", dest="grid_size", type=int,
                        help="quantile grid resolution T")
    parser.add_argument("--mesh-size", dest="mesh_size", type=int,
                        help="outcome mesh resolution S")
    parser.add_argument("--measure", choices=["continuous", "counting"])
    for part, desc in (("p", "treatment"), ("q", "control"),
                       ("r", "covariate"), ("s", "instrument")):
        parser.add_argument(
            f"--{part}-terms", dest=f"{part}_terms",
            help=f"comma-separated {desc} basis terms",
        )
    parser.add_argument("--x-quantiles", dest="x_quantiles",
                        help="comma-separated treatment grid quantiles")
    parser.add_argument("--p-levels", dest="p_levels",
                        help="comma-separated quantile levels")
    parser.add_argument("--threshold", type=float,
                        help="identification eigenvalue threshold")
    parser.add_argument("--diag-bins", dest="diag_bins", type=int,
                        help="conditioning bins for diagnostics")


def build_parser():
    parser = _Parser(prog="qrcontrol", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="run the full estimation pipeline")
    _add_common_estimation_flags(est)
    est.add_argument("--design", type=int, choices=[1, 2],
                     help="discretize the instrument first (scheme 1 or 2)")
    est.add_argument("--bins", type=int, help="number of instrument bins")
    est.add_argument("--bootstrap", action="store_true",
                     help="compute weighted-bootstrap bands")
    est.add_argument("--replications", type=int, help="bootstrap replications")
    est.add_argument("--band-level", dest="band_level", type=float,
                     help="uniform band confidence level")
    est.set_defaults(func=_cmd_estimate)

    diag = sub.add_parser("diagnose", help="identification diagnostics only")
    _add_common_estimation_flags(diag)
    diag.set_defaults(func=_cmd_diagnose)

    sim = sub.add_parser("simulate", help="write a synthetic dataset")
    sim.add_argument("--preset", default="linear",
                     help="generating process name (see docs)")
    sim.add_argument("--n", type=int, default=1000, help="sample size")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--output", required=True, help="output CSV path")
    sim.add_argument("--truth", help="also write true QSF/ASF values here")
    sim.set_defaults(func=_cmd_simulate)

    study = sub.add_parser("study", help="instrument discretization study")
    _add_common_estimation_flags(study)
    study.add_argument("--designs", default="1,2",
                       help="comma-separated discretization schemes")
    study.add_argument("--bins-grid", dest="bins_grid", default="2,3,5,15",
                       help="comma-separated bin counts")
    study.set_defaults(func=_cmd_study)

    plot = sub.add_parser("plotdata", help="emit plot-ready tables")
    plot.add_argument("--estimates", required=True,
                      help="an estimates.csv written by `estimate`")
    plot.add_argument("--output", required=True, help="output directory")
    plot.set_defaults(func=_cmd_plotdata)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "designs"):
        args.designs_list = [int(d) for d in args.designs.split(",")]
        args.bins_list = [int(m) for m in args.bins_grid.split(",")]
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as err:
        print(f"data error: {err}", file=sys.stderr)
        return EXIT_DATA
    except InvalidInputError as err:
        print(f"invalid input: {err}", file=sys.stderr)
        return EXIT_DATA
    except IdentificationError as err:
        print(f"identification failure: {err}", file=sys.stderr)
        return EXIT_IDENTIFICATION
    except (ConvergenceError, BootstrapError) as err:
        print(f"numeric failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    except np.linalg.LinAlgError as err:
        print(f"numeric failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
