import argparse
import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from oracles import (OracleReport, ising_brute_force_z, tfim_energy_density_exact,
                     two_oscillator_reduced_spectrum)

from ..core.angular import coupling_matrix, half_chain_spectrum, wave_samples
from ..core.ctm import BOUNDARIES, CtmConfig, half_row_density, partition_function
from ..core.dmrg import run_infinite_dmrg
from ..core.errors import ContractViolation, LabError, UsageError
from ..core.infogeo import FAMILIES, ProbDist, alpha_divergence, fisher_matrix
from ..core.models import MODEL_BUILDERS, model_from_name
from ..core.qinfo import von_neumann_entropy
from ..settings import (
    ANGULAR_DEFAULTS,
    CLI_PROB_TOL,
    CTM_BRUTE_FORCE_MAX_SPINS,
    CTM_DEFAULTS,
    DEFAULT_SEED,
    DMRG_DEFAULTS,
    EXIT_NOT_CONVERGED,
    EXIT_NUMERIC,
    EXIT_OK,
    FD_STEP_GRADIENT,
    SPECTRUM_EXPORT_LIMIT,
)
from .output import write_csv, write_json

logger = logging.getLogger(__name__)

ORACLES = ("tfim-energy", "two-oscillator", "ising-z")
Z_CHECK_TOL = 1e-10


class LabArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that reports bad flags as UsageError (exit 64) instead of exiting with 2."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    out: str = None
    fmt: str = "json"
    seed: int = DEFAULT_SEED
    verbose: bool = False


# --- Parser ---
def _add_common(parser, formats=("json", "csv"), default_format="json"):
    parser.add_argument("--out", default=None, help="Output file (stdout when omitted)")
    parser.add_argument("--format", dest="fmt", choices=formats, default=default_format)
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Seed for every random start vector")
    parser.add_argument("--verbose", action="store_true", help="Debug logging")


def _add_model(parser):
    parser.add_argument("--model", choices=sorted(MODEL_BUILDERS), default=DMRG_DEFAULTS["model"])
    parser.add_argument("--g", type=float, default=DMRG_DEFAULTS["g"], help="Transverse field (tfim)")
    parser.add_argument("--jz", type=float, default=DMRG_DEFAULTS["jz"], help="Anisotropy (heisenberg)")
    parser.add_argument("--mass", type=float, default=DMRG_DEFAULTS["mass"], help="Oscillator mass (harmonic)")
    parser.add_argument("--d-levels", type=int, default=DMRG_DEFAULTS["d_levels"], help="Oscillator levels (harmonic)")
    parser.add_argument("--m-max", type=int, default=DMRG_DEFAULTS["m_max"], help="Retained block states")
    parser.add_argument("--iters", type=int, default=DMRG_DEFAULTS["iters"], help="Maximum iterations")
    parser.add_argument("--tol", type=float, default=DMRG_DEFAULTS["tol"], help="Energy-per-site tolerance")
    parser.add_argument("--targets", type=int, default=DMRG_DEFAULTS["targets"], help="Targeted superblock states")
    parser.add_argument("--weights", default=None, help="JSON array of target weights")


def build_parser():
    parser = LabArgumentParser(prog="dmrg-lab", description="DMRG and quantum-information workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    dmrg = sub.add_parser("dmrg", help="Run infinite-system DMRG")
    _add_model(dmrg)
    _add_common(dmrg)

    spectrum = sub.add_parser("spectrum", help="Truncation spectrum of every DMRG iteration")
    _add_model(spectrum)
    _add_common(spectrum, default_format="csv")

    infogeo = sub.add_parser("infogeo", help="Alpha-divergences and Fisher matrices")
    infogeo.add_argument("--p", default=None, help="JSON array")
    infogeo.add_argument("--q", default=None, help="JSON array")
    infogeo.add_argument("--alpha", type=float, default=0.0)
    infogeo.add_argument("--fisher", choices=sorted(FAMILIES), default=None)
    infogeo.add_argument("--theta", default=None, help="Parameter value or JSON array")
    _add_common(infogeo, formats=("json",))

    angular = sub.add_parser("angular", help="Angular-quantization wave and half-chain spectrum")
    angular_sub = angular.add_subparsers(dest="action", required=True)
    wave = angular_sub.add_parser("wave", help="Samples of K_{i ell}(mass x)")
    wave.add_argument("--ell", type=float, default=ANGULAR_DEFAULTS["ell"])
    wave.add_argument("--mass", type=float, default=ANGULAR_DEFAULTS["mass"])
    wave.add_argument("--xmin", type=float, default=ANGULAR_DEFAULTS["xmin"])
    wave.add_argument("--xmax", type=float, default=ANGULAR_DEFAULTS["xmax"])
    wave.add_argument("--n", type=int, default=ANGULAR_DEFAULTS["n"])
    _add_common(wave, default_format="csv")
    half = angular_sub.add_parser("spectrum", help="Gaussian half-chain entanglement spectrum")
    half.add_argument("--n", type=int, default=ANGULAR_DEFAULTS["sites"])
    half.add_argument("--cut", type=int, default=ANGULAR_DEFAULTS["cut"])
    half.add_argument("--mass", type=float, default=ANGULAR_DEFAULTS["mass"])
    half.add_argument("--modes", type=int, default=None,
                      help=f"Normal modes kept (default min({ANGULAR_DEFAULTS['modes']}, --cut))")
    half.add_argument("--cutoff", type=int, default=ANGULAR_DEFAULTS["cutoff"])
    _add_common(half, formats=("json",))

    ctm = sub.add_parser("ctm", help="Corner transfer matrix of a small Ising lattice")
    ctm.add_argument("--L", dest="half_width", type=int, default=CTM_DEFAULTS["L"])
    ctm.add_argument("--beta-j", type=float, default=CTM_DEFAULTS["beta_j"])
    ctm.add_argument("--boundary", choices=BOUNDARIES, default=CTM_DEFAULTS["boundary"])
    _add_common(ctm)

    oracle = sub.add_parser("oracle", help="Evaluate a reference oracle")
    oracle.add_argument("--name", choices=ORACLES, required=True)
    oracle.add_argument("--g", type=float, default=DMRG_DEFAULTS["g"])
    oracle.add_argument("--mass", type=float, default=DMRG_DEFAULTS["mass"])
    oracle.add_argument("--L", dest="half_width", type=int, default=CTM_DEFAULTS["L"])
    oracle.add_argument("--beta-j", type=float, default=CTM_DEFAULTS["beta_j"])
    oracle.add_argument("--boundary", choices=BOUNDARIES, default=CTM_DEFAULTS["boundary"])
    _add_common(oracle, formats=("json",))
    return parser


def parse_config(argv=None):
    """
    Parses and validates flags into a RunConfig.

    Raises:
        UsageError: unknown flags or values outside their valid range.
    """
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    config = RunConfig(
        command=command,
        out=args.pop("out"),
        fmt=args.pop("fmt"),
        seed=args.pop("seed"),
        verbose=args.pop("verbose"),
        params=args,
    )
    VALIDATORS[command](config.params)
    return config


# --- Validation ---
def _require(condition, message):
    if not condition:
        raise UsageError(message)


def _parse_json_array(text, flag):
    try:
        value = json.loads(text)
    except (TypeError, json.JSONDecodeError):
        raise UsageError(f"{flag} must be a JSON array, got {text!r}") from None
    if isinstance(value, (int, float)):
        value = [value]
    _require(isinstance(value, list) and all(isinstance(v, (int, float)) for v in value),
             f"{flag} must be a JSON array of numbers")
    return [float(v) for v in value]


def _require_finite(p, *keys):
    for key in keys:
        _require(math.isfinite(p[key]), f"--{key.replace('_', '-')} must be finite, got {p[key]}")


def _validate_dmrg(p):
    _require_finite(p, "g", "jz", "mass", "tol")
    _require(p["m_max"] >= 1, f"--m-max must be >= 1, got {p['m_max']}")
    _require(p["iters"] >= 1, f"--iters must be >= 1, got {p['iters']}")
    _require(p["tol"] > 0, f"--tol must be > 0, got {p['tol']}")
    _require(p["d_levels"] >= 2, f"--d-levels must be >= 2, got {p['d_levels']}")
    _require(p["mass"] >= 0, f"--mass must be >= 0, got {p['mass']}")
    _require(p["targets"] >= 1, f"--targets must be >= 1, got {p['targets']}")
    d = p["d_levels"] if p["model"] == "harmonic" else 2
    _require(p["targets"] <= d * d, f"--targets must be <= {d * d} for model {p['model']}")
    if p["weights"] is not None:
        weights = _parse_json_array(p["weights"], "--weights")
        _require(len(weights) == p["targets"], f"--weights needs {p['targets']} entries")
        _require(all(w > 0 for w in weights), "--weights must be positive")
        _require(abs(sum(weights) - 1.0) <= 1e-12, "--weights must sum to 1")
        p["weights"] = weights


def _validate_infogeo(p):
    if p["fisher"] is not None:
        _require(p["theta"] is not None, "--fisher needs --theta")
        theta = _parse_json_array(p["theta"], "--theta")
        family = FAMILIES[p["fisher"]]()
        _require(len(theta) == family.n_params, f"--theta needs {family.n_params} values for {p['fisher']}")
        _require(all(FD_STEP_GRADIENT < t < 1.0 - FD_STEP_GRADIENT for t in theta), "--theta must lie in (0, 1)")
        p["theta"] = theta
        return
    _require(p["p"] is not None and p["q"] is not None, "infogeo needs --p and --q, or --fisher")
    values = {}
    for key in ("p", "q"):
        try:
            values[key] = ProbDist(_parse_json_array(p[key], f"--{key}"), tol=CLI_PROB_TOL)
        except ContractViolation as exc:
            raise UsageError(f"--{key}: {exc.detail}") from None
    _require(len(values["p"]) == len(values["q"]), "--p and --q must have the same length")
    _require(math.isfinite(p["alpha"]), "--alpha must be finite")
    p.update(values)


def _validate_angular(p):
    if p["action"] == "wave":
        _require_finite(p, "ell", "mass", "xmin", "xmax")
        _require(p["ell"] >= 0, f"--ell must be >= 0, got {p['ell']}")
        _require(p["mass"] > 0, f"--mass must be > 0, got {p['mass']}")
        _require(0 < p["xmin"] < p["xmax"], "need 0 < --xmin < --xmax")
        _require(p["n"] >= 2, f"--n must be >= 2, got {p['n']}")
    else:
        _require(p["n"] >= 2, f"--n must be >= 2, got {p['n']}")
        _require(1 <= p["cut"] < p["n"], f"--cut must lie in [1, {p['n'] - 1}]")
        if p["modes"] is None:
            p["modes"] = min(ANGULAR_DEFAULTS["modes"], p["cut"])
        _require(1 <= p["modes"] <= p["cut"], "--modes must lie in [1, --cut]")
        _require(p["cutoff"] >= 0, "--cutoff must be >= 0")
        _require_finite(p, "mass")
        _require(p["mass"] >= 0, f"--mass must be >= 0, got {p['mass']}")


def _validate_ctm(p):
    # CtmConfig enforces the size guard (SizeGuardError, exit 64)
    p["config"] = CtmConfig(half_width=p["half_width"], beta_j=p["beta_j"], boundary=p["boundary"])


def _validate_oracle(p):
    _require_finite(p, "g", "mass")
    if p["name"] == "two-oscillator":
        _require(p["mass"] > 0, "--mass must be > 0")
    elif p["name"] == "tfim-energy":
        _require(p["g"] >= 0, "--g must be >= 0")
    else:
        _validate_ctm(p)


VALIDATORS = {
    "dmrg": _validate_dmrg,
    "spectrum": _validate_dmrg,
    "infogeo": _validate_infogeo,
    "angular": _validate_angular,
    "ctm": _validate_ctm,
    "oracle": _validate_oracle,
}


# --- Commands ---
def _run_dmrg(config):
    p = config.params
    model = model_from_name(p["model"], g=p["g"], jz=p["jz"], mass=p["mass"], d_levels=p["d_levels"])
    result = run_infinite_dmrg(model, p["m_max"], p["iters"], p["tol"], seed=config.seed,
                               n_targets=p["targets"], weights=p["weights"])
    return model, result


def cmd_dmrg(config):
    model, result = _run_dmrg(config)
    p = config.params
    if config.fmt == "csv":
        rows = []
        for k in range(result.iterations):
            per_site = result.energy_per_site_trace[k - 1] if k >= 1 else ""
            rows.append([k + 1, result.superblock_sites[k], result.energy_trace[k], per_site,
                         result.entropy_trace[k], result.discarded_trace[k]])
        write_csv(["iteration", "sites", "energy", "energy_per_site", "entropy", "discarded_weight"],
                  rows, config.out)
    else:
        write_json({
            "command": "dmrg",
            "model": model.name,
            "params": model.params,
            "m_max": result.m_max,
            "targets": p["targets"],
            "seed": config.seed,
            "iterations": result.iterations,
            "energy_trace": result.energy_trace,
            "energy_per_site_trace": result.energy_per_site_trace,
            "energy_per_site": result.energy_per_site,
            "entropy_trace": result.entropy_trace,
            "discarded_trace": result.discarded_trace,
            "converged": result.converged,
            "final_spectrum": result.final_spectrum.to_dict(limit=SPECTRUM_EXPORT_LIMIT),
        }, config.out)
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def cmd_spectrum(config):
    model, result = _run_dmrg(config)
    if config.fmt == "csv":
        rows = [[k + 1, i, value]
                for k, report in enumerate(result.reports)
                for i, value in enumerate(report.kept_eigenvalues[:SPECTRUM_EXPORT_LIMIT])]
        write_csv(["iteration", "index", "eigenvalue"], rows, config.out)
    else:
        write_json({
            "command": "spectrum",
            "model": model.name,
            "params": model.params,
            "converged": result.converged,
            "iterations": [{"iteration": k + 1, **report.to_dict(limit=SPECTRUM_EXPORT_LIMIT)}
                           for k, report in enumerate(result.reports)],
        }, config.out)
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def cmd_infogeo(config):
    p = config.params
    if p["fisher"] is not None:
        family = FAMILIES[p["fisher"]]()
        g = fisher_matrix(family, np.array(p["theta"]))
        write_json({"command": "infogeo", "family": p["fisher"], "theta": p["theta"],
                    "fisher_matrix": g}, config.out)
    else:
        value = alpha_divergence(p["p"], p["q"], p["alpha"])
        write_json({"command": "infogeo", "alpha": p["alpha"], "divergence": value}, config.out)
    return EXIT_OK


def cmd_angular(config):
    p = config.params
    if p["action"] == "wave":
        samples = wave_samples(p["ell"], p["mass"], p["xmin"], p["xmax"], p["n"])
        if config.fmt == "csv":
            write_csv(["x", "value"], [[s.x, s.value] for s in samples], config.out)
        else:
            write_json({"command": "angular wave", "ell": p["ell"], "mass": p["mass"],
                        "x": [s.x for s in samples], "value": [s.value for s in samples]}, config.out)
    else:
        chain = coupling_matrix(p["n"], p["mass"])
        spectrum = half_chain_spectrum(chain, p["cut"], n_modes=p["modes"], cutoff=p["cutoff"])
        write_json({"command": "angular spectrum", "n": p["n"], "cut": p["cut"], "mass": p["mass"],
                    **spectrum.to_dict(limit=SPECTRUM_EXPORT_LIMIT)}, config.out)
    return EXIT_OK


def cmd_ctm(config):
    cfg = config.params["config"]
    z = partition_function(cfg)
    rho = half_row_density(cfg)
    spectrum = rho.spectrum()
    check, z_brute = "skipped", None
    if cfg.total_spins <= CTM_BRUTE_FORCE_MAX_SPINS:
        z_brute = ising_brute_force_z(cfg)
        check = "pass" if abs(z - z_brute) <= Z_CHECK_TOL * abs(z_brute) else "fail"
    if config.fmt == "csv":
        rows = [[i, float(v), math.log(v) if v > 0 else -math.inf]
                for i, v in enumerate(spectrum[:SPECTRUM_EXPORT_LIMIT])]
        write_csv(["index", "eigenvalue", "ln_eigenvalue"], rows, config.out)
    else:
        write_json({"command": "ctm", "L": cfg.half_width, "beta_j": cfg.beta_j, "boundary": cfg.boundary,
                    "Z": z, "Z_bruteforce": z_brute, "check_z_bruteforce": check,
                    "entropy": von_neumann_entropy(rho),
                    "spectrum": spectrum[:SPECTRUM_EXPORT_LIMIT]}, config.out)
    if check == "fail":
        logger.error("Tr(A^4) = %.12e disagrees with enumeration %.12e", z, z_brute)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_oracle(config):
    p = config.params
    if p["name"] == "tfim-energy":
        report = OracleReport("tfim_energy_density_exact", {"g": p["g"]}, tfim_energy_density_exact(p["g"]), 1e-12)
    elif p["name"] == "two-oscillator":
        report = OracleReport("two_oscillator_reduced_spectrum", {"mass": p["mass"]},
                              two_oscillator_reduced_spectrum(p["mass"]), 0.0)
    else:
        cfg = p["config"]
        report = OracleReport("ising_brute_force_z",
                              {"L": cfg.half_width, "beta_j": cfg.beta_j, "boundary": cfg.boundary},
                              ising_brute_force_z(cfg), 0.0)
    write_json({"command": "oracle", **{k: v for k, v in report.to_dict().items() if k != "schema"}}, config.out)
    return EXIT_OK


HANDLERS = {
    "dmrg": cmd_dmrg,
    "spectrum": cmd_spectrum,
    "infogeo": cmd_infogeo,
    "angular": cmd_angular,
    "ctm": cmd_ctm,
    "oracle": cmd_oracle,
}


def main(argv=None):
    """
    Command-line entry point.

    Returns:
        Exit code: 0 success, 1 numeric failure or unwritable output,
        2 DMRG not converged (output written), 64 usage error.
    """
    try:
        config = parse_config(argv)
    except LabError as exc:
        logger.error("%s", exc.detail)
        return exc.exit_code
    if config.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    logger.debug("Running %s with %s", config.command, config.params)
    try:
        return HANDLERS[config.command](config)
    except LabError as exc:
        logger.error("%s failed: %s", config.command, exc.detail)
        return exc.exit_code
    except (np.linalg.LinAlgError, OSError) as exc:
        logger.error("%s failed: %s", config.command, exc)
        return EXIT_NUMERIC
