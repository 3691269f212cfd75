"""Config-driven command line front end with bit-stable tabular output.

Subcommands: verify (one theorem row per channel), phase (continuous
phase-shift samples along the standard sweep paths), spectrum (bound-state
census rows), sweep-family (long-format parameter sweep for plotting).

Numbers are emitted in the units the config states; the mass and matching
radius scales are recorded in the output metadata. Floats are written with
repr, the shortest string that parses back to the same double (at most 17
significant digits), so identical configs produce byte-identical files.
Exit codes: 0 when every row is VERIFIED or CRITICAL_AMBIGUOUS, 2 on config
errors, 3 on an unsupported regime, 4 when any row is VIOLATED.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import yaml

from . import radial, scattering, spectrum
from .errors import ConfigError, DomainError, UnsupportedRegime
from .levinson import RESIDUAL_TOL, Classification, verify
from .potentials import PotentialModel, PowerTail, cutoff_view
from .radial import MatchRatio

SCHEMA_VERSION = "1"

log = logging.getLogger("levinson2d.cli")

_TOP_KEYS = {"potential", "M", "j_list", "lambda_grid", "E_grid",
             "tolerances", "output", "seed", "family"}
_TOL_KEYS = {"tol_E", "tol_half", "residual_tol", "rtol", "atol"}

_EXIT_BY_CLASS = {Classification.VIOLATED: 4,
                  Classification.UNSUPPORTED_REGIME: 3}


def _fail(name: str, msg: str):
    raise ConfigError(f"{name}: {msg}")


def _number(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(name, f"expected a number, got {value!r}")
    v = float(value)
    if not math.isfinite(v):
        _fail(name, "must be finite")
    return v


def _positive(value, name: str) -> float:
    v = _number(value, name)
    if v <= 0:
        _fail(name, f"must be positive, got {value!r}")
    return v


def _count(value, name: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(name, f"expected an integer, got {value!r}")
    if value < minimum:
        _fail(name, f"must be >= {minimum}, got {value}")
    return value


def _half_integer(value, name: str) -> float:
    v = _number(value, name)
    two_j = 2.0 * v
    if abs(two_j - round(two_j)) > 1e-9 or round(two_j) % 2 == 0 or v == 0:
        _fail(name, f"entries must be half odd integers (-1/2, 1/2, 3/2, ...), got {value!r}")
    return v


# ------------------------------------------------------------- run config

@dataclass(frozen=True)
class RunConfig:
    """Validated run parameters; `raw` keeps the loaded mapping for echoing."""

    potential: PotentialModel
    M: float
    j_list: tuple
    n_lambda: int
    side: str
    n_k: int
    k_anchor_x: float
    k_min_x: float
    tol_E: object
    tol_half: float
    residual_tol: float
    rtol: float
    atol: float
    out_format: object
    out_path: object
    seed: int
    family: object
    raw: dict


def build_potential(block) -> PotentialModel:
    if not isinstance(block, dict):
        _fail("potential", "must be a mapping with kind/r0/params")
    unknown = sorted(set(block) - {"kind", "r0", "params", "tail"})
    if unknown:
        _fail("potential", f"unknown key(s) {', '.join(unknown)}")
    kind = block.get("kind")
    if kind is None:
        _fail("potential.kind", "missing")
    if kind == "custom":
        _fail("potential.kind", "custom closures are library-only, not configurable")
    if kind not in ("square_well", "piecewise_linear", "sampled_table"):
        _fail("potential.kind", f"unknown kind {kind!r}")
    r0 = _positive(block.get("r0", 1.0), "potential.r0")
    raw_params = block.get("params")
    if kind == "square_well":
        if not isinstance(raw_params, (list, tuple)) or len(raw_params) != 1:
            _fail("potential.params", "square_well takes [V0]")
        params = (_number(raw_params[0], "potential.params[0]"),)
    else:
        if not isinstance(raw_params, (list, tuple)) or not raw_params:
            _fail("potential.params", f"{kind} takes a list of [r, V] nodes")
        nodes = []
        for i, node in enumerate(raw_params):
            if not isinstance(node, (list, tuple)) or len(node) != 2:
                _fail(f"potential.params[{i}]", "each node is a [r, V] pair")
            nodes.append((_number(node[0], f"potential.params[{i}][0]"),
                          _number(node[1], f"potential.params[{i}][1]")))
        params = tuple(nodes)
    tail = None
    tail_block = block.get("tail")
    if tail_block is not None:
        if not isinstance(tail_block, dict) or "b" not in tail_block:
            _fail("potential.tail", "must be a mapping with at least b")
        unknown = sorted(set(tail_block) - {"b", "n", "r_stop"})
        if unknown:
            _fail("potential.tail", f"unknown key(s) {', '.join(unknown)}")
        b = _number(tail_block["b"], "potential.tail.b")
        n = _number(tail_block.get("n", 2.0), "potential.tail.n")
        r_stop = tail_block.get("r_stop", math.inf)
        if r_stop != math.inf:
            r_stop = _positive(r_stop, "potential.tail.r_stop")
        try:
            tail = PowerTail(b, n, r_stop)
        except (ConfigError, DomainError) as exc:
            _fail("potential.tail", str(exc))
    try:
        return PotentialModel(kind=kind, r0=r0, params=params, tail=tail)
    except (ConfigError, DomainError) as exc:
        _fail("potential", str(exc))


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"config: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"config: invalid YAML ({exc})") from None
    if not isinstance(raw, dict):
        _fail("config", "top level must be a mapping")
    unknown = sorted(set(raw) - _TOP_KEYS)
    if unknown:
        _fail("config", f"unknown key(s) {', '.join(unknown)}")

    potential = build_potential(raw.get("potential"))
    M = _positive(raw.get("M", 1.0), "M")

    j_raw = raw.get("j_list")
    if not isinstance(j_raw, (list, tuple)) or not j_raw:
        _fail("j_list", "must be a non-empty list of half odd integers")
    j_list = tuple(_half_integer(j, "j_list") for j in j_raw)

    lam_block = raw.get("lambda_grid") or {}
    if not isinstance(lam_block, dict):
        _fail("lambda_grid", "must be a mapping")
    if set(lam_block) - {"count"}:
        _fail("lambda_grid", "only count is configurable")
    n_lambda = _count(lam_block.get("count", 17), "lambda_grid.count", 2)

    e_block = raw.get("E_grid") or {}
    if not isinstance(e_block, dict):
        _fail("E_grid", "must be a mapping")
    if set(e_block) - {"side", "count", "k_anchor_x", "k_min_x"}:
        _fail("E_grid", "keys are side, count, k_anchor_x, k_min_x")
    side = e_block.get("side", "both")
    if side not in ("plus", "minus", "both"):
        _fail("E_grid.side", f"must be plus, minus, or both, got {side!r}")
    n_k = _count(e_block.get("count", 10), "E_grid.count", 1)
    k_anchor_x = _positive(e_block.get("k_anchor_x", scattering.K_ANCHOR_X),
                           "E_grid.k_anchor_x")
    k_min_x = _positive(e_block.get("k_min_x", scattering.K_MIN_X),
                        "E_grid.k_min_x")
    if k_min_x > scattering.WINDOW_X:
        _fail("E_grid.k_min_x", f"must lie in (0, {scattering.WINDOW_X}] "
              "so the extrapolation window is reached")
    if k_anchor_x <= 8.0 * k_min_x:
        _fail("E_grid.k_anchor_x", "must sit above 8 * k_min_x")

    tol_block = raw.get("tolerances") or {}
    if not isinstance(tol_block, dict):
        _fail("tolerances", "must be a mapping")
    unknown = sorted(set(tol_block) - _TOL_KEYS)
    if unknown:
        _fail("tolerances", f"unknown key(s) {', '.join(unknown)}")
    tol_E = tol_block.get("tol_E")
    if tol_E is not None:
        tol_E = _positive(tol_E, "tolerances.tol_E")
    tol_half = _positive(tol_block.get("tol_half", spectrum.TOL_HALF),
                         "tolerances.tol_half")
    residual_tol = _positive(tol_block.get("residual_tol", RESIDUAL_TOL),
                             "tolerances.residual_tol")
    rtol = _positive(tol_block.get("rtol", radial.RTOL), "tolerances.rtol")
    atol = _positive(tol_block.get("atol", radial.ATOL), "tolerances.atol")

    out_block = raw.get("output") or {}
    if not isinstance(out_block, dict):
        _fail("output", "must be a mapping")
    if set(out_block) - {"format", "path"}:
        _fail("output", "keys are format and path")
    out_format = out_block.get("format")
    if out_format is not None and out_format not in ("csv", "json"):
        _fail("output.format", f"must be csv or json, got {out_format!r}")
    out_path = out_block.get("path")
    if out_path is not None and not isinstance(out_path, str):
        _fail("output.path", "must be a string path")

    seed = raw.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        _fail("seed", f"must be an integer, got {seed!r}")

    family = raw.get("family")
    if family is not None:
        if not isinstance(family, dict):
            _fail("family", "must be a mapping")
        unknown = sorted(set(family) - {"parameter", "start", "stop", "count"})
        if unknown:
            _fail("family", f"unknown key(s) {', '.join(unknown)}")
        if family.get("parameter") not in ("V0", "b"):
            _fail("family.parameter", "must be V0 or b")
        family = {
            "parameter": family["parameter"],
            "start": _number(family.get("start"), "family.start"),
            "stop": _number(family.get("stop"), "family.stop"),
            "count": _count(family.get("count"), "family.count", 0),
        }

    return RunConfig(
        potential=potential, M=M, j_list=j_list,
        n_lambda=n_lambda, side=side, n_k=n_k,
        k_anchor_x=k_anchor_x, k_min_x=k_min_x,
        tol_E=tol_E, tol_half=tol_half, residual_tol=residual_tol,
        rtol=rtol, atol=atol,
        out_format=out_format, out_path=out_path,
        seed=seed, family=family, raw=raw)


# ---------------------------------------------------------------- runners

def _fan_out(fn, items, threads: int) -> list:
    """Apply fn to every item; joins in input order regardless of threads."""
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _verify_row(report) -> dict:
    eta = report.metadata["eta"]
    return {
        "j": report.j,
        "n": report.n_j,
        "half_bound": report.half_bound.value,
        "correction": report.correction,
        "lhs": report.lhs,
        "tail_offset": report.tail_offset,
        "residual": report.residual,
        "classification": report.classification.value,
        "eta_plus": eta["plus"]["raw"],
        "eta_minus": eta["minus"]["raw"],
        "routes_agree": report.metadata["routes_agree"],
    }


_VERIFY_COLUMNS = ["j", "n", "half_bound", "correction", "lhs", "tail_offset",
                   "residual", "classification", "eta_plus", "eta_minus",
                   "routes_agree"]


def run_verify(cfg: RunConfig, threads: int):
    def one(j):
        log.info("verify j=%g", j)
        return verify(cfg.potential, j, cfg.M, residual_tol=cfg.residual_tol,
                      tol_half=cfg.tol_half, rtol=cfg.rtol, atol=cfg.atol)

    reports = _fan_out(one, cfg.j_list, threads)
    code = max((_EXIT_BY_CLASS.get(r.classification, 0) for r in reports),
               default=0)
    return _VERIFY_COLUMNS, [_verify_row(r) for r in reports], code


_PHASE_COLUMNS = ["j", "lam", "E", "k", "tan_eta", "eta"]


def run_phase(cfg: RunConfig, threads: int):
    sides = {"plus": (+1.0,), "minus": (-1.0,), "both": (+1.0, -1.0)}[cfg.side]
    work = [(j, s) for j in cfg.j_list for s in sides]

    def one(item):
        j, side = item
        log.info("phase sweep j=%g side=%+g", j, side)
        # negative channels ride the reflected problem toward the mirror edge
        pot, jj, flip = ((cfg.potential, j, 1.0) if j > 0
                         else (cfg.potential.negated(), -j, -1.0))
        pot = cutoff_view(pot)
        path = scattering.threshold_path(
            jj, cfg.M, pot.r0, side * flip,
            k_anchor_x=cfg.k_anchor_x, k_min_x=cfg.k_min_x,
            n_lambda=cfg.n_lambda, n_k=cfg.n_k)
        rec = scattering.phase_sweep(pot, jj, cfg.M, path,
                                     rtol=cfg.rtol, atol=cfg.atol)
        return [{"j": j, "lam": sm.lam, "E": flip * sm.E, "k": sm.k,
                 "tan_eta": sm.tan_eta, "eta": sm.eta}
                for sm in rec.samples]

    chunks = _fan_out(one, work, threads)
    return _PHASE_COLUMNS, [row for chunk in chunks for row in chunk], 0


_SPECTRUM_COLUMNS = ["j", "n", "half_bound", "bound_energies",
                     "method_direct", "method_sweep", "method_agreement"]

_HALF_SWAP = {"at_plus_M": "at_minus_M", "at_minus_M": "at_plus_M",
              "none": "none"}


def run_spectrum(cfg: RunConfig, threads: int):
    def one(j):
        log.info("spectrum census j=%g", j)
        pot, jj = (cfg.potential, j) if j > 0 else (cfg.potential.negated(), -j)
        rep = spectrum.spectrum_report(pot, jj, cfg.M, tol_E=cfg.tol_E,
                                       tol_half=cfg.tol_half,
                                       rtol=cfg.rtol, atol=cfg.atol)
        half = rep.half_bound.value
        energies = list(rep.bound_energies)
        if j < 0:
            half = _HALF_SWAP[half]
            energies = sorted(-e for e in energies)
        agree = rep.method_agreement
        return {"j": j, "n": rep.n_j, "half_bound": half,
                "bound_energies": energies,
                "method_direct": agree.direct, "method_sweep": agree.sweep,
                "method_agreement": agree.equal}

    return _SPECTRUM_COLUMNS, _fan_out(one, cfg.j_list, threads), 0


_FAMILY_COLUMNS = ["j", "parameter", "value", "series", "y"]


def _with_family_value(potential: PotentialModel, parameter: str,
                       value: float) -> PotentialModel:
    if parameter == "V0":
        if potential.kind != "square_well":
            _fail("family.parameter", "V0 sweeps need a square_well core")
        return dataclasses.replace(potential, params=(value,))
    tail = potential.tail
    n = tail.n if tail is not None else 2.0
    r_stop = tail.r_stop if tail is not None else math.inf
    return dataclasses.replace(potential, tail=PowerTail(value, n, r_stop))


def _edge_ratios(potential: PotentialModel, j: float, M: float,
                 rtol: float, atol: float):
    """Full-coupling interior match ratios at the two gap edges."""
    if j > 0:
        pot, jj, swap = potential, j, False
    else:
        # component swap: A_{-j}(E, V) = cot(theta_j(-E, -V))
        pot, jj, swap = potential.negated(), -j, True
    th = radial.interior_theta(cutoff_view(pot), jj, M,
                               [(M, 1.0), (-M, 1.0)], rtol=rtol, atol=atol)
    a_plus = MatchRatio.from_theta(float(th[0]))
    a_minus = MatchRatio.from_theta(float(th[1]))
    if swap:
        a_plus, a_minus = (MatchRatio.from_theta(math.pi / 2.0 - float(th[1])),
                           MatchRatio.from_theta(math.pi / 2.0 - float(th[0])))
    return a_plus.value, a_minus.value


def run_family(cfg: RunConfig, threads: int):
    if cfg.family is None:
        _fail("family", "sweep-family needs a family block")
    parameter = cfg.family["parameter"]
    values = [float(v) for v in np.linspace(cfg.family["start"],
                                            cfg.family["stop"],
                                            cfg.family["count"])]
    work = [(j, v) for j in cfg.j_list for v in values]

    def one(item):
        j, value = item
        log.info("family point j=%g %s=%g", j, parameter, value)
        pot = _with_family_value(cfg.potential, parameter, value)
        rep = verify(pot, j, cfg.M, residual_tol=cfg.residual_tol,
                     tol_half=cfg.tol_half, rtol=cfg.rtol, atol=cfg.atol)
        eta = rep.metadata["eta"]
        a_plus, a_minus = _edge_ratios(pot, j, cfg.M, cfg.rtol, cfg.atol)
        head = {"j": j, "parameter": parameter, "value": value}
        rows = [
            dict(head, series="n", y=float(rep.n_j)),
            dict(head, series="eta_plus_over_pi", y=eta["plus"]["raw"] / math.pi),
            dict(head, series="eta_minus_over_pi", y=eta["minus"]["raw"] / math.pi),
            dict(head, series="A_plus", y=a_plus),
            dict(head, series="A_minus", y=a_minus),
        ]
        return rows, _EXIT_BY_CLASS.get(rep.classification, 0)

    results = _fan_out(one, work, threads)
    code = max((c for _, c in results), default=0)
    return _FAMILY_COLUMNS, [row for chunk, _ in results for row in chunk], code


_RUNNERS = {"verify": run_verify, "phase": run_phase,
            "spectrum": run_spectrum, "sweep-family": run_family}


# ------------------------------------------------------------------ output

def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        # normalizes numpy scalars too; they subclass float but repr differently
        return repr(float(value))
    if isinstance(value, (list, tuple)):
        return ";".join(repr(float(v)) for v in value)
    return str(value)


def write_csv(path: str, columns, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row[c]) for c in columns])


def _json_safe(value):
    """Strict JSON has no Infinity/NaN; map non-finite floats to null."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def write_json(path: str, document: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(_json_safe(document), fh, indent=2, sort_keys=True,
                  allow_nan=False)
        fh.write("\n")


def _document(command: str, cfg: RunConfig, rows) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "config_echo": cfg.raw,
        "rows": rows,
        "metadata": {
            "command": command,
            "M": cfg.M,
            "r0": cfg.potential.r0,
            "units": "energies in units of the configured M, lengths in units of r0",
            "seed": cfg.seed,
            "tolerances": {"tol_E": cfg.tol_E, "tol_half": cfg.tol_half,
                           "residual_tol": cfg.residual_tol,
                           "rtol": cfg.rtol, "atol": cfg.atol},
        },
    }


# -------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="levinson2d",
        description="Bound-state counts and threshold phase shifts for the "
                    "planar Dirac equation: verify the phase-count relation, "
                    "sample phase sweeps, run the census, or sweep a family.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
            ("verify", "one theorem row per channel j"),
            ("phase", "continuous (j, lambda, E, k, tan eta, eta) samples"),
            ("spectrum", "bound-state census rows"),
            ("sweep-family", "long-format parameter sweep for plotting")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, help="YAML run config")
        p.add_argument("--out", default=None,
                       help="output path (overrides output.path)")
        p.add_argument("--format", choices=("csv", "json"), default=None,
                       help="output format (overrides output.format)")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads; join order stays deterministic")
        p.add_argument("--log-level", default="warning",
                       choices=("debug", "info", "warning", "error"))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr,
                        level=getattr(logging, args.log_level.upper()),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        out_format = args.format or cfg.out_format or "csv"
        out_path = args.out or cfg.out_path
        if out_path is None:
            _fail("output.path", "no output path given (config or --out)")
        columns, rows, code = _RUNNERS[args.command](cfg, max(1, args.threads))
        if out_format == "csv":
            write_csv(out_path, columns, rows)
        else:
            write_json(out_path, _document(args.command, cfg, rows))
        log.info("%s: wrote %d row(s) to %s (exit %d)",
                 args.command, len(rows), out_path, code)
        return code
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except UnsupportedRegime as exc:
        print(f"unsupported regime: {exc}", file=sys.stderr)
        return 3
    except DomainError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
