"""Command-line front end: ``salemshift classify | construct | probe``.

Each subcommand resolves its configuration (flags over config file over
defaults), runs library calls, and prints or writes the results together
with the resolved configuration.  Exit codes: 0 ok, 1 module error,
2 inconclusive classification.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from pathlib import Path
from typing import Any

from . import __version__
from .algebra import DEFAULT_DIGITS, IntPolynomial, classify, find_roots
from .betashift import BetaSystem, sofic_probe
from .coding import homoclinic
from .errors import Inconclusive, InsertionFailed, NotSalem, SalemShiftError
from .hofbauer import build_chain, lambda_scan, rng_for, sample_path
from .salem import (
    L_CAP,
    calibrate_K,
    entropy_estimate,
    minimality_L,
    modify_with_backoff,
    salem_modify,
    verify_dbound,
)

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2

CONSTRUCT_DEFAULTS: dict[str, Any] = {
    "poly": "1,-1,-1,-1,1",
    "K": "auto",
    "J": 8,
    "L": "auto",
    "L_cap": L_CAP,
    "stages": None,
    "samples": 10,
    "length": 2000,
    "block": 12,
    "depth": 60,
    "seed": 0,
    "quantile": 0.9,
    "trials": 2000,
}


class StageError(Exception):
    def __init__(self, stage: str, err: Exception):
        super().__init__(f"{stage}: {err}")
        self.stage = stage
        self.err = err


def _precision(args) -> int:
    if getattr(args, "precision", None) is not None:
        return int(args.precision)
    env = os.environ.get("SALEM_PRECISION")
    return int(env) if env else DEFAULT_DIGITS


def config_hash(config: dict) -> str:
    return hashlib.sha256(json.dumps(config, sort_keys=True).encode()).hexdigest()[:16]


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _csv_text(config: dict, header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    buf.write(f"# salemshift {__version__} config_sha256={config_hash(config)}\n")
    buf.write(f"# config {json.dumps(config, sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(args, config: dict, payload: dict, header: list[str], rows: list[list]) -> None:
    doc = {"version": __version__, "config": config, "config_sha256": config_hash(config), **payload}
    json_text = _dump_json(doc)
    csv_text = _csv_text(config, header, rows)
    if args.out:
        base = Path(args.out)
        base.parent.mkdir(parents=True, exist_ok=True)
        Path(f"{base}.json").write_text(json_text)
        Path(f"{base}.csv").write_text(csv_text)
    sys.stdout.write(csv_text if args.format == "csv" else json_text)


def _stage(name: str, fn, *a, **kw):
    try:
        return fn(*a, **kw)
    except Inconclusive:
        raise
    except (SalemShiftError, ValueError) as err:
        raise StageError(name, err) from err


# -- classify -------------------------------------------------------------------

def cmd_classify(args) -> int:
    digits = _precision(args)
    config = {"command": "classify", "poly": args.poly, "precision": digits}
    f = _stage("parse", IntPolynomial.parse, args.poly)
    r = _stage("find_roots", find_roots, f, digits)
    pc = classify(f, r)
    payload = {"poly": f.to_json(), "class": pc.to_json(), "roots": r.to_json()}
    header = ["re", "im", "cls", "b_re", "b_im"]
    rows = [[x["re"], x["im"], x["cls"], x["b_re"], x["b_im"]] for x in r.to_json()]
    _emit(args, config, payload, header, rows)
    return EXIT_OK


# -- construct ------------------------------------------------------------------

def _resolve_construct(args) -> dict:
    config = dict(CONSTRUCT_DEFAULTS)
    if args.config:
        config.update(json.loads(Path(args.config).read_text()))
    for key in CONSTRUCT_DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            config[key] = val
    if isinstance(config["poly"], list):
        config["poly"] = ",".join(str(c) for c in config["poly"])
    for key in ("J", "samples", "length", "block", "depth", "seed", "trials", "L_cap"):
        config[key] = int(config[key])
    for key in ("K", "L"):
        if config[key] != "auto":
            config[key] = float(config[key]) if key == "K" else int(config[key])
    config["quantile"] = float(config["quantile"])
    config["command"] = "construct"
    config["precision"] = _precision(args)
    return config


def run_construct(config: dict) -> tuple[dict, list[str], list[list]]:
    """The construction pipeline; returns the summary and per-sample rows."""
    f = _stage("parse", IntPolynomial.parse, config["poly"])
    r = _stage("find_roots", find_roots, f, config["precision"])
    pc = classify(f, r)
    if not pc.salem:
        raise StageError("classify", NotSalem(f"{f} is not a Salem polynomial"))
    h = _stage("homoclinic", homoclinic, f, r)
    bs = BetaSystem(r.dominant.value.real, poly=f, digits=config["precision"])
    chain = _stage("build_chain", build_chain, bs, config["depth"])
    seed, J, n = config["seed"], config["J"], config["length"]
    calib = [sample_path(chain, n, rng_for(seed, i)) for i in range(config["samples"])]
    if config["K"] == "auto":
        K, frac = _stage("calibrate_K", calibrate_K, h, calib, J, config["quantile"])
    else:
        K, frac = config["K"], None
    if config["L"] == "auto":
        L0 = min(_stage("minimality_L", minimality_L, r, config["trials"], seed), config["L_cap"])
    else:
        L0 = config["L"]
    past = n // 10
    stream = config["samples"]
    rows, modified, worst_all = [], [], 0.0
    for i in range(config["samples"]):
        v = sample_path(chain, n, rng_for(seed, stream + i), lo=-past)
        try:
            if config["L"] == "auto":
                vstar, log = modify_with_backoff(h, bs, v, K, J, L0, L_cap=config["L_cap"], stages=config["stages"])
            else:
                vstar, log = salem_modify(h, bs, v, K, J, L0, stages=config["stages"])
        except InsertionFailed as err:
            raise StageError(f"salem_modify (sample {i}, stage {err.stage}, slot {err.slot})", err) from err
        except SalemShiftError as err:
            raise StageError(f"salem_modify (sample {i})", err) from err
        future = vstar.restrict(0, log.end - 1)
        j_max = log.end // 2
        ok, worst = _stage(
            "verify_dbound", verify_dbound, h, future, 4 * K, j_max=j_max, jprime_range=range(0, log.end - j_max + 1)
        )
        worst_all = max(worst_all, worst)
        modified.append(future)
        rows.append(
            [i, log.L, log.stages, sum(log.in_B), log.inserted, log.end, f"{worst:.12g}", f"{4 * K:.12g}", int(ok)]
        )
    counting, shannon = _stage("entropy_estimate", entropy_estimate, modified, config["block"])
    summary = {
        "beta": float(bs.beta),
        "log_beta": bs.log_beta,
        "K": K,
        "K_fraction": frac,
        "L_initial": L0,
        "bound_4K": 4 * K,
        "worst_d": worst_all,
        "all_within_4K": all(row[-1] == 1 for row in rows),
        "entropy_counting": counting,
        "entropy_shannon": shannon,
        "chain_exact": chain.exact,
        "chain_lambda": chain.lam,
    }
    header = ["sample", "L", "stages", "stages_in_B", "inserted", "end", "worst_d", "bound", "ok"]
    return summary, header, rows


def cmd_construct(args) -> int:
    config = _resolve_construct(args)
    summary, header, rows = run_construct(config)
    _emit(args, config, {"summary": summary}, header, rows)
    return EXIT_OK


# -- probe ----------------------------------------------------------------------

def cmd_probe(args) -> int:
    digits = _precision(args)
    config = {
        "command": "probe",
        "poly": args.poly,
        "beta": args.beta,
        "n_max": args.n_max,
        "depth": args.depth if args.depth is not None else 60,
        "precision": digits,
    }
    if (args.poly is None) == (args.beta is None):
        raise StageError("parse", ValueError("give exactly one of --poly and --beta"))
    if args.poly is not None:
        f = _stage("parse", IntPolynomial.parse, args.poly)
        bs = _stage("beta", BetaSystem.from_polynomial, f, digits)
    else:
        val: Any = args.beta
        if val.strip().isdigit():
            val = int(val)
        bs = _stage("beta", BetaSystem.from_value, val, digits)
    found = _stage("sofic_probe", sofic_probe, bs, args.n_max)
    depths = sorted({d for d in (1, 2, 5, 10, 20, 30, 40, 50, 60, 80, 100) if d <= config["depth"]} | {config["depth"]})
    scan = _stage("lambda_scan", lambda_scan, bs, depths)
    payload = {
        "beta": float(bs.beta),
        "estar_prefix": "".join(str(d) for d in bs.estar(min(args.n_max, 64)).tolist())
        if bs.digit_max <= 9
        else bs.estar(min(args.n_max, 64)).tolist(),
        "periodic": None if found is None else {"preperiod": found[0], "period": found[1]},
        "status": "unknown" if found is None else f"periodic {found}",
        "lambda_scan": [{"D": D, "lambda": lam, "gap": float(bs.beta) - lam} for D, lam in scan],
    }
    rows = [[D, f"{lam:.15g}", f"{float(bs.beta) - lam:.6e}"] for D, lam in scan]
    _emit(args, config, payload, ["D", "lambda", "beta_minus_lambda"], rows)
    return EXIT_OK


# -- entry point --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="salemshift", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--precision", type=int, help="decimal digits (env SALEM_PRECISION)")
        sp.add_argument("--out", help="write OUT.json and OUT.csv")
        sp.add_argument("--format", choices=("json", "csv"), default="json")

    c = sub.add_parser("classify", help="roots and classification of a polynomial")
    c.add_argument("--poly", required=True, help="comma-separated f_0,...,f_m")
    common(c)
    c.set_defaults(func=cmd_classify)

    k = sub.add_parser("construct", help="zero-insertion ensemble with d-bound and entropy checks")
    k.add_argument("--config", help="JSON file with any of the construct keys")
    k.add_argument("--poly")
    k.add_argument("--seed", type=int)
    k.add_argument("--K", help="float or 'auto'")
    k.add_argument("--J", type=int)
    k.add_argument("--L", help="int or 'auto'")
    k.add_argument("--L-cap", dest="L_cap", type=int)
    k.add_argument("--stages", type=int)
    k.add_argument("--samples", type=int)
    k.add_argument("--length", type=int)
    k.add_argument("--block", type=int, help="factor length for the entropy estimate")
    k.add_argument("--depth", type=int, help="Hofbauer chain depth")
    k.add_argument("--quantile", type=float)
    k.add_argument("--trials", type=int, help="test pairs for the minimality constant")
    common(k)
    k.set_defaults(func=cmd_construct)

    pr = sub.add_parser("probe", help="eventual periodicity of e* and the lambda_D table")
    pr.add_argument("--poly")
    pr.add_argument("--beta", help="decimal beta (exploratory)")
    pr.add_argument("--n-max", dest="n_max", type=int, default=10_000)
    pr.add_argument("--depth", type=int)
    common(pr)
    pr.set_defaults(func=cmd_probe)
    return p


def _attach_values(argv: list[str]) -> list[str]:
    """Glue ``--poly -1,-1,1`` into ``--poly=-1,-1,1`` so argparse does not read it as a flag."""
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in ("--poly", "--beta"):
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_attach_values(argv))
    try:
        return args.func(args)
    except Inconclusive as err:
        sys.stderr.write(f"inconclusive: {err}\n")
        return EXIT_INCONCLUSIVE
    except StageError as err:
        sys.stderr.write(f"error in {err.stage}: {err.err}\n")
        return EXIT_ERROR
    except SalemShiftError as err:
        sys.stderr.write(f"error: {err}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
