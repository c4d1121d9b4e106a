"""``minimaxdl`` command line interface.

Subcommands::

    bounds eval         evaluate one bound from a JSON parameter file
    bounds sample-size  smallest N bringing a lower bound under a target
    packing build       random binary packing code
    ensemble build      separated dictionary ensemble around D0
    ensemble verify     recompute an ensemble certificate from disk
    rip estimate        RIP constant of a dictionary (exact or Monte Carlo)
    simulate mse        MSE-vs-N sweep of the learners, with bounds per row
    simulate fano       empirical detection error against the Fano floor

Exit status: 0 success, 1 runtime failure (including a failed certificate),
2 configuration or usage error.

Random streams: every command derives its generators from the master seed
(``--seed`` or the config's ``seed``, default 0) with
``minimaxdl.seeding.derive_seed``. Stream 0 draws a random ``D0``, stream 1
the packing code / ensemble, stream 2 is the master seed of the Monte Carlo
trials; sweep point ``i`` of ``simulate mse`` uses ``derive_seed(seed, i)``.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .bounds import (
    BOUND_FUNCTIONS,
    ccrb_matrix,
    cor1_lower,
    low_snr_threshold,
    required_sample_size,
    thm2_lower,
    thm3_upper,
)
from .errors import ConfigError, MinimaxDLError, ParameterError
from .geometry import rip_constant_exact, rip_constant_monte_carlo
from .infotheory import empirical_error_probability, fano_error_lower_bound, mi_upper_given_X
from .learners import LEARNERS, algorithm1, constant_estimator, make_learner, monte_carlo_mse, oracle_ls
from .model import (
    GAUSSIAN,
    RADEMACHER,
    NoiseModel,
    SparseUniform,
    check_dictionary,
    coefficient_covariance,
    load_csv,
    random_dictionary,
    save_csv,
    snr as model_snr,
)
from .packing import DictionaryEnsemble, build_ensemble, build_packing, verify_ensemble
from .seeding import derive_seed, derived_rng

MSE_COLUMNS = [
    "N",
    "learner",
    "mse_mean",
    "mse_stderr",
    "thm3_upper",
    "cor1_lower",
    "thm2_lower",
    "snr",
    "sigma2",
    "trials",
    "point_index",
    "point_seed",
    "master_seed",
    "version",
    "notes",
    "error",
]

MSE_EPILOG = """\
CSV schema (fixed column order): {cols}.
Bound columns are empty where the bound's hypotheses do not hold for that
row; the reason is listed in `notes`. A failed sweep point keeps its row with
the message in `error`.

Config keys: m, p, s, nonzero_law (rademacher|gaussian), sigma_a2,
one of sigma / sigma2 / snr (scalar or list), r, N (list), learners (list of
{learners}), trials, dictionary (identity|random|CSV path), seed.
""".format(cols=", ".join(MSE_COLUMNS), learners="|".join(LEARNERS))


# -- config helpers -------------------------------------------------------------


def _load_config(path):
    if path is None:
        raise ConfigError("--config is required")
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def _req(cfg, key, kind=float):
    if key not in cfg:
        raise ConfigError(f"missing required field '{key}'")
    try:
        return kind(cfg[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field '{key}' has invalid value {cfg[key]!r}") from exc


def _opt(cfg, key, default, kind=float):
    return _req(cfg, key, kind) if key in cfg else default


def _as_list(v):
    return list(v) if isinstance(v, (list, tuple)) else [v]


def _seed(args, cfg):
    if args.seed is not None:
        return int(args.seed)
    return int(cfg.get("seed", 0))


def _threads(args):
    if args.threads is not None:
        return max(1, int(args.threads))
    env = os.environ.get("MINIMAXDL_THREADS")
    return max(1, int(env)) if env else 1


def _rip_flag(cfg):
    if "rip_ok" in cfg:
        return bool(cfg["rip_ok"])
    if "delta_s" in cfg:
        return float(cfg["delta_s"]) <= 0.5
    raise ConfigError("missing required field 'rip_ok' (or 'delta_s')")


def _dictionary(cfg, m, p, seed, key="dictionary", default="random"):
    spec = cfg.get(key, default)
    if spec == "identity":
        if m != p:
            raise ConfigError(f"'{key}': identity requires m == p")
        return np.eye(m)
    if spec == "random":
        return random_dictionary(m, p, derived_rng(seed, 0))
    try:
        D = load_csv(spec)
    except OSError as exc:
        raise ConfigError(f"'{key}': cannot read {spec}: {exc}") from exc
    if D.shape != (m, p):
        raise ConfigError(f"'{key}': {spec} has shape {D.shape}, expected {(m, p)}")
    try:
        return check_dictionary(D)
    except ParameterError as exc:
        raise ConfigError(f"'{key}': {exc}") from exc


# -- output helpers ---------------------------------------------------------------


def _atomic_write(path, text):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_text(obj):
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def _csv_text(rows, columns):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for row in rows:
        w.writerow({k: _csv_cell(row.get(k)) for k in columns})
    return buf.getvalue()


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else ""
    return v


def _flatten(d, prefix=""):
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, (list, tuple)):
            out[key] = json.dumps(_jsonable(v))
        else:
            out[key] = v
    return out


def _emit(args, obj, stdout):
    """JSON (or a one-row CSV with ``--csv``) to ``--out`` or stdout."""
    if args.csv:
        flat = _flatten(_jsonable(obj))
        text = _csv_text([flat], list(flat))
    else:
        text = _json_text(obj)
    if args.out:
        _atomic_write(args.out, text)
    else:
        stdout.write(text)


# -- bounds --------------------------------------------------------------------------


def _bound_params(bound_id, cfg, with_N=True):
    N = {"N": _req(cfg, "N")} if with_N else {}
    if bound_id == "thm1":
        return dict(m=_req(cfg, "m", int), p=_req(cfg, "p", int), **N, sigma2=_req(cfg, "sigma2"),
                    sigma_x_norm=_req(cfg, "sigma_x_norm"), r=_req(cfg, "r"))
    if bound_id == "cor1":
        return dict(m=_req(cfg, "m", int), p=_req(cfg, "p", int), **N, snr=_req(cfg, "snr"),
                    r=_req(cfg, "r"), rip_ok=_rip_flag(cfg))
    if bound_id == "thm2":
        return dict(m=_req(cfg, "m", int), p=_req(cfg, "p", int), s=_req(cfg, "s", int), **N,
                    snr=_req(cfg, "snr"), r=_req(cfg, "r"), rip_ok=_rip_flag(cfg))
    if bound_id == "thm3_upper":
        return dict(p=_req(cfg, "p", int), **N, r=_req(cfg, "r"), s=_req(cfg, "s", int),
                    sigma=_req(cfg, "sigma"), snr=_req(cfg, "snr"))
    raise ConfigError(f"unknown bound '{bound_id}'")


def cmd_bounds_eval(args, stdout):
    cfg = _load_config(args.config)
    bound_id = _req(cfg, "bound", str)
    try:
        if bound_id == "ccrb":
            snr, m, N = _req(cfg, "snr"), _req(cfg, "m", int), _req(cfg, "N")
            C = ccrb_matrix(snr, m, N)
            result = {"bound_id": "ccrb", "value": float(np.trace(C)), "matrix": C, "params": dict(snr=snr, m=m, N=N)}
        else:
            params = _bound_params(bound_id, cfg)
            result = BOUND_FUNCTIONS[bound_id](**params).to_dict()
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc
    _emit(args, result, stdout)
    return 0


def cmd_bounds_sample_size(args, stdout):
    cfg = _load_config(args.config)
    bound_id = _req(cfg, "bound", str)
    if bound_id not in ("thm1", "cor1", "thm2"):
        raise ConfigError("sample-size supports bound = thm1 | cor1 | thm2")
    params = _bound_params(bound_id, cfg, with_N=False)
    try:
        res = required_sample_size(bound_id, _req(cfg, "target_eps"), **params)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc
    _emit(args, res.to_dict(), stdout)
    return 0


# -- packing / ensembles --------------------------------------------------------------


def cmd_packing_build(args, stdout):
    cfg = _load_config(args.config)
    d, P = _req(cfg, "d", int), _req(cfg, "P", int)
    attempts = _opt(cfg, "max_attempts", 100, int)
    seed = _seed(args, cfg)
    try:
        code = build_packing(d, P, derived_rng(seed, 1), attempts)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc
    meta = {
        "d": d,
        "P": P,
        "min_hamming": code.min_hamming,
        "target_distance": d / 10,
        "attempts": code.attempts,
        "failure_prob_bound": code.failure_prob_bound,
        "seed": seed,
        "version": __version__,
    }
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        text = "".join(",".join(str(int(v)) for v in row) + "\n" for row in code.vectors)
        _atomic_write(os.path.join(args.out, "code.csv"), text)
        _atomic_write(os.path.join(args.out, "meta.json"), _json_text(meta))
    stdout.write(_json_text(meta))
    return 0


def _ensemble_from_cfg(cfg, seed):
    m, p = _req(cfg, "m", int), _req(cfg, "p", int)
    D0 = _dictionary(cfg, m, p, seed, key="D0")
    r = _req(cfg, "r") if "r" in cfg else None
    try:
        return build_ensemble(D0, _req(cfg, "epsilon"), _req(cfg, "L", int), derived_rng(seed, 1), r=r,
                              max_attempts=_opt(cfg, "max_attempts", 100, int), seed=seed)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_ensemble_build(args, stdout):
    cfg = _load_config(args.config)
    if not args.out:
        raise ConfigError("--out DIR is required for ensemble build")
    ens = _ensemble_from_cfg(cfg, _seed(args, cfg))
    ens.save(args.out)
    stdout.write(_json_text(ens.certificate.to_dict()))
    return 0 if ens.certificate.passed else 1


def cmd_ensemble_verify(args, stdout):
    if not args.dir:
        raise ConfigError("--dir is required")
    try:
        ens = DictionaryEnsemble.load(args.dir)
    except (OSError, KeyError, ValueError) as exc:
        raise ConfigError(f"cannot load ensemble from {args.dir}: {exc}") from exc
    if args.config:
        ens.r = _opt(_load_config(args.config), "r", ens.r)
    cert = verify_ensemble(ens, ens.neighborhood())
    _emit(args, cert.to_dict(), stdout)
    return 0 if cert.passed else 1


# -- rip ----------------------------------------------------------------------------------


def cmd_rip_estimate(args, stdout):
    cfg = _load_config(args.config)
    m, p, s = _req(cfg, "m", int), _req(cfg, "p", int), _req(cfg, "s", int)
    seed = _seed(args, cfg)
    D = _dictionary(cfg, m, p, seed)
    method = cfg.get("method", "auto")
    cap = _opt(cfg, "cap", 10**6, int)
    try:
        if method == "auto":
            method = "exact" if math.comb(p, s) <= cap else "monte_carlo"
        if method == "exact":
            est = rip_constant_exact(D, s, cap=cap)
        elif method == "monte_carlo":
            est = rip_constant_monte_carlo(D, s, _req(cfg, "trials", int), derived_rng(seed, 2))
        else:
            raise ConfigError(f"unknown method '{method}'")
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc
    out = est.to_dict()
    out.update(m=m, p=p, seed=seed)
    _emit(args, out, stdout)
    return 0


# -- simulate mse ------------------------------------------------------------------------


def _mse_setup(cfg, seed):
    """Validate the whole sweep config before any computation."""
    m, p, s = _req(cfg, "m", int), _req(cfg, "p", int), _req(cfg, "s", int)
    law = str(cfg.get("nonzero_law", RADEMACHER)).lower()
    sigma_a2 = _opt(cfg, "sigma_a2", 1.0)
    try:
        cm = SparseUniform(p, s, law, sigma_a2)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc
    Ns = [int(n) for n in _as_list(_req(cfg, "N", lambda v: v))]
    if not Ns or min(Ns) < 1:
        raise ConfigError("field 'N' must be a nonempty list of positive integers")
    trials = _req(cfg, "trials", int)
    if trials < 2:
        raise ConfigError("field 'trials' must be >= 2")
    learners = [str(x) for x in _as_list(cfg.get("learners", cfg.get("learner", "algorithm1")))]
    for name in learners:
        if name not in LEARNERS:
            raise ConfigError(f"unknown learner '{name}' (choose from {', '.join(LEARNERS)})")
        if name == "algorithm1" and m != p:
            raise ConfigError("algorithm1 requires the square case m == p")
        if name == "oracle_ls" and min(Ns) < p:
            raise ConfigError("oracle_ls requires N >= p for every sweep point")
    noise_keys = [k for k in ("sigma", "sigma2", "snr") if k in cfg]
    if len(noise_keys) != 1:
        raise ConfigError("exactly one of 'sigma', 'sigma2', 'snr' must be given")
    D = _dictionary(cfg, m, p, seed, default="identity" if m == p else "random")
    signal = float(np.trace(D @ coefficient_covariance(cm) @ D.T))
    key = noise_keys[0]
    levels = []
    for v in _as_list(cfg[key]):
        v = float(v)
        if not v > 0:
            raise ConfigError(f"field '{key}' must be positive")
        sigma2 = v * v if key == "sigma" else v if key == "sigma2" else signal / (m * v)
        levels.append(sigma2)
    r = _req(cfg, "r")
    if not r > 0:
        raise ConfigError("field 'r' must be positive")
    delta = None
    if math.comb(p, s) <= 10**6:
        delta = rip_constant_exact(D, s).delta
    return dict(m=m, p=p, s=s, cm=cm, D=D, Ns=Ns, trials=trials, learners=learners, levels=levels, r=r, delta=delta)


def _row_bounds(st, N, sigma2, snr_val):
    """Bound columns for one sweep point, empty where hypotheses fail."""
    m, p, s, r, cm, D, delta = st["m"], st["p"], st["s"], st["r"], st["cm"], st["D"], st["delta"]
    out, notes = {}, []
    rip_ok = delta is not None and delta <= 0.5
    if delta is None:
        notes.append("delta_s not enumerable")
    sigma = math.sqrt(sigma2)
    if m != p:
        notes.append("thm3: m != p")
    elif cm.nonzero_law != RADEMACHER:
        notes.append("thm3: nonzeros not +-1")
    elif np.linalg.norm(D - np.eye(p)) > r:
        notes.append("thm3: dictionary outside X(I, r)")
    else:
        try:
            out["thm3_upper"] = thm3_upper(p, N, r, s, sigma, snr_val).value
        except ParameterError as exc:
            notes.append(f"thm3: {exc.condition}")
    try:
        out["cor1_lower"] = cor1_lower(m, p, N, snr_val, r, rip_ok=rip_ok).value
    except ParameterError as exc:
        notes.append(f"cor1: {exc.condition}")
    if cm.nonzero_law != GAUSSIAN:
        notes.append("thm2: nonzeros not Gaussian")
    else:
        try:
            out["thm2_lower"] = thm2_lower(m, p, s, N, snr_val, r, rip_ok=rip_ok).value
        except ParameterError as exc:
            notes.append(f"thm2: {exc.condition}")
    out["notes"] = "; ".join(notes)
    return out


def _learner(name, s, threshold):
    if name == "algorithm1" and threshold is not None:
        return lambda batch: algorithm1(batch.Y, s, threshold=threshold)
    return make_learner(name, s)


def run_sweep(cfg, seed, threads=1, threshold=None):
    """Evaluate every (N, noise level, learner) point; rows in point-index order."""
    st = _mse_setup(cfg, seed)
    points = list(itertools.product(st["Ns"], st["levels"], st["learners"]))

    def one(item):
        idx, (N, sigma2, learner) = item
        nm = NoiseModel(sigma2)
        snr_val = model_snr(st["D"], st["cm"], nm)
        point_seed = derive_seed(seed, idx)
        row = {
            "N": N, "learner": learner, "snr": snr_val, "sigma2": sigma2, "trials": st["trials"],
            "point_index": idx, "point_seed": point_seed, "master_seed": seed, "version": __version__, "error": "",
        }
        row.update(_row_bounds(st, N, sigma2, snr_val))
        try:
            mean, se = monte_carlo_mse(_learner(learner, st["s"], threshold), st["D"], st["cm"], nm, N, st["trials"], point_seed)
            row.update(mse_mean=mean, mse_stderr=se)
        except Exception as exc:  # recorded in-row; the sweep continues
            row["error"] = f"{type(exc).__name__}: {exc}"
        return row

    items = list(enumerate(points))
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(one, items))
    return [one(it) for it in items]


def _gnuplot_script(csv_path):
    name = os.path.basename(csv_path)
    return f"""# plot MSE versus N with the bounds evaluated on each row
set datafile separator ','
set key autotitle columnhead
set logscale xy
set xlabel 'N'
set ylabel 'MSE (squared Frobenius)'
set terminal pngcairo size 900,600
set output '{os.path.splitext(name)[0]}.png'
plot '{name}' using 1:3:4 with yerrorbars title 'empirical MSE', \\
     '' using 1:5 with linespoints title 'thm3 upper', \\
     '' using 1:6 with linespoints title 'cor1 lower', \\
     '' using 1:7 with linespoints title 'thm2 lower'
"""


def cmd_simulate_mse(args, stdout):
    cfg = _load_config(args.config)
    seed = _seed(args, cfg)
    rows = run_sweep(cfg, seed, _threads(args), threshold=args.threshold)
    text = _csv_text(rows, MSE_COLUMNS)
    if args.out:
        _atomic_write(args.out, text)
        if args.gnuplot:
            _atomic_write(os.path.splitext(args.out)[0] + ".gp", _gnuplot_script(args.out))
    else:
        stdout.write(text)
    return 1 if any(r["error"] for r in rows) else 0


# -- simulate fano -------------------------------------------------------------------------

FANO_ESTIMATORS = ("constant_d0", "oracle", "oracle_ls")


def cmd_simulate_fano(args, stdout):
    cfg = _load_config(args.config)
    seed = _seed(args, cfg)
    m, p, s = _req(cfg, "m", int), _req(cfg, "p", int), _req(cfg, "s", int)
    N, trials = _req(cfg, "N", int), _req(cfg, "trials", int)
    sigma2 = _req(cfg, "sigma2")
    estimator_name = str(cfg.get("estimator", "constant_d0"))
    if estimator_name not in FANO_ESTIMATORS:
        raise ConfigError(f"unknown estimator '{estimator_name}' (choose from {', '.join(FANO_ESTIMATORS)})")
    if estimator_name == "oracle_ls" and N < p:
        raise ConfigError("oracle_ls requires N >= p")
    if trials < 1 or N < 1 or not sigma2 > 0:
        raise ConfigError("need trials >= 1, N >= 1, sigma2 > 0")
    try:
        cm = SparseUniform(p, s, str(cfg.get("nonzero_law", RADEMACHER)), _opt(cfg, "sigma_a2", 1.0))
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc
    ens = _ensemble_from_cfg(cfg, seed)
    if estimator_name == "constant_d0":
        estimator = constant_estimator(ens.D0)
    elif estimator_name == "oracle":
        estimator = lambda batch: ens.members[batch.dict_index]  # noqa: E731
    else:
        estimator = lambda batch: oracle_ls(batch.Y, batch.X)  # noqa: E731
    budget = mi_upper_given_X(ens, coefficient_covariance(cm), N, sigma2)
    floor = fano_error_lower_bound(budget.computed_mi_upper, ens.L)
    p_e, se = empirical_error_probability(ens, estimator, cm, NoiseModel(sigma2), N, trials,
                                          derive_seed(seed, 2), threads=_threads(args))
    result = {
        "L": ens.L,
        "eta": budget.eta,
        "eta_tight": budget.extra["eta_tight"],
        "mi_upper": budget.computed_mi_upper,
        "fano_floor": floor,
        "p_e_hat": p_e,
        "stderr": se,
        "consistent": p_e + 3 * se >= floor,
        "params": dict(cfg, seed=seed, estimator=estimator_name, version=__version__),
    }
    _emit(args, result, stdout)
    return 0


# -- parser ------------------------------------------------------------------------------------


def _common(sp):
    sp.add_argument("--config", metavar="PATH", help="JSON parameter file")
    sp.add_argument("--seed", metavar="U64", type=int, help="master seed (overrides the config)")
    sp.add_argument("--out", metavar="PATH", help="output file or directory (default: stdout)")
    sp.add_argument("--csv", action="store_true", help="emit a one-row CSV instead of JSON")
    sp.add_argument("--threads", metavar="K", type=int, help="worker threads (fallback: $MINIMAXDL_THREADS)")
    sp.add_argument("--gnuplot", action="store_true", help="write a gnuplot script next to the CSV")


def build_parser():
    parser = argparse.ArgumentParser(prog="minimaxdl", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    groups = parser.add_subparsers(dest="group", metavar="GROUP")
    groups.required = True

    table = {
        "bounds": {"eval": cmd_bounds_eval, "sample-size": cmd_bounds_sample_size},
        "packing": {"build": cmd_packing_build},
        "ensemble": {"build": cmd_ensemble_build, "verify": cmd_ensemble_verify},
        "rip": {"estimate": cmd_rip_estimate},
        "simulate": {"mse": cmd_simulate_mse, "fano": cmd_simulate_fano},
    }
    for group, cmds in table.items():
        gp = groups.add_parser(group)
        sub = gp.add_subparsers(dest="command", metavar="COMMAND")
        sub.required = True
        for name, fn in cmds.items():
            kw = {}
            if fn is cmd_simulate_mse:
                kw = dict(epilog=MSE_EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
            sp = sub.add_parser(name, **kw)
            _common(sp)
            if fn is cmd_simulate_mse:
                sp.add_argument("--threshold", type=float, default=None, help=argparse.SUPPRESS)
            if fn is cmd_ensemble_verify:
                sp.add_argument("--dir", metavar="DIR", help="ensemble directory written by 'ensemble build'")
            sp.set_defaults(func=fn)
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, stdout)
    except ConfigError as exc:
        stderr.write(f"minimaxdl: config error: {exc}\n")
        return 2
    except MinimaxDLError as exc:
        stderr.write(f"minimaxdl: {exc}\n")
        return 1
    except Exception as exc:  # pragma: no cover - last-resort reporting
        stderr.write(f"minimaxdl: {type(exc).__name__}: {exc}\n")
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
