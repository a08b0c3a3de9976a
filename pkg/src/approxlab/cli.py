"""Command-line runner: every experiment as a subcommand.

    approxlab list
    approxlab witness --case b --p 1 --q 2 --r 1
    approxlab separate-teo2 --s1 l:1:2 --s2 l:1:1 --Nmax 4096 --out runs/teo2
    approxlab --config run.json

Results go to stdout as JSON, or to ``result.json`` (plus ``profile.csv``
for profile-producing experiments) under ``--out``. Exit status: 0 when
every checked property holds, 1 when one is violated, 2 on bad input.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import approxspace, interp, io, scales, schemes, seqspace
from .seqspace import SpaceSpec

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2

MAX_N = schemes.MAX_HILBERT_DIM
MAX_ONES_N = 10 ** 7

CATALOG = [
    ("Lorentz and Lorentz-Zygmund quasi-norms", ["rearrange", "norm", "lz-norm", "membership"]),
    ("Lemma 2: strict inclusions (a)-(e)", ["witness"]),
    ("Linear-scheme theorem: witnesses y_N and non-equivalent norms",
     ["prescribe", "separate-linear"]),
    ("Theorem 4.1: Shapiro gap and ||1_N|| ratios", ["separate-teo2", "ones-ratio", "polya"]),
    ("Corollary 4.4: Lorentz scale preserved", ["corbrud"]),
    ("Lemma 5.1: index dilation with explicit constant", ["dilate"]),
    ("Theorem 5.4: approximation numbers and the sandwich", ["svd", "sandwich"]),
    ("Theorem 6.2: K-functional conditions (a)-(d)", ["kfunc", "rho", "cond-a", "abn", "k2"]),
    ("Proposition 6.3: barrier witnesses", ["prop-witness"]),
]


class ConfigError(ValueError):
    pass


# --------------------------------------------------------------------------
# helpers


def _spec(text: str) -> SpaceSpec:
    try:
        return SpaceSpec.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _pfloat(text: str) -> float:
    return math.inf if str(text).lower() in ("inf", "infinity") else float(text)


def _n_grid(n_max: int, points: int, cap: int = MAX_N) -> list[int]:
    if n_max < 1 or n_max > cap:
        raise ConfigError(f"Nmax must lie in 1..{cap}")
    return sorted(set(int(round(v)) for v in np.geomspace(1, n_max, points)))


def _profile_result(profile) -> tuple[dict, list]:
    return profile.to_dict(), profile.csv_rows()


# --------------------------------------------------------------------------
# handlers: each returns (result, ok, csv rows or None)


def cmd_rearrange(a):
    seq = seqspace.rearrange(io.load_vector(a.seq))
    return {"rearranged": seq.values}, True, None


def cmd_norm(a):
    seq = io.load_vector(a.seq)
    return {"spec": a.spec.to_dict(), "norm": seqspace.norm(seq, a.spec)}, True, None


def cmd_lz_norm(a):
    seq = io.load_vector(a.seq)
    return {"norm": seqspace.lz_norm(seq, a.p, a.r, a.gamma)}, True, None


def cmd_membership(a):
    if a.seq:
        seq = io.load_vector(a.seq)
    else:
        seq = scales.PowerLog(a.beta, a.delta).values(a.N)
    v = seqspace.truncated_norms(seq, a.spec)
    out = v.to_dict()
    out["spec"] = a.spec.to_dict()
    if not a.seq:
        out["oracle"] = scales.power_log_oracle(a.beta, a.delta, a.spec)
    return out, v.status != seqspace.INCONCLUSIVE, None


def cmd_dilate(a):
    seq = seqspace.rearrange(io.load_vector(a.seq))
    out = {"dilated": seqspace.dilate(seq, a.C).values}
    ok = True
    if a.p is not None and a.r is not None:
        rep = seqspace.dilation_bound_check(seq, a.C, a.p, a.r)
        out["bound"] = rep.to_dict()
        ok = rep.holds
    return out, ok, None


def cmd_witness(a):
    params = {k: getattr(a, k) for k in ("p", "q", "r", "e", "gamma", "alpha")
              if getattr(a, k) is not None}
    case = scales.InclusionCase(a.case, **params)
    rep = scales.witness_sequence(case, a.N)
    return rep.to_dict(), rep.agrees, None


def cmd_ones_ratio(a):
    prof = scales.ones_ratio_profile(a.s1, a.s2, _n_grid(a.Nmax, a.points, MAX_ONES_N))
    res, rows = _profile_result(prof)
    return res, True, rows


def cmd_polya(a):
    val = scales.polya_szego_ratio(a.alpha, a.N)
    limit = 1.0 / (a.alpha + 1)
    return {"alpha": a.alpha, "N": a.N, "ratio": val, "limit": limit,
            "relative_error": abs(val - limit) / limit}, True, None


def cmd_prescribe(a):
    eps = io.load_vector(a.eps)
    x = schemes.prescribe_errors(eps)
    back = schemes.error_sequence(x, schemes.HilbertScheme(max(x.size, 1)), eps.size - 1).values
    err = float(np.max(np.abs(back - eps))) if eps.size else 0.0
    return {"x": x, "errors": back, "max_roundtrip_error": err}, err <= 1e-10, None


def cmd_svd(a):
    if a.matrix:
        t = io.load_matrix(a.matrix)
    else:
        t = np.random.default_rng(a.seed).standard_normal((a.random, a.random))
    sv = schemes.singular_values(t)
    return {"shape": list(t.shape), "singular_values": sv.values,
            "rank": schemes.numerical_rank(sv)}, True, None


def _scheme(a):
    if a.scheme == "hilbert":
        return schemes.HilbertScheme()
    if a.scheme == "diagonal":
        if not a.diag:
            raise ConfigError("--scheme diagonal needs --diag")
        return schemes.DiagonalScheme(io.load_vector(a.diag))
    raise ConfigError(f"unknown scheme {a.scheme!r}")


def cmd_separate_linear(a):
    if a.scheme != "hilbert":
        raise ConfigError("separate-linear runs on the hilbert scheme")
    prof = approxspace.separate_linear(schemes.HilbertScheme(), a.s1, a.s2,
                                       _n_grid(a.Nmax, a.points))
    res, rows = _profile_result(prof)
    return res, prof.verdict != "inconclusive", rows


def cmd_separate_teo2(a):
    prof = approxspace.separate_teo2(_scheme(a), a.s1, a.s2, _n_grid(a.Nmax, a.points))
    res, rows = _profile_result(prof)
    ok = prof.extras["lower_bound_holds"] and prof.extras["upper_bound_holds"]
    return res, ok, rows


def cmd_corbrud(a):
    rep = approxspace.corbrud_separation(schemes.HilbertScheme(), a.r, a.p, a.q, a.N)
    ok = rep.separated and rep.convex and rep.doubling_bounded
    return rep.to_dict(), ok, None


def cmd_sandwich(a):
    if a.family == "geometric":
        eps = 2.0 ** -np.arange(1, a.N + 1)
    else:
        eps = scales.PowerLog(a.beta, a.delta).values(a.N)
    rep = approxspace.oikhberg_sandwich_check(eps, schemes.DiagonalScheme(a.scale * eps))
    return rep.to_dict(), rep.holds, None


def _couple(a):
    if a.couple == "l1linf":
        x = io.load_vector(a.x)
        return interp.DiscreteL1Linf(max(x.size, 1)), x
    if a.couple == "cc1":
        if a.a is None or a.b is None:
            raise ConfigError("--couple cc1 needs --a and --b")
        return interp.SampledCC1(), interp.cc1_witness(a.a, a.b)
    raise ConfigError(f"unknown couple {a.couple!r}")


def cmd_kfunc(a):
    couple, x = _couple(a)
    lo, up = interp.k_bounds(couple, x, a.t)
    out = {"t": a.t, "lower": lo.value, "upper": up.value, "bound_type": up.bound}
    if isinstance(x, interp.CC1Witness):
        out["certificate"] = x.certificate(a.t)
    return out, lo.value <= up.value + 1e-12, None


def cmd_rho(a):
    couple, x = _couple(a)
    v = interp.rho_norm(couple, x, a.theta, a.q, a.kmax)
    return v.to_dict(with_partials=True), v.status != seqspace.INCONCLUSIVE, None


def cmd_cond_a(a):
    scan = interp.condition_a_scan(interp.SampledCC1(), interp.cc1_family(),
                                   [2.0 ** -k for k in range(a.kmax + 1)])
    res = scan.to_dict()
    res["holds_with_c"] = {"c": a.c, "holds": scan.holds_with(a.c)}
    return res, scan.holds and scan.holds_with(a.c), None


def cmd_k2(a):
    couple, x = _couple(a)
    if not interp.is_exact(couple):
        raise ConfigError("k2 needs an exact couple (l1linf)")
    rep = interp.k2_check(couple, x, np.linspace(a.tmax / a.points, a.tmax, a.points))
    return rep.to_dict(), math.isfinite(rep.gamma), None


def cmd_abn(a):
    couple, x = _couple(a)
    n = np.arange(1, a.N + 1)
    v = interp.abn_norm(couple, x, 2.0 ** (n * a.theta), 2.0 ** -n.astype(float))
    return v.to_dict(with_partials=True), True, None


_PHIS = {"inv": lambda e: 1.0 / e, "inv2": lambda e: 1.0 / e ** 2,
         "const": lambda e: 2.0}


def cmd_prop_witness(a):
    phi = _PHIS[a.phi]
    if a.family == "constant":
        family = lambda e: (np.linspace(0.0, 1.0, 65), np.ones(65))
    else:
        family = interp.proposition_family(phi)
    rep = interp.proposition_witness(phi, family, a.c, range(a.nmin, a.nmax + 1))
    return rep.to_dict(), rep.passes, None


def cmd_list(a):
    entries = [{"result": name, "subcommands": cmds} for name, cmds in CATALOG]
    if a.format == "json":
        return {"catalog": entries}, True, None
    lines = [f"{name}\n    {', '.join(cmds)}" for name, cmds in CATALOG]
    return "\n".join(lines) + "\n", True, None


# --------------------------------------------------------------------------
# parser


def _add(sub, name, func, help_text):
    p = sub.add_parser(name, help=help_text)
    p.set_defaults(func=func)
    p.add_argument("--config", help="JSON file with parameter values")
    p.add_argument("--out", help="directory for result.json and profile.csv")
    p.add_argument("--seed", type=int, default=0)
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="approxlab", description=__doc__.split("\n")[0])
    parser.add_argument("--config", help="JSON file naming an experiment and its parameters")
    sub = parser.add_subparsers(dest="command")

    p = _add(sub, "rearrange", cmd_rearrange, "decreasing rearrangement")
    p.add_argument("--seq", required=True)

    p = _add(sub, "norm", cmd_norm, "sequence-space quasi-norm")
    p.add_argument("--spec", type=_spec, required=True)
    p.add_argument("--seq", required=True)

    p = _add(sub, "lz-norm", cmd_lz_norm, "Lorentz-Zygmund quasi-norm")
    p.add_argument("--p", type=_pfloat, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--seq", required=True)

    p = _add(sub, "membership", cmd_membership, "truncated-norm membership verdict")
    p.add_argument("--spec", type=_spec, required=True)
    p.add_argument("--seq")
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--N", type=int, default=scales.DEFAULT_WITNESS_LENGTH)

    p = _add(sub, "dilate", cmd_dilate, "index dilation and its bound")
    p.add_argument("--seq", required=True)
    p.add_argument("--C", type=float, required=True)
    p.add_argument("--p", type=float)
    p.add_argument("--r", type=float)

    p = _add(sub, "witness", cmd_witness, "certified witness for an inclusion case")
    p.add_argument("--case", choices=list("abcde"), required=True)
    for name in ("p", "q"):
        p.add_argument(f"--{name}", type=_pfloat)
    for name in ("r", "e", "gamma", "alpha"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--N", type=int, default=scales.DEFAULT_WITNESS_LENGTH)

    p = _add(sub, "ones-ratio", cmd_ones_ratio, "||1_N|| ratio profile")
    p.add_argument("--s1", type=_spec, required=True)
    p.add_argument("--s2", type=_spec, required=True)
    p.add_argument("--Nmax", type=int, default=10 ** 5)
    p.add_argument("--points", type=int, default=26)

    p = _add(sub, "polya", cmd_polya, "power-sum ratio")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--N", type=int, default=10 ** 6)

    p = _add(sub, "prescribe", cmd_prescribe, "coordinates with prescribed errors")
    p.add_argument("--eps", required=True)

    p = _add(sub, "svd", cmd_svd, "singular values by Jacobi iteration")
    p.add_argument("--matrix")
    p.add_argument("--random", type=int, default=8, help="size of a seeded Gaussian matrix")

    for name, func in (("separate-linear", cmd_separate_linear),
                       ("separate-teo2", cmd_separate_teo2)):
        p = _add(sub, name, func, "norm-ratio separation profile")
        p.add_argument("--s1", type=_spec, required=True)
        p.add_argument("--s2", type=_spec, required=True)
        p.add_argument("--scheme", choices=["hilbert", "diagonal"], default="hilbert")
        p.add_argument("--diag")
        p.add_argument("--Nmax", type=int, default=10 ** 4)
        p.add_argument("--points", type=int, default=17)

    p = _add(sub, "corbrud", cmd_corbrud, "Lorentz-scale separation experiment")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--N", type=int, default=2 ** 14)

    p = _add(sub, "sandwich", cmd_sandwich, "approximation-number sandwich")
    p.add_argument("--family", choices=["geometric", "powerlog"], default="geometric")
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--N", type=int, default=40)

    couple_cmds = (("kfunc", cmd_kfunc, "K-functional bounds"),
                   ("rho", cmd_rho, "discrete interpolation norm"),
                   ("k2", cmd_k2, "integral condition constant"),
                   ("abn", cmd_abn, "sup_n b_n K(x, t_n)"))
    for name, func, text in couple_cmds:
        p = _add(sub, name, func, text)
        p.add_argument("--couple", choices=["l1linf", "cc1"], default="l1linf")
        p.add_argument("--x", default="1")
        p.add_argument("--a", type=float)
        p.add_argument("--b", type=float)
        if name == "kfunc":
            p.add_argument("--t", type=float, required=True)
        if name in ("rho", "abn"):
            p.add_argument("--theta", type=float, default=0.5)
        if name == "rho":
            p.add_argument("--q", type=_pfloat, default=math.inf)
            p.add_argument("--kmax", type=int, default=60)
        if name == "abn":
            p.add_argument("--N", type=int, default=40)
        if name == "k2":
            p.add_argument("--tmax", type=float, default=1.0)
            p.add_argument("--points", type=int, default=20)

    p = _add(sub, "cond-a", cmd_cond_a, "condition (a) scan on C[0,1] / C^1")
    p.add_argument("--kmax", type=int, default=10)
    p.add_argument("--c", type=float, default=0.5)

    p = _add(sub, "prop-witness", cmd_prop_witness, "barrier witnesses t_n = 1/phi(1/n)")
    p.add_argument("--phi", choices=sorted(_PHIS), default="inv")
    p.add_argument("--family", choices=["ramp", "constant"], default="ramp")
    p.add_argument("--c", type=float, default=0.5)
    p.add_argument("--nmin", type=int, default=3)
    p.add_argument("--nmax", type=int, default=1000)

    p = _add(sub, "list", cmd_list, "map of results to subcommands")
    p.add_argument("--format", choices=["text", "json"], default="text")
    return parser


def _load_config(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return data


def _split_config(argv):
    """Remove ``--config PATH`` (at any position) from ``argv``."""
    rest, path = [], None
    it = iter(argv)
    for tok in it:
        if tok == "--config":
            path = next(it, None)
            if path is None:
                raise ConfigError("--config needs a file name")
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
        else:
            rest.append(tok)
    return path, rest


def _apply_config(parser, path, argv):
    """Install config values as subcommand defaults; explicit flags still win.

    Returns the argument list to parse, with the experiment name prepended
    when the command line did not give one.
    """
    cfg = _load_config(path)
    params = dict(cfg.get("params", {}))
    for key in ("seed", "out"):
        if key in cfg:
            params.setdefault(key, cfg[key])
    choices = parser._subparsers._group_actions[0].choices
    rest = list(argv)
    if rest and rest[0] in choices:
        command = rest[0]
        if cfg.get("experiment") not in (None, command):
            raise ConfigError(f"config is for {cfg['experiment']!r}, not {command!r}")
    else:
        command = cfg.get("experiment")
        if command is None:
            raise ConfigError("config names no experiment")
        if command not in choices:
            raise ConfigError(f"unknown experiment {command!r}")
        rest = [command] + rest
    subparser = choices[command]
    known = {act.dest: act for act in subparser._actions}
    defaults = {}
    for key, value in params.items():
        dest = key.replace("-", "_")
        if dest not in known or dest in ("help", "config"):
            raise ConfigError(f"unknown parameter {key!r} for {command}")
        act = known[dest]
        if act.type is not None and value is not None and not isinstance(value, (list, dict)):
            try:
                value = act.type(str(value)) if act.type in (_spec, _pfloat) else act.type(value)
            except (TypeError, ValueError, argparse.ArgumentTypeError) as exc:
                raise ConfigError(f"bad value for {key!r}: {exc}")
        if act.choices is not None and value not in act.choices:
            raise ConfigError(f"bad value for {key!r}: {value!r}")
        defaults[dest] = value
    subparser.set_defaults(**defaults)
    for act in subparser._actions:
        if act.dest in defaults:
            act.required = False
    return rest


def _emit(result, ok, rows, out):
    if isinstance(result, str):
        sys.stdout.write(result)
        return
    payload = {"ok": bool(ok), "result": result}
    if out:
        path = Path(out)
        path.mkdir(parents=True, exist_ok=True)
        io.write_json(path / "result.json", payload)
        if rows is not None:
            io.write_csv(path / "profile.csv", rows)
    else:
        sys.stdout.write(io.dumps(payload))


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        path, argv = _split_config(argv)
        if path is not None:
            argv = _apply_config(parser, path, argv)
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return EXIT_CONFIG if exc.code else EXIT_OK
        if args.command is None:
            parser.print_usage(sys.stderr)
            return EXIT_CONFIG
        result, ok, rows = args.func(args)
    except (ConfigError, ValueError, argparse.ArgumentTypeError) as exc:
        sys.stderr.write(io.dumps({"ok": False, "error": type(exc).__name__, "message": str(exc)}))
        return EXIT_CONFIG
    _emit(result, ok, rows, getattr(args, "out", None))
    if not ok:
        sys.stderr.write(io.dumps({"ok": False, "error": "property violated",
                                   "command": args.command}))
        return EXIT_VIOLATION
    return EXIT_OK

if __name__ == "__main__":
    sys.exit(main())
