"""Command-line front end.

Every subcommand prints a one-line summary; reports written with ``--out``
embed the resolved configuration.  Exit status: 0 ok, 2 when a hypothesis
could not be verified at the requested horizon, 1 on error.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import BACKEND, __version__, _accel

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which we reserve for "inconclusive"
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def rational(text) -> Fraction:
    """'num/den' or an integer; floats are refused."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    s = str(text).strip()
    try:
        if "/" in s:
            n, d = s.split("/")
            return Fraction(int(n), int(d))
        return Fraction(int(s))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"malformed rational {text!r}; use num/den") from None


def _fs(x: Fraction | None) -> str | None:
    return None if x is None else f"{x.numerator}/{x.denominator}"


def _window(text) -> list[int]:
    """'a..b' or a comma list."""
    if isinstance(text, list):
        return [int(x) for x in text]
    s = str(text)
    if ".." in s:
        lo, hi = s.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in s.split(",") if x.strip()]


def _psi(args):
    from .targets import ApproxFn
    from . import psiexpr
    if getattr(args, "psi_table", None):
        return ApproxFn.from_csv(args.psi_table)
    if not args.psi:
        raise UsageError("give --psi RULE or --psi-table PATH")
    return psiexpr.parse(args.psi)


def _mode(text: str):
    """all | coprime | residue:A,B | congruence:r,t,s,u"""
    name, _, rest = text.partition(":")
    name = {"all": "all_a"}.get(name, name)
    nums = [int(x) for x in rest.split(",")] if rest else []
    return (name, *nums)


def _family(args):
    from .targets import TargetFamily
    kind = {"eq": "all", "eq-prime": "coprime", "eq-I": "residue", "eq-star": "star"}[args.set]
    return TargetFamily(kind, _psi(args), args.gamma, args.A, args.B)


def _emit(args, report: dict, csv_text: str | None = None) -> None:
    report = {"config": _config_of(args), "backend": BACKEND, "version": __version__, **report}
    if getattr(args, "out", None):
        out = Path(args.out)
        if csv_text is not None and out.suffix == ".csv":
            out.write_text(csv_text)
        else:
            out.write_text(json.dumps(report, indent=2, sort_keys=True, default=str) + "\n")
    if getattr(args, "report", None):
        Path(args.report).write_text(json.dumps(report, indent=2, sort_keys=True, default=str) + "\n")


def _config_of(args) -> dict:
    skip = {"func", "config", "out", "report", "threads"}
    return {k: (_fs(v) if isinstance(v, Fraction) else v) for k, v in sorted(vars(args).items()) if k not in skip}


# ---------------------------------------------------------------- commands

def cmd_measure(args) -> int:
    fam = _family(args)
    m = fam(args.q).measure()
    print(_fs(m) if m.denominator != 1 else str(m.numerator))
    _emit(args, {"measure": _fs(m)})
    return EXIT_OK


def cmd_overlap(args) -> int:
    from .numtheory import X_qr, mln_decompose
    from .targets import build_Eq_star
    psi = _psi(args)
    an = mln_decompose(args.q, args.r)
    X = X_qr(args.q, args.r, psi(args.q), psi(args.r), args.B)
    Eq, Er = build_Eq_star(args.q, args.A, args.B, psi), build_Eq_star(args.r, args.A, args.B, psi)
    inter = Eq.intersect(Er).measure()
    prod = Eq.measure() * Er.measure()
    print(f"m={an.m} l={an.l} n={an.n} X={_fs(X)} overlap={_fs(inter)} product={_fs(prod)}")
    _emit(args, {"m": an.m, "l": an.l, "n": an.n, "X": _fs(X), "overlap": _fs(inter), "product": _fs(prod)})
    return EXIT_OK


def cmd_moments(args) -> int:
    from .moments import overlap_moments
    rep = overlap_moments(_window(args.window), _family(args))
    print(f"psi_total={_fs(rep.psi_total)} C_prime={_fs(rep.C_prime)} C_full={_fs(rep.C_full)}")
    _emit(args, rep.to_dict(), rep.to_csv())
    return EXIT_OK


def cmd_reduce(args) -> int:
    from .moments import reduce_to_band
    fam = _family(args)
    S = _window(args.window)
    sets = {s: fam(s) for s in S}
    meas = {s: e.measure() for s, e in sets.items()}
    pairs = {(s, t): sets[s].intersect(sets[t]).measure() for i, s in enumerate(S) for t in S[i + 1:]}
    try:
        res = reduce_to_band(S, meas, pairs, args.eps, args.c_prime, args.c)
    except ValueError as e:
        print(f"inconclusive: {e}")
        _emit(args, {"status": "inconclusive", "detail": str(e)})
        return EXIT_INCONCLUSIVE
    print(f"band mass={_fs(res.total)} eps*={_fs(res.eps_star)} kept={len(res.window)} removed={len(res.removed)}")
    _emit(args, {"status": "ok", "total": _fs(res.total), "eps_star": _fs(res.eps_star),
                 "window": list(res.window), "removed": res.removed})
    return EXIT_OK


def cmd_numth(args) -> int:
    from . import numtheory as nt
    fn = args.fn
    if fn == "phi":
        v = nt.euler_phi(args.n)
    elif fn == "tau":
        v = nt.tau(args.n)
    elif fn == "omega":
        v = nt.omega(args.n)
    elif fn == "moebius":
        v = nt.moebius(args.n)
    elif fn == "factor":
        v = nt.factor(args.n)
    elif fn == "phi-qb":
        v = nt.phi_qb(args.n, args.B)
    elif fn == "Iq":
        v = list(nt.enumerate_Iq(args.n, args.A, args.B))
    elif fn == "F":
        v = nt.F_hq(args.h, args.n, args.A, args.B)
    elif fn == "H":
        v = nt.H_c(args.c, args.n, args.r, args.A, args.B)
    elif fn == "H-bound":
        v = _fs(nt.H_c_bound(args.c, args.n, args.r, args.A, args.B))
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown function {fn}")
    print(json.dumps(v) if not isinstance(v, str) else v)
    _emit(args, {"value": v})
    return EXIT_OK


def cmd_gamma_forge(args) -> int:
    from .contfrac import HorizonError, construct_gamma_for_psi
    from .targets import ApproxFn
    if args.psi_table:
        psi = ApproxFn.from_csv(args.psi_table)
    elif args.psi and args.qmax:
        psi = ApproxFn.from_rule(args.psi, args.qmax)
    else:
        raise UsageError("give --psi-table PATH, or --psi RULE with --qmax")
    try:
        _, cert = construct_gamma_for_psi(psi, args.steps, prime_denominators=args.prime)
    except HorizonError as e:
        print(f"inconclusive: {e}")
        return EXIT_INCONCLUSIVE
    text = cert.to_json()
    if args.out:
        Path(args.out).write_text(text + "\n")
    last = cert.steps[-1]
    print(f"{len(cert.steps)} steps; last window ({last.window[0]}, {last.window[1]}] a_{last.k} has {len(str(last.a_k))} digits")
    return EXIT_OK


def cmd_gamma_verify(args) -> int:
    from .contfrac import GammaCertificate, verify_certificate
    cert = GammaCertificate.from_json(Path(args.cert).read_text())
    rep = verify_certificate(cert)
    if rep.ok:
        print(f"certificate ok ({len(cert.steps)} steps)")
        return EXIT_OK
    for f in rep.failures:
        print(f)
    return EXIT_ERROR


def cmd_tail_union(args) -> int:
    from .targets import tail_union_measure
    m = tail_union_measure(_family(args), args.m, args.Q)
    exact = _fs(m)
    print(f"{float(m):.8f} (exact {exact})" if len(exact) < 60 else f"{float(m):.8f} (exact fraction, {len(exact)} chars, in the report)")
    _emit(args, {"measure": _fs(m), "decimal": float(m)})
    if args.require is not None and m < args.require:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_hits(args) -> int:
    from .bclab import montecarlo_hits
    run = montecarlo_hits(args.gamma, _psi(args), _mode(args.mode), args.Q, args.samples, args.seed, args.P)
    summ = run.summary(args.threshold)
    frac = summ["fraction_at_least_threshold"]
    print(f"median={summ['quantiles'].get('0.5')} fraction>={args.threshold}: {frac:.4f} ambiguous={summ['ambiguous_hits']}")
    _emit(args, summ, run.to_csv())
    if args.require is not None and frac < args.require:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_dichotomy(args) -> int:
    from .bclab import dichotomy_probe
    rep = dichotomy_probe(args.gamma, args.gamma2, _psi(args), args.delta, args.Q, args.samples,
                          args.seed, args.P, _mode(args.mode))
    print(f"C={_fs(rep.C)} checked={rep.checked_hits} violations={rep.containment_violations}")
    _emit(args, {"C": _fs(rep.C), "checked": rep.checked_hits, "violations": rep.containment_violations,
                 "fraction_first_exceeds": rep.fraction_first_exceeds})
    return EXIT_OK if rep.containment_violations == 0 else EXIT_ERROR


def _system(text: str):
    from .dynsim import DynSystem
    if text.startswith("x"):
        return DynSystem.times(int(text[1:]))
    if text.startswith("rot:"):
        return DynSystem.rotation(rational(text[4:]))
    raise UsageError(f"unknown system {text!r}; use xB or rot:num/den")


def cmd_mixing(args) -> int:
    from .dynsim import averaged_mixing_gaps, sigma_mixing_envelope
    from .unitcircle import CircleSet
    sys_ = _system(args.system)
    rnd = random.Random(args.seed)

    def interval():
        den = 2 ** args.level
        a, b = sorted(rnd.sample(range(den + 1), 2))
        return CircleSet.from_intervals([(Fraction(a, den), Fraction(b, den))])

    pairs = [(interval(), interval()) for _ in range(args.pairs)]
    prof = sigma_mixing_envelope(sys_, pairs, args.N)
    print(f"pairs={args.pairs} N={args.N} envelope_ok={prof.envelope_ok} worst_ratio={float(prof.worst_ratio):.6f}")
    report = {"envelope_ok": prof.envelope_ok, "worst_ratio": _fs(prof.worst_ratio),
              "gaps": [[_fs(g) for g in row] for row in prof.gaps]}
    if args.window > 1:
        report["averaged_gaps"] = [[_fs(g) for g in averaged_mixing_gaps(A, B, args.N, args.window, sys_)]
                                   for A, B in pairs]
    _emit(args, report)
    return EXIT_OK if prof.envelope_ok else EXIT_INCONCLUSIVE


def cmd_count(args) -> int:
    from .dynsim import TargetSequence, counting_experiment
    sys_ = _system(args.system)
    targets = TargetSequence.from_rule(args.radius, seed=args.seed)
    res = counting_experiment(sys_, targets, args.N, args.samples, args.eps, args.seed, K=args.K)
    print(f"pass fraction {res.pass_fraction:.4f} (K={res.K}, eps={res.eps}, N={args.N}, samples={args.samples})")
    if args.out:
        Path(args.out).write_text(res.to_csv())
    if args.report:
        Path(args.report).write_text(json.dumps({"config": _config_of(args), "manifest": res.manifest,
                                                 "pass_fraction": res.pass_fraction}, indent=2, sort_keys=True) + "\n")
    if args.require is not None and res.pass_fraction < args.require:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _events(text: str) -> list[frozenset]:
    """'0,1;1;-' -> [{0,1}, {1}, {}]."""
    if not text:
        return []
    return [frozenset() if e.strip() in ("", "-") else frozenset(int(a) for a in e.split(","))
            for e in text.split(";")]


def cmd_finspace(args) -> int:
    from .bclab import FinSpace, verify_dbc
    space = FinSpace(tuple(rational(w) for w in args.weights.split(",")), tuple(_events(args.pre)),
                     tuple(_events(args.period)))
    v = verify_dbc(space, args.C, args.horizon)
    print(f"{v.status}: limsup={_fs(v.limsup)} ({v.detail})")
    _emit(args, {"status": v.status, "limsup": _fs(v.limsup), "witness_Q": v.witness_Q, "detail": v.detail})
    return {"confirmed": EXIT_OK, "inconclusive": EXIT_INCONCLUSIVE}.get(v.status, EXIT_ERROR)


# ---------------------------------------------------------------- parser

def _family_flags(p):
    p.add_argument("--set", choices=["eq", "eq-prime", "eq-I", "eq-star"], default="eq-prime")
    p.add_argument("--gamma", type=rational, default=Fraction(0))
    p.add_argument("--psi", help="psi rule, e.g. 'c/q:c=1'")
    p.add_argument("--psi-table", help="CSV with header q,psi_num,psi_den")
    p.add_argument("--A", type=int, default=0)
    p.add_argument("--B", type=int, default=1)


def _mc_flags(p):
    p.add_argument("--psi")
    p.add_argument("--psi-table")
    p.add_argument("--mode", default="all", help="all | coprime | residue:A,B | congruence:r,t,s,u")
    p.add_argument("--Q", type=int, default=1000)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--P", type=int, default=256)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="dslab", description="Exact and Monte Carlo experiments for inhomogeneous Diophantine approximation")
    ap.add_argument("--version", action="version", version=f"dslab {__version__} ({BACKEND})")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=func)
        p.add_argument("--config", help="JSON file of flag values; explicit flags win")
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--out", help="report path (.csv or .json)")
        return p

    p = add("measure", cmd_measure, "exact measure of one target set")
    _family_flags(p)
    p.add_argument("--q", type=int, default=1)

    p = add("overlap", cmd_overlap, "overlap of two star-centred sets")
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--psi")
    p.add_argument("--psi-table")
    p.add_argument("--A", type=int, default=0)
    p.add_argument("--B", type=int, default=1)

    p = add("moments", cmd_moments, "second moments over an index window")
    _family_flags(p)
    p.add_argument("--window", default="1..10", help="a..b or a comma list")

    p = add("reduce", cmd_reduce, "shrink a window into a mass band")
    _family_flags(p)
    p.add_argument("--window", default="1..10")
    p.add_argument("--eps", type=rational, default=Fraction(1, 2))
    p.add_argument("--c-prime", type=rational, default=Fraction(4))
    p.add_argument("--c", type=rational, default=None)

    p = add("numth", cmd_numth, "arithmetic functions")
    p.add_argument("--fn", choices=["phi", "tau", "omega", "moebius", "factor", "phi-qb", "Iq", "F", "H", "H-bound"],
                   default="phi")
    p.add_argument("--n", type=int, default=1, help="n, or q for Iq/F/H")
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--h", type=int, default=0)
    p.add_argument("--c", type=int, default=0)
    p.add_argument("--A", type=int, default=0)
    p.add_argument("--B", type=int, default=1)

    p = add("gamma-forge", cmd_gamma_forge, "choose partial quotients of gamma for a psi table, with a certificate")
    p.add_argument("--psi-table")
    p.add_argument("--psi")
    p.add_argument("--qmax", type=int, default=None)
    p.add_argument("--steps", type=int, default=3)
    p.add_argument("--prime", action="store_true", help="require prime convergent denominators")

    p = add("gamma-verify", cmd_gamma_verify, "recheck a certificate")
    p.add_argument("cert")

    p = add("tail-union", cmd_tail_union, "exact measure of the union over m <= q <= Q")
    _family_flags(p)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--Q", type=int, default=100)
    p.add_argument("--require", type=rational, default=None, help="exit 2 when the measure is below this")

    p = add("hits", cmd_hits, "Monte Carlo hit counts")
    _mc_flags(p)
    p.add_argument("--gamma", type=rational, default=Fraction(0))
    p.add_argument("--threshold", type=int, default=10)
    p.add_argument("--require", type=float, default=None, help="exit 2 when the fraction at threshold is lower")

    p = add("dichotomy", cmd_dichotomy, "compare hits for two shifts")
    _mc_flags(p)
    p.add_argument("--gamma", type=rational, default=Fraction(0))
    p.add_argument("--gamma2", type=rational, default=Fraction(1, 2))
    p.add_argument("--delta", type=rational, default=Fraction(1, 100))

    p = add("mixing", cmd_mixing, "mixing gaps against the 2 mu(B) b^-n envelope")
    p.add_argument("--system", default="x2")
    p.add_argument("--pairs", type=int, default=100)
    p.add_argument("--N", type=int, default=20)
    p.add_argument("--level", type=int, default=10, help="interval endpoints are k/2**level")
    p.add_argument("--window", type=int, default=1, help="also report gaps averaged over this many steps")
    p.add_argument("--seed", type=int, default=0)

    p = add("count", cmd_count, "shrinking-target counting experiment")
    p.add_argument("--system", default="x2")
    p.add_argument("--radius", default="1/(4n)")
    p.add_argument("--N", type=int, default=1000)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eps", type=rational, default=Fraction(1, 10))
    p.add_argument("--K", type=rational, default=Fraction(10))
    p.add_argument("--report", help="manifest JSON path")
    p.add_argument("--require", type=float, default=None)

    p = add("finspace", cmd_finspace, "divergence Borel-Cantelli check on a finite space")
    p.add_argument("--weights", default="1/2,1/2")
    p.add_argument("--pre", default="", help="events before the period, e.g. '0,1;1'")
    p.add_argument("--period", default="0")
    p.add_argument("--C", type=rational, default=Fraction(2))
    p.add_argument("--horizon", type=int, default=64)
    return ap


def parse_args(argv, ap=None) -> argparse.Namespace:
    ap = ap or build_parser()
    args = ap.parse_args(argv)
    if args.command is None:
        raise UsageError(ap.format_usage().strip())
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except OSError as e:
            raise UsageError(f"cannot read config: {e}") from None
        sp = ap._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sp._actions}
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
        bad = sorted(set(cfg) - known)
        if bad:
            raise UsageError(f"unknown config keys: {', '.join(bad)}")
        conv = {a.dest: a.type for a in sp._actions if a.type}
        sp.set_defaults(**{k: (conv[k](v) if k in conv and v is not None else v) for k, v in cfg.items()})
        args = ap.parse_args(argv)
    return args


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_args(argv)
        _accel.set_threads(args.threads)
        return args.func(args)
    except (UsageError, argparse.ArgumentTypeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, OSError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
