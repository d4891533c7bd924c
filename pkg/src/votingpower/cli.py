"""Command-line interface.

Exit codes: 0 success (or no counterexample), 2 parse/input error,
3 unsupported combination, 4 counterexample found.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import io as _io
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import __version__
from . import enumeration, inverse, limits
from .game import EnvelopeError, GameError, SimpleGame, WeightedGame
from .indices import KINDS, compute
from .io import ParseError, load_game, load_target, parse_fraction, parse_vector

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_UNSUPPORTED = 3
EXIT_COUNTEREXAMPLE = 4

DECIMALS = 6
LIMITS_COLUMNS = ["n", "quantity", "value_num", "value_den", "verdict"]
ENUM_COLUMNS = ["n", "class", "up_to_iso", "count", "seconds"]
CONJECTURES = ("C1", "C3", "C5", "C7", "C8", "C9", "C10")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (SimpleGame, WeightedGame)):
        from .io import game_to_json

        return game_to_json(x)
    if hasattr(x, "to_json"):
        return x.to_json()
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "csv_row"):
        return x.csv_row()
    return x


def _dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def _digest(spec: Optional[str]) -> Optional[str]:
    if spec is None:
        return None
    path = Path(spec)
    data = path.read_bytes() if path.is_file() else spec.encode()
    return hashlib.sha256(data).hexdigest()


class Run:
    """Collects a command's outputs and writes them with a RunManifest."""

    def __init__(self, argv, args):
        self.argv = list(argv)
        self.args = args
        self.start = _dt.datetime.now(_dt.timezone.utc).isoformat()

    def manifest(self) -> dict:
        flags = {k: v for k, v in vars(self.args).items() if k != "func"}
        digests = {}
        for key in ("game", "target"):
            if flags.get(key) is not None:
                digests[key] = _digest(flags[key])
        return {
            "command": self.args.command,
            "argv": self.argv,
            "flags": _jsonable(flags),
            "seed": flags.get("seed"),
            "tool_version": __version__,
            "input_digests": digests,
            "start": self.start,
            "end": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        }

    def emit(self, text: str, out: Optional[str] = None):
        """Write the payload to ``out`` (plus a manifest next to it) or stdout."""
        if out:
            path = Path(out)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text)
            Path(str(path) + ".manifest.json").write_text(_dumps(self.manifest()))
        else:
            sys.stdout.write(text)


def _csv_text(header, rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _decimal(x: Fraction) -> str:
    return f"{float(x):.{DECIMALS}f}"


# -- power ---------------------------------------------------------------------


def cmd_power(args, run: Run) -> int:
    g = load_game(args.game)
    pv = compute(g, args.index, method=args.method, p=args.p, normalize=args.normalize)
    lines = [f"# index {pv.kind}; decimals rounded to {DECIMALS} digits", "player\texact\tdecimal"]
    for i, v in enumerate(pv.values):
        lines.append(f"{i + 1}\t{v}\t{_decimal(v)}")
    print("\n".join(lines))
    if args.out:
        run.emit(_dumps(pv), args.out)
    return EXIT_OK


# -- enumerate -----------------------------------------------------------------


def cmd_enumerate(args, run: Run) -> int:
    classes = enumeration.CLASSES if args.game_class == "all" else (args.game_class,)
    rows = []
    for n in args.n:
        for c in classes:
            stream = enumeration.enumerate_class(n, c, up_to_iso=args.iso)
            rows.append(stream.report.csv_row())
    run.emit(_csv_text(ENUM_COLUMNS, rows), args.out)
    if args.out:
        sys.stdout.write(_csv_text(ENUM_COLUMNS, rows))
    return EXIT_OK


# -- inverse -------------------------------------------------------------------


def cmd_inverse(args, run: Run) -> int:
    sigma = load_target(args.target)
    if args.method == "bound":
        if args.index != "banzhaf":
            raise EnvelopeError("certified bounds exist for the Banzhaf index only")
        value = inverse.certified_lower_bound(sigma, args.k, args.variant, args.bound_method)
        payload = {
            "sigma": [str(s) for s in sigma],
            "k": args.k,
            "variant": args.variant,
            "method": args.bound_method,
            "certified_lower_bound": str(value),
            "valid_for": "every simple game on n >= k players (l1 norm)",
        }
        print(f"certified lower bound: {value} ({_decimal(value)})")
    else:
        if args.method == "exhaustive":
            sol = inverse.solve_exhaustive(sigma, args.game_class, args.index, args.norm, args.threads)
        else:
            cfg = inverse.LocalSearchConfig(args.max_weight, args.iterations, args.restarts, args.seed, args.plateau)
            sol = inverse.solve_local_search(sigma, args.index, args.norm, cfg)
        payload = sol.to_json()
        label = "squared distance" if sol.norm == "l2" else "distance"
        print(f"{label} ({sol.norm}): {sol.distance} ({_decimal(sol.distance)}); certificate: {sol.certificate}")
        print(f"game: {sol.game}")
        print("power: " + ", ".join(str(v) for v in sol.power.values))
    if args.out:
        run.emit(_dumps(payload), args.out)
    return EXIT_OK


# -- limits --------------------------------------------------------------------


def _role(text: str):
    text = text.strip()
    for kind in ("atomic", "ocean", "fixed"):
        if text.startswith(kind) and text[len(kind):].isdigit():
            return kind, int(text[len(kind):])
    raise ParseError(f"player role must look like ocean0, fixed0 or atomic0, got {text!r}")


def _pairs(text: str) -> list:
    out = []
    for part in text.split(";"):
        if part.strip():
            a, sep, b = part.partition("/")
            if not sep:
                raise ParseError(f"pair must look like ocean0/fixed0, got {part!r}")
            out.append((_role(a), _role(b)))
    return out


def _ints(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise ParseError(f"expected comma-separated integers, got {text!r}") from exc


def _chain(args) -> limits.Chain:
    steps = _ints(args.steps)
    if args.chain == "psi":
        return limits.psi_chain(args.q, steps)
    atomic = parse_vector(args.atomic) if args.atomic else ()
    fixed = parse_vector(args.fixed) if args.fixed else ()
    return limits.Chain(atomic, parse_vector(args.ocean), fixed, args.q, steps)


def _limits_output(args, run, rows, summary) -> int:
    text = _csv_text(LIMITS_COLUMNS, rows)
    run.emit(text, args.out)
    if args.out:
        sys.stdout.write(text)
        Path(args.out).with_suffix(".summary.json").write_text(_dumps(summary))
    else:
        sys.stdout.write(_dumps(summary))
    return EXIT_OK


def cmd_limits(args, run: Run) -> int:
    sub = args.limits_command
    if sub == "plt":
        chain = _chain(args)
        pairs = _pairs(args.pairs) if args.pairs else [(("ocean", 0), ("fixed", 0) if chain.fixed else ("ocean", 1))]
        rep = limits.plt_ratios(chain, args.index, pairs)
        return _limits_output(args, run, rep.csv_rows(), rep.summary())
    if sub == "norm1":
        rep = limits.norm1_convergence(_chain(args), args.index)
        return _limits_output(args, run, rep.csv_rows(), rep.summary())
    if sub == "atomic":
        rep = limits.atomic_limit_estimate(_chain(args), args.index)
        return _limits_output(args, run, rep.csv_rows(), rep.summary())
    if sub == "psi":
        rows, results = [], []
        for n in _ints(args.n):
            r = limits.psi_bound(n, args.index, args.q)
            verdict = "holds" if r["holds"] else "violated"
            rows.append([n, "lhs", r["lhs"].numerator, r["lhs"].denominator, verdict])
            rows.append([n, "floor", r["floor"].numerator, r["floor"].denominator, ""])
            results.append(r)
        return _limits_output(args, run, rows, {"index": args.index, "q": args.q, "results": results})
    if sub == "nucbound":
        if args.game:
            g = load_game(args.game)
            if isinstance(g, SimpleGame):
                raise ParseError("nucbound needs a weighted game")
            r = limits.nucleolus_bound_check(g, args.variant)
            rows = [
                [g.n, "lhs", r["lhs"].numerator, r["lhs"].denominator, ""],
                [g.n, f"rhs_{args.variant}", r["rhs"].numerator, r["rhs"].denominator, "holds" if r["holds"] else "violated"],
            ]
            return _limits_output(args, run, rows, r)
        r = limits.nucleolus_bound_scan(args.samples, args.seed, args.n_min, args.n_max)
        rows = []
        for variant, ratio in r["max_lhs_over_rhs"].items():
            x = Fraction(ratio)
            verdict = "violated" if r["violations"][variant] else "holds"
            rows.append([args.n_max, f"max_lhs_over_rhs_{variant}", x.numerator, x.denominator, verdict])
        return _limits_output(args, run, rows, r)
    if sub == "scan":
        cfg = limits.BoundCheckConfig(args.alpha, args.beta, args.c, args.index, args.sampler, args.n_min, args.n_max)
        r = limits.generic_bound_scan(cfg, args.samples, args.seed)
        rows = []
        for n, v in r["sup_by_n"].items():
            x = Fraction(v)
            rows.append([n, "sup_ratio", x.numerator, x.denominator, r["precision"]])
        return _limits_output(args, run, rows, r)
    raise ParseError(f"unknown limits command {sub!r}")


# -- verify --------------------------------------------------------------------

_STATEMENTS = {
    "C1": "Banzhaf power ratios of regular players approach weight ratios in non-atomic chains at any relative quota",
    "C3": "||Nuc([q;w]) - w||_1 <= Delta / min(q, 1-q) for normalized weights, and this is tight",
    "C5": "nucleolus power of atomic players converges along chains with oceanic weights O(1/n)",
    "C7": "for sigma = (3/4, 1/4, 0, ...): Banzhaf distance >= 14/37 and Shapley-Shubik distance >= 1/3 over simple games",
    "C8": "every target with n >= 3 has a weighted game within Shapley-Shubik distance 1/3",
    "C9": "Banzhaf distance from psi^n over weighted games is at least c/n for some c > 0",
    "C10": "for n >= 6 some simple game has Banzhaf vector exactly psi^n",
}

_BEYOND = {
    "C1": "infinite chains; only finite voter counts are tested",
    "C3": "all n and all weights; only sampled games with n <= 12 are tested",
    "C5": "limits along infinite chains; nucleolus evaluated for n <= 14 only",
    "C7": "all n; exhaustive only for n <= 6",
    "C8": "all targets and all n; sampled targets with exhaustive weighted search for n <= 6",
    "C9": "all n; exhaustive weighted search for n <= 6",
    "C10": "all n >= 6 (claimed known up to 18); exhaustive only at n = 6",
}


def _verify_c1(args):
    chain = limits.Chain((), (2, 1), (), args.q, _ints(args.steps or "10,20,40,80"))
    rep = limits.plt_ratios(chain, "banzhaf", [(("ocean", 0), ("ocean", 1))])
    ok = all(v["converging"] for v in rep.verdict.values())
    details = {"chain": "ocean pattern (2,1)", "q": args.q, "records": rep.csv_rows(), "verdict": rep.verdict}
    return ("consistent" if ok else "inconclusive"), None, details


def _verify_c3(args):
    scan = limits.nucleolus_bound_scan(args.samples, args.seed, 2, min(args.n or 12, 12))
    search = limits.nucleolus_tightness_search(min(args.n or 5, 8), args.seed)
    bad = scan["violations"]["conjectured"]
    found = bool(bad) or search["counterexample"]
    artifact = None
    if found:
        games = list(bad)
        if search["counterexample"]:
            games.append(search["best_game"])
        artifact = {"violating_games": games, "bound": "Delta / min(q, 1-q)"}
    details = {"scan": scan, "tightness_search": search}
    return ("counterexample" if found else "consistent"), artifact, details


def _verify_c5(args):
    steps = _ints(args.steps or "6,8,10,12,14")
    chain = limits.Chain((5,), (1,), (), args.q, steps)
    rep = limits.atomic_limit_estimate(chain, "nucleolus")
    ok = all(v["consistent_with_inverse_n"] for v in rep.verdict.values())
    return ("consistent" if ok else "inconclusive"), None, {"records": rep.csv_rows(), "verdict": rep.verdict}


def _verify_c7(args):
    top = args.n or 5
    rows = []
    found = []
    targets = {"banzhaf": Fraction(14, 37), "ssi": Fraction(1, 3)}
    for n in range(2, top + 1):
        sigma = (Fraction(3, 4), Fraction(1, 4)) + (Fraction(0),) * (n - 2)
        for kind, bound in targets.items():
            sol = inverse.solve_exhaustive(sigma, "simple", kind, "l1", args.threads)
            rows.append({"n": n, "index": kind, "min_distance": sol.distance, "game": sol.game, "target": bound})
            if sol.distance < bound:
                found.append(sol.to_json())
    artifact = {"solutions_below_target": found} if found else None
    return ("counterexample" if found else "consistent"), artifact, {"minima": rows}


def _random_sigma(rng, n):
    raw = [rng.randint(0, 20) for _ in range(n)]
    if not sum(raw):
        raw[0] = 1
    return tuple(Fraction(x, sum(raw)) for x in raw)


def _verify_c8(args):
    import random

    rng = random.Random(args.seed)
    top = args.n or 4
    rows, found = [], []
    for n in range(3, top + 1):
        targets = [tuple(Fraction(int(i == 0)) for i in range(n))]
        targets += [_random_sigma(rng, n) for _ in range(args.samples)]
        for sigma in targets:
            sol = inverse.solve_exhaustive(sigma, "weighted", "ssi", "l1", args.threads)
            rows.append({"n": n, "sigma": sigma, "min_distance": sol.distance})
            if sol.distance > Fraction(1, 3):
                found.append(sol.to_json())
    worst = max((r["min_distance"] for r in rows), default=Fraction(0))
    artifact = {"targets_above_one_third": found} if found else None
    return ("counterexample" if found else "consistent"), artifact, {"worst_min_distance": worst, "cases": rows}


def _verify_c9(args):
    top = args.n or 6
    rows, found = [], []
    for n in range(2, top + 1):
        sol = inverse.solve_exhaustive(limits.psi_vector(n), "weighted", "banzhaf", "l1", args.threads)
        rows.append({"n": n, "min_distance": sol.distance, "n_times_distance": n * sol.distance, "game": sol.game})
        if sol.distance == 0:
            found.append(sol.to_json())
    artifact = {"exact_weighted_solutions": found} if found else None
    return ("counterexample" if found else "consistent"), artifact, {"minima": rows}


def _verify_c10(args):
    n = args.n or 6
    if n < 6:
        raise ParseError("C10 concerns n >= 6")
    sol = inverse.solve_exhaustive(limits.psi_vector(n), "simple", "banzhaf", "l1", args.threads)
    details = {"n": n, "solution": sol.to_json()}
    if sol.distance == 0:
        return "consistent", None, details
    return "counterexample", {"n": n, "best": sol.to_json()}, details


_VERIFIERS = {
    "C1": _verify_c1,
    "C3": _verify_c3,
    "C5": _verify_c5,
    "C7": _verify_c7,
    "C8": _verify_c8,
    "C9": _verify_c9,
    "C10": _verify_c10,
}


def cmd_verify(args, run: Run) -> int:
    verdict, artifact, details = _VERIFIERS[args.id](args)
    report = {
        "id": args.id,
        "statement": _STATEMENTS[args.id],
        "verdict": verdict,
        "counterexample_found": artifact is not None,
        "evidence_only": True,
        "not_a_proof": "finite tests can refute but never prove these statements",
        "beyond_desk_scale": _BEYOND[args.id],
        "details": details,
    }
    if artifact is not None:
        base = Path(args.out).with_suffix("") if args.out else Path(args.artifact_dir) / args.id
        path = Path(str(base) + ".counterexample.json")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(_dumps(artifact))
        report["artifact"] = str(path)
    text = _dumps(report)
    run.emit(text, args.out)
    print(f"{args.id}: {verdict}" + (f" (artifact: {report['artifact']})" if artifact is not None else ""))
    return EXIT_COUNTEREXAMPLE if artifact is not None else EXIT_OK


# -- parser --------------------------------------------------------------------


def _common(p):
    p.add_argument("--out", help="write the payload here (a .manifest.json is written alongside)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1, help="worker processes; results do not depend on it")


def _chain_args(p, index_default="ssi"):
    p.add_argument("--chain", choices=("psi", "custom"), default="custom")
    p.add_argument("--atomic", default="", help="atomic weights, e.g. 5")
    p.add_argument("--ocean", default="1", help="ocean weight pattern, cycled, e.g. 2,1")
    p.add_argument("--fixed", default="", help="weights of fixed trailing voters")
    p.add_argument("--q", type=parse_fraction, default=Fraction(1, 2))
    p.add_argument("--steps", default="10,20,40")
    p.add_argument("--index", choices=KINDS, default=index_default)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="votingpower", description="Exact power indices and inverse problems for simple games.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("power", help="compute a power index")
    p.add_argument("--game", required=True, help='inline "[q;w1,...]" or a game JSON file')
    p.add_argument("--index", required=True, help="index kind, e.g. banzhaf or semivalue(1/3)")
    p.add_argument("--method", choices=("auto", "table", "dp"), default="auto")
    p.add_argument("--p", type=parse_fraction, default=None, help="semivalue parameter")
    p.add_argument("--normalize", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("enumerate", help="count games of a class")
    p.add_argument("--n", type=lambda s: _ints(s), required=True, help="player counts, e.g. 3 or 1,2,3")
    p.add_argument("--class", dest="game_class", choices=enumeration.CLASSES + ("all",), default="simple")
    p.add_argument("--iso", action="store_true", help="count isomorphism classes")
    _common(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("inverse", help="solve or bound the inverse power index problem")
    p.add_argument("--target", required=True, help='inline "a/b,c/d,..." or a JSON file')
    p.add_argument("--class", dest="game_class", choices=enumeration.CLASSES, default="simple")
    p.add_argument("--index", default="banzhaf")
    p.add_argument("--norm", choices=inverse.NORMS, default="l1")
    p.add_argument("--method", choices=("exhaustive", "local", "bound"), default="exhaustive")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--variant", choices=("original", "improved"), default="original")
    p.add_argument("--bound-method", choices=("lp", "triangle"), default="lp")
    p.add_argument("--max-weight", type=int, default=None)
    p.add_argument("--iterations", type=int, default=200)
    p.add_argument("--restarts", type=int, default=4)
    p.add_argument("--plateau", type=int, default=10)
    _common(p)
    p.set_defaults(func=cmd_inverse)

    p = sub.add_parser("verify", help="test a conjecture over a finite range")
    p.add_argument("id", choices=CONJECTURES)
    p.add_argument("--n", type=int, default=None, help="largest voter count tested")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--q", type=parse_fraction, default=Fraction(1, 3))
    p.add_argument("--steps", default=None)
    p.add_argument("--artifact-dir", default=".")
    _common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("limits", help="limit-theorem diagnostics (CSV output)")
    lsub = p.add_subparsers(dest="limits_command", required=True, parser_class=_Parser)
    q = lsub.add_parser("plt", help="power ratios against weight ratios")
    _chain_args(q)
    q.add_argument("--pairs", default=None, help="e.g. ocean0/fixed0;ocean0/ocean1")
    _common(q)
    q = lsub.add_parser("norm1", help="norm-1 distance between power and weights")
    _chain_args(q)
    _common(q)
    q = lsub.add_parser("atomic", help="power of atomic players along a chain")
    _chain_args(q)
    _common(q)
    q = lsub.add_parser("psi", help="distance of [q; psi^n] from psi^n against the floor")
    q.add_argument("--n", default="3")
    q.add_argument("--index", choices=limits.PSI_KINDS + ("msr", "semivalue", "raw-banzhaf"), default="ssi")
    q.add_argument("--q", type=parse_fraction, default=Fraction(1, 2))
    _common(q)
    q = lsub.add_parser("nucbound", help="nucleolus distance bound, one game or a random scan")
    q.add_argument("--game", default=None)
    q.add_argument("--variant", choices=("proven", "conjectured"), default="proven")
    q.add_argument("--samples", type=int, default=1000)
    q.add_argument("--n-min", type=int, default=2)
    q.add_argument("--n-max", type=int, default=12)
    _common(q)
    q = lsub.add_parser("scan", help="empirical constant for c * Delta^alpha / min(q,1-q)^beta")
    q.add_argument("--index", choices=KINDS, default="nucleolus")
    q.add_argument("--alpha", type=parse_fraction, default=Fraction(1))
    q.add_argument("--beta", type=parse_fraction, default=Fraction(1))
    q.add_argument("--c", type=parse_fraction, default=Fraction(2))
    q.add_argument("--sampler", choices=("random", "replica"), default="random")
    q.add_argument("--samples", type=int, default=200)
    q.add_argument("--n-min", type=int, default=2)
    q.add_argument("--n-max", type=int, default=10)
    _common(q)
    p.set_defaults(func=cmd_limits)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    run = Run(argv, args)
    try:
        return args.func(args, run)
    except EnvelopeError as exc:
        print(f"error: unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (ParseError, GameError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
