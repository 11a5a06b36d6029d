"""Command-line front end.

Exit status: 0 on success, 1 on invalid input, 2 when a verification check
fails.  JSON output is written with sorted keys so identical invocations give
byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import discrepancy as disc
from . import family as fam
from . import faure
from . import greedy
from . import verify
from .kernels import parse_kernel, total_pair_energy
from .points import TorusPointSet, parse_point, read_points, write_points_csv
from .radical import vdc_prefix, vdc_segment

EXIT_OK, EXIT_INPUT, EXIT_CHECK = 0, 1, 2


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _frac(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def _num(v):
    return _frac(v) if isinstance(v, Fraction) else v


# argument helpers -------------------------------------------------------------

def _sigma_arg(text: str | None, base: int):
    if text is None:
        return None
    try:
        s = fam.Permutation.parse(text)
    except ValueError as e:
        raise InputError(f"malformed permutation {text!r}: {e}") from None
    if s.base != base:
        raise InputError(f"permutation {text!r} has size {s.base}, base is {base}")
    return s


def _inline_points(text: str) -> TorusPointSet:
    try:
        return TorusPointSet.from_values(parse_point(t) for t in text.split(",") if t.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise InputError(f"malformed point list {text!r}: {e}") from None


def _file_points(path: str) -> TorusPointSet:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read points file {path!r}: {e.strerror}") from None
    try:
        return read_points(text)
    except (ValueError, ZeroDivisionError, KeyError) as e:
        raise InputError(f"malformed points file {path!r}: {e}") from None


def _point_source(args) -> TorusPointSet:
    if getattr(args, "points", None):
        return _file_points(args.points)
    if getattr(args, "seed", None):
        return _inline_points(args.seed)
    if getattr(args, "vdc", None):
        sigma = _sigma_arg(args.sigma, args.base)
        return TorusPointSet.from_exact([x % 1 for x in vdc_prefix(args.vdc, args.base, sigma)])
    raise InputError("give points with --points FILE, --seed LIST or --vdc N")


def _add_point_source(p):
    p.add_argument("--points", help="file with one point per line (decimal or p/q) or a points CSV")
    p.add_argument("--seed", help="inline comma-separated points")
    p.add_argument("--vdc", type=int, metavar="N", help="first N points of a van der Corput sequence")
    p.add_argument("--base", type=int, default=2)
    p.add_argument("--sigma", help="digit permutation, e.g. 0,2,1,3")


def _kernel(text: str):
    try:
        return parse_kernel(text)
    except ValueError as e:
        raise InputError(str(e)) from None


# subcommands -------------------------------------------------------------------

def cmd_generate(args):
    kernel = _kernel(args.kernel)
    seed = _inline_points(args.seed) if args.seed else (
        _file_points(args.points) if args.points else TorusPointSet.from_exact([0]))
    try:
        policy = greedy.SelectionPolicy.parse(args.policy)
        traj = greedy.greedy_run(seed, kernel, args.n, policy, tie_tolerance=args.tie)
    except ValueError as e:
        raise InputError(str(e)) from None
    if args.format == "csv":
        return write_points_csv(traj.points)
    out = traj.to_json()
    nxt = greedy.candidate_minima(traj.points, kernel, args.tie)
    out["next_candidates"] = nxt
    if traj.chosen_exact is not None:
        level = max(q.denominator for q in traj.points.exact).bit_length()
        snapped = [greedy._snap(x, level) for x in nxt]
        if all(q is not None for q in snapped):
            out["next_candidates_exact"] = [_frac(q) for q in snapped]
    return out


def cmd_vdc(args):
    sigma = _sigma_arg(args.sigma, args.base)
    try:
        if args.start is not None:
            end = args.end if args.end is not None else args.start + args.n
            ps = vdc_segment(args.start, end, args.base, sigma)
        else:
            ps = TorusPointSet.from_exact([x % 1 for x in vdc_prefix(args.n, args.base, sigma)])
    except (ValueError, AssertionError) as e:
        raise InputError(str(e)) from None
    if args.format == "csv":
        return write_points_csv(ps)
    return {"base": args.base, "sigma": None if sigma is None else str(sigma),
            "points": ps.to_records()}


def cmd_family(args):
    m = args.m
    try:
        if args.enumerate:
            members = fam.enumerate_family(m)
            if args.format == "csv":
                return "".join(str(s) + "\n" for s in members)
            return {"m": m, "members": [str(s) for s in members]}
        if args.sample:
            members = fam.sample_family(m, args.sample, args.rng_seed)
            return {"m": m, "rng_seed": args.rng_seed, "members": [str(s) for s in members]}
        if args.member:
            s = fam.Permutation.parse(args.member)
            return {"sigma": str(s), "member": fam.family_membership(s)}
        if args.closure:
            return fam.closure_report(m)
        return {"m": m, "count": fam.family_count(m)}
    except ValueError as e:
        raise InputError(str(e)) from None


def cmd_discrepancy(args):
    if args.method == "faure":
        sigma = _sigma_arg(args.sigma, args.base)
        n = args.n or args.vdc
        if not n:
            raise InputError("faure method needs --n")
        try:
            if args.table:
                rows = faure.faure_series_table(args.base, sigma, n)
                return {"base": args.base, "method": "faure-series",
                        "rows": [{"n": i, "d": _frac(d / i), "d_plus": _frac(p / i),
                                  "d_minus": _frac(q / i)}
                                 for i, (d, p, q) in enumerate(rows, start=1)]}
            return faure.faure_report(args.base, sigma, n).to_json()
        except ValueError as e:
            raise InputError(str(e)) from None
    ps = _point_source(args)
    n = args.n or len(ps)
    try:
        return disc.extreme_discrepancy(ps, n).to_json()
    except ValueError as e:
        raise InputError(str(e)) from None


def cmd_psi(args):
    sigma = _sigma_arg(args.sigma, args.base)
    try:
        if args.fm:
            f = faure.F_m(args.base, sigma, args.fm)
            return {"base": args.base, "m": args.fm, "F_m": f.to_json()}
        if args.phi is not None:
            f = faure.phi_function(args.base, sigma, args.phi)
            return {"base": args.base, "h": args.phi, "phi": f.to_json()}
        if args.format == "csv":
            return faure.psi_csv(args.base, sigma, args.resolution)
        plus, minus, total = faure.psi_functions(args.base, sigma)
    except ValueError as e:
        raise InputError(str(e)) from None
    return {"base": args.base, "sigma": None if sigma is None else str(sigma),
            "psi_plus": plus.to_json(), "psi_minus": minus.to_json(), "psi": total.to_json(),
            "off_grid_local_maxima": [_frac(x) for x in faure.off_grid_local_maxima(args.base, sigma)]}


def cmd_alpha(args):
    sigma = _sigma_arg(args.sigma, args.base)
    rows = faure.F_m_and_alpha(args.base, sigma, args.m_max)
    if args.format == "csv":
        return "m,max_F_m_over_m\n" + "".join(f"{m},{float(v)!r}\n" for m, v in rows)
    return {"base": args.base, "sigma": None if sigma is None else str(sigma),
            "rows": [{"m": m, "value": _frac(v), "value_float": float(v)} for m, v in rows]}


SUITES = ("vdc", "round-trip", "random-policy", "candidate-count", "family",
          "geometric", "psi", "self-similarity", "explore")


def cmd_verify(args):
    kernel = _kernel(args.kernel)
    reports = []
    suites = SUITES[:-1] if args.suite == "all" else (args.suite,)
    for suite in suites:
        if suite == "vdc":
            reports.append(verify.check_greedy_equals_vdc(kernel, args.n or 256))
        elif suite == "round-trip":
            reports.append(verify.check_round_trip(kernel, args.m or 3))
        elif suite == "random-policy":
            reports.append(verify.check_random_policies(kernel, args.runs, args.n or 64,
                                                        args.rng_seed))
        elif suite == "candidate-count":
            reports.append(verify.check_candidate_count(kernel, args.n or 64, 10, args.rng_seed))
        elif suite == "family":
            reports.append(verify.check_family_equivalences(
                args.m or 2, args.n or 64, args.sample, args.rng_seed, args.workers))
        elif suite == "geometric":
            reports.append(verify.check_geometric_agreement(args.m or 2, args.n or 64))
        elif suite == "psi":
            reports.append(verify.check_psi_identities(args.m or 3))
        elif suite == "self-similarity":
            reports.append(verify.check_self_similarity(args.runs * 4, args.rng_seed))
        elif suite == "explore":
            seeds = [[0.0, 0.1], [0.0, 0.3, 0.7], [0.2, 0.25, 0.9]]
            return {"exploration": verify.explore_multi_point_seeds(kernel, seeds, args.n or 64)}
    out = {"checks": [r.to_json() for r in reports],
           "passed": all(r.passed for r in reports)}
    return out


def cmd_bound(args):
    ps = _point_source(args)
    n = args.n or len(ps)
    b = disc.leveque_bound(ps, n, args.k_max)
    d = disc.extreme_discrepancy(ps, n)
    return {"n": n, "k_max": b.k_max, "bound": b.bound, "bracket": b.bracket,
            "truncated_sum": b.truncated_sum, "tail": b.tail,
            "discrepancy": float(d.d_extreme)}


def cmd_energy(args):
    kernel = _kernel(args.kernel)
    ps = _point_source(args)
    if kernel.singular_at_zero:
        raise InputError(f"kernel {kernel.name} is singular at 0; pair energy undefined")
    total = total_pair_energy(ps, kernel)
    f0 = float(kernel(0.0))
    return {"kernel": kernel.name, "n": len(ps), "total_pair_energy": total,
            "n_f0": len(ps) * f0, "lemma_holds": total <= len(ps) * f0 + 1e-9}


# parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="vdcgreedy", description=__doc__.splitlines()[0])
    p.add_argument("--output", "-o", help="write the result to this file")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def fmt(sp):
        sp.add_argument("--format", choices=("json", "csv"), default="json")

    g = sub.add_parser("generate", help="run the greedy system")
    g.add_argument("--kernel", default="logsin")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--policy", default="smallest")
    g.add_argument("--seed", help="inline seed points (default 0)")
    g.add_argument("--points", help="seed points file")
    g.add_argument("--tie", type=float, default=greedy.DEFAULT_TIE_TOLERANCE)
    fmt(g)
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("vdc", help="radical-inverse prefix or segment")
    v.add_argument("--base", type=int, default=2)
    v.add_argument("--sigma")
    v.add_argument("--n", type=int, default=8)
    v.add_argument("--start", type=int)
    v.add_argument("--end", type=int)
    fmt(v)
    v.set_defaults(func=cmd_vdc)

    f = sub.add_parser("family", help="the permutation family P_m")
    f.add_argument("--m", type=int, default=2)
    mode = f.add_mutually_exclusive_group()
    mode.add_argument("--enumerate", action="store_true")
    mode.add_argument("--count", action="store_true")
    mode.add_argument("--sample", type=int, metavar="K")
    mode.add_argument("--member", metavar="SIGMA")
    mode.add_argument("--closure", action="store_true")
    f.add_argument("--rng-seed", type=int, default=0)
    fmt(f)
    f.set_defaults(func=cmd_family)

    d = sub.add_parser("discrepancy", help="geometric or Faure-series discrepancy")
    d.add_argument("--method", choices=("geometric", "faure"), default="geometric")
    d.add_argument("--n", type=int)
    d.add_argument("--table", action="store_true", help="faure: every n up to --n")
    _add_point_source(d)
    d.set_defaults(func=cmd_discrepancy)

    s = sub.add_parser("psi", help="export phi, psi or F_m")
    s.add_argument("--base", type=int, default=2)
    s.add_argument("--sigma")
    s.add_argument("--phi", type=int, metavar="H")
    s.add_argument("--fm", type=int, metavar="M")
    s.add_argument("--resolution", type=int, default=256)
    fmt(s)
    s.set_defaults(func=cmd_psi)

    a = sub.add_parser("alpha", help="max F_m / m for m = 1..M")
    a.add_argument("--base", type=int, default=2)
    a.add_argument("--sigma")
    a.add_argument("--m-max", type=int, default=16)
    fmt(a)
    a.set_defaults(func=cmd_alpha)

    c = sub.add_parser("verify", help="run a named check suite")
    c.add_argument("--suite", choices=SUITES + ("all",), default="all")
    c.add_argument("--kernel", default="logsin")
    c.add_argument("--n", type=int)
    c.add_argument("--m", type=int)
    c.add_argument("--runs", type=int, default=50)
    c.add_argument("--sample", type=int, default=0)
    c.add_argument("--rng-seed", type=int, default=0)
    c.add_argument("--workers", type=int, default=None)
    c.set_defaults(func=cmd_verify)

    b = sub.add_parser("bound", help="LeVeque upper bound")
    _add_point_source(b)
    b.add_argument("--n", type=int)
    b.add_argument("--k-max", type=int, default=10_000)
    b.set_defaults(func=cmd_bound)

    e = sub.add_parser("energy", help="pair-energy report")
    e.add_argument("--kernel", default="bernoulli2")
    _add_point_source(e)
    e.set_defaults(func=cmd_energy)
    return p


def _render(result) -> str:
    if isinstance(result, str):
        return result
    return json.dumps(result, sort_keys=True, indent=2, default=_num) + "\n"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    text = _render(result)
    if args.output:
        try:
            Path(args.output).write_text(text)
        except OSError as e:
            print(f"error: cannot write {args.output!r}: {e.strerror}", file=sys.stderr)
            return EXIT_INPUT
    else:
        sys.stdout.write(text)
    failed = isinstance(result, dict) and result.get("passed") is False
    return EXIT_CHECK if failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
