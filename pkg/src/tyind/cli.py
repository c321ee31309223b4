"""Command-line front end; prints deterministic JSON."""
from __future__ import annotations

import argparse
import json
import sys

from .decompose import wall_decompose
from .forms import (
    DegenerateFormError,
    QuadForm,
    SpecError,
    boundary,
    form_from_json,
    lift_quadratic,
    parse_form,
)
from .gauss import OracleCapError, oracle_cap, theta, theta_bruteforce
from .groups import parse_group
from .invariants import varsigma
from .ty import TYCategory, distinguish, indicator_m, lens_invariant


class UsageError(ValueError):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def _parse_tau(text: str) -> int:
    t = text.strip()
    if t in ("+", "+1", "1"):
        return 1
    if t in ("-", "-1"):
        return -1
    raise UsageError(f"tau must be + or -, got {text!r}")


def _form_from_args(args):
    if args.gram is not None:
        if args.group is None:
            raise UsageError("--gram needs --group")
        try:
            gram = json.loads(args.gram)
        except json.JSONDecodeError as e:
            raise SpecError(f"invalid gram JSON: {e.msg}", e.pos) from None
        return form_from_json({"group": args.group, "gram": gram})
    if args.form is None:
        raise UsageError("a form is required (--form, or --group with --gram)")
    f = parse_form(args.form)
    if args.group is not None:
        G = parse_group(args.group, allow_composite=True)
        if not G.same_type(f.group):
            raise UsageError(f"--group {G} does not match the form's group {f.group}")
    return f


def _as_quadratic(f):
    return f if isinstance(f, QuadForm) else lift_quadratic(f)


def _category_from_args(args) -> TYCategory:
    if args.tau is None:
        raise UsageError("--tau is required")
    return TYCategory.from_form(_form_from_args(args), _parse_tau(args.tau))


def parse_category(spec: str) -> TYCategory:
    """`FORM|TAU` (named blocks) or JSON with `tau` and either `form` or `group` + `gram`."""
    text = spec.strip()
    if text.startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise SpecError(f"invalid JSON: {e.msg}", e.pos) from None
        if "tau" not in obj:
            raise SpecError("category JSON needs 'tau'", 0)
        form = parse_form(obj["form"]) if "form" in obj else form_from_json(obj)
        return TYCategory.from_form(form, _parse_tau(str(obj["tau"])))
    if "|" not in text:
        raise SpecError("category spec must look like FORM|TAU", len(text))
    cut = text.rindex("|")
    return TYCategory.from_form(parse_form(text[:cut]), _parse_tau(text[cut + 1:]))


def _k_values(args) -> tuple[list[int], bool]:
    if args.k is not None and args.k_range is not None:
        raise UsageError("give either --k or --k-range")
    if args.k is not None:
        if args.k < 1:
            raise UsageError("--k must be >= 1")
        return [args.k], False
    if args.k_range is not None:
        try:
            a, b = (int(x) for x in args.k_range.split(".."))
        except ValueError:
            raise UsageError("--k-range must look like A..B") from None
        if a < 1 or b < a:
            raise UsageError("--k-range needs 1 <= A <= B")
        return list(range(a, b + 1)), True
    raise UsageError("--k or --k-range is required")


def _table(rows: list[dict]) -> str:
    if not rows:
        return ""
    cols = list(rows[0])
    cells = [[c for c in cols]] + [[v if isinstance(v, str) else _dump(v) for v in (r[c] for c in cols)] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(cols))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells)


def _emit(out, rows: list[dict], multi: bool, table: bool):
    if table:
        print(_table(rows), file=out)
    elif multi:
        for r in rows:
            print(_dump(r), file=out)
    else:
        print(_dump(rows[0]), file=out)


def _cmd_decompose(args, out):
    f = _form_from_args(args)
    dec = wall_decompose(f)
    obj = {"blocks": dec.block_names(), "basis_change": dec.basis_change,
           "ops": [op.to_json() for op in dec.provenance]}
    _emit(out, [obj], False, args.table)


def _cmd_theta(args, out):
    q = _as_quadratic(_form_from_args(args))
    value = theta(q).to_json()
    if args.oracle:
        z = theta_bruteforce(q, args.cap if args.cap is not None else oracle_cap())
        obj = {"exact": value, "oracle": [z.real, z.imag]}
    else:
        obj = value
    if args.table and isinstance(obj, dict):
        _emit(out, [obj], False, True)
    else:
        print(_dump(obj), file=out)


def _cmd_sigma(args, out):
    f = _form_from_args(args)
    ks, multi = _k_values(args)
    b = boundary(f) if isinstance(f, QuadForm) else f
    rows = [{"k": k, "sigma": varsigma(b, k).to_json()} if multi else {"sigma": varsigma(b, k).to_json()}
            for k in ks]
    _emit(out, rows, multi, args.table)


def _cmd_indicator(args, out):
    C = _category_from_args(args)
    ks, multi = _k_values(args)
    if multi or args.table:
        rows = [{"k": k, "nu_m": indicator_m(C, k).to_json()} for k in ks]
        _emit(out, rows, True, args.table)
    else:
        print(_dump(indicator_m(C, ks[0]).to_json()), file=out)


def _cmd_lens(args, out):
    C = _category_from_args(args)
    ks, multi = _k_values(args)
    if multi or args.table:
        rows = [{"k": k, "lens": lens_invariant(C, k).to_json()} for k in ks]
        _emit(out, rows, True, args.table)
    else:
        print(_dump(lens_invariant(C, ks[0]).to_json()), file=out)


def _cmd_sweep(args, out):
    C = _category_from_args(args)
    ks, _ = _k_values(args)
    rows = [{"k": k, "nu_m": indicator_m(C, k).to_json(), "lens": lens_invariant(C, k).to_json()} for k in ks]
    _emit(out, rows, True, args.table)


def _lens_equal_upto(C1, C2, bound: int) -> int:
    for k in range(1, bound + 1):
        if lens_invariant(C1, k) != lens_invariant(C2, k):
            return k - 1
    return bound


def _cmd_compare(args, out):
    C1, C2 = parse_category(args.spec_a), parse_category(args.spec_b)
    verdict = distinguish(C1, C2)
    obj = {"equivalent": verdict.equivalent,
           "lens_equal_upto": _lens_equal_upto(C1, C2, args.lens_bound),
           "witness_k": verdict.witness_k}
    _emit(out, [obj], False, args.table)


def _cmd_witness(args, out):
    C1, C2 = parse_category(args.spec_a), parse_category(args.spec_b)
    print(_dump(distinguish(C1, C2).to_json()), file=out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tyind", description=__doc__)
    sub = parser.add_subparsers(dest="verb", required=True)

    def form_opts(p, category=False, ks=False):
        p.add_argument("--group", help="group spec, e.g. 'Z/8 + Z/3'")
        p.add_argument("--form", help="named blocks 'A8 + E4' or a JSON form")
        p.add_argument("--gram", help="JSON gram matrix, rows of 'num/den' entries (with --group)")
        if category:
            p.add_argument("--tau", help="sign of tau, + or -")
        if ks:
            p.add_argument("--k", type=int)
            p.add_argument("--k-range", dest="k_range", help="A..B inclusive")
        p.add_argument("--table", action="store_true", help="aligned text table instead of JSON")

    form_opts(sub.add_parser("decompose", help="orthogonal decomposition into irreducible blocks"))
    p = sub.add_parser("theta", help="Gauss sum")
    form_opts(p)
    p.add_argument("--oracle", action="store_true", help="also enumerate the sum numerically")
    p.add_argument("--cap", type=int, help="oracle cap on |G|")
    form_opts(sub.add_parser("sigma", help="sigma_k invariant of the 2-part"), ks=True)
    form_opts(sub.add_parser("indicator", help="nu_k(m)"), category=True, ks=True)
    form_opts(sub.add_parser("lens", help="|L(k,1)|"), category=True, ks=True)
    form_opts(sub.add_parser("sweep", help="indicators and lens values over a k range"), category=True, ks=True)
    for verb in ("compare", "witness"):
        text = ("equivalence verdict, lens agreement range and witness" if verb == "compare"
                else "full witness report for two inequivalent categories")
        p = sub.add_parser(verb, help=text + "; categories are FORM|TAU or JSON")
        p.add_argument("spec_a")
        p.add_argument("spec_b")
        p.add_argument("--table", action="store_true")
        if verb == "compare":
            p.add_argument("--lens-bound", dest="lens_bound", type=int, default=64)
    return parser


_COMMANDS = {
    "decompose": _cmd_decompose, "theta": _cmd_theta, "sigma": _cmd_sigma,
    "indicator": _cmd_indicator, "lens": _cmd_lens, "sweep": _cmd_sweep,
    "compare": _cmd_compare, "witness": _cmd_witness,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 1 if e.code else 0
    try:
        _COMMANDS[args.verb](args, out)
    except SpecError as e:
        print(_dump({"error": e.message, "position": e.position}), file=err)
        return 1
    except (DegenerateFormError, OracleCapError, RuntimeError, ArithmeticError) as e:
        print(_dump({"error": str(e)}), file=err)
        return 2
    except (UsageError, ValueError) as e:
        print(_dump({"error": str(e)}), file=err)
        return 1
    return 0


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
