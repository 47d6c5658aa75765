"""Command-line front end: ``orthmf <group> <action> [options]``.

Every action prints JSON (``--format json``) or a small text table
(``--format table``).  Exit status is 0 on success, 1 when a validation
fails or the library reports a mathematical error, and 2 on usage errors.
"""
import argparse
import json
import os
import re
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from . import _linalg as la
from .config import DEFAULT_HEIGHT_BOUND, DEFAULT_MAX_TAYLOR_DEGREE
from .domain import (act, collinearity_defect, cusp_data, factor_E, factor_L,
                     omega_of, random_isometry, random_tube_point, tube_point)
from .errors import OrthMFError
from .fourier import (CuspStabilizer, coefficient_space, evaluate, expansion_from_json,
                      expansion_to_json, symmetrize, validate)
from .jfilt import filtration_table, jacobi_decomposition, u_invariants_equal_bottom
from .lattice import (block_gram, find_isotropic_flag, flag_from_json, flag_to_json,
                      integral_unipotent_lattice, inertia,
                      lattice_from_json, lattice_to_json, new_lattice, sublattice)
from .operators import (fourier_jacobi_decomposition, quasi_pullback, rankin_cohen,
                        restrict, siegel_operator)
from .petersson import holomorphic_tensor_table, metric_report, weight_verdict
from .schur import (SplitQuadraticSpace, partition, predicted_dimension, schur_space,
                    so_restriction)

__all__ = ["main", "build_parser", "parse_blocks"]


class UsageError(Exception):
    pass


# ------------------------------------------------------------------ input

def _fjson(x):
    if isinstance(x, Fraction):
        return la.fstr(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.ndarray):
        return [_fjson(v) for v in x.tolist()]
    if isinstance(x, (list, tuple)):
        return [_fjson(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _fjson(v) for k, v in x.items()}
    if hasattr(x, "to_json"):
        return x.to_json()
    return x


def parse_lambda(text: str, n: int):
    text = text.strip()
    if text in ("", "1", "()", "triv"):
        return partition((), n)
    if text == "det":
        return partition((1,) * n, n)
    if text == "St":
        return partition((1,), n)
    m = re.fullmatch(r"wedge(\d+)", text)
    if m:
        return partition((1,) * int(m.group(1)), n)
    try:
        parts = [int(p) for p in text.strip("()[]").split(",") if p.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse partition {text!r}") from exc
    return partition(parts, n)


def parse_blocks(text: str):
    """'U,U,-2' or 'U(2),U,A2' to a Gram matrix (A_n means the negative root lattice)."""
    blocks = []
    for tok in text.split(","):
        tok = tok.strip()
        m = re.fullmatch(r"U(?:\((\d+)\))?", tok)
        if m:
            s = int(m.group(1) or 1)
            blocks.append([[0, s], [s, 0]])
            continue
        m = re.fullmatch(r"A(\d+)", tok)
        if m:
            r = int(m.group(1))
            blocks.append([[-2 if i == j else (1 if abs(i - j) == 1 else 0) for j in range(r)]
                           for i in range(r)])
            continue
        m = re.fullmatch(r"<?(-?\d+)>?", tok)
        if m:
            blocks.append([[int(m.group(1))]])
            continue
        raise UsageError(f"unknown lattice block {tok!r}")
    return block_gram(*blocks)


def _read_json(path: str):
    if path == "-":
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


def _lattice_from_args(args):
    if getattr(args, "blocks", None):
        return new_lattice(parse_blocks(args.blocks), name=args.blocks)
    if getattr(args, "gram", None):
        return new_lattice(json.loads(args.gram))
    if getattr(args, "lattice", None):
        obj = _read_json(args.lattice)
        if "lattice" in obj:
            obj = obj["lattice"]
        return lattice_from_json(obj)
    raise UsageError("give --blocks, --gram or --lattice")


def _flag_from_args(args):
    if getattr(args, "flag", None):
        obj = _read_json(args.flag)
        return flag_from_json(obj["flag"] if "flag" in obj and "e1" not in obj else obj)
    return find_isotropic_flag(_lattice_from_args(args), args.bound)


# ----------------------------------------------------------------- output

def _table(rows, header=None) -> str:
    rows = [[str(c) for c in r] for r in rows]
    if header:
        rows = [list(header)] + rows
    if not rows:
        return ""
    widths = [max(len(r[i]) for r in rows if i < len(r)) for i in range(max(map(len, rows)))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in rows]
    if header:
        lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _emit(args, obj, table=None) -> None:
    if args.format == "json" or table is None:
        print(json.dumps(_fjson(obj), indent=2, sort_keys=True))
    else:
        print(table)


# --------------------------------------------------------------- commands

def cmd_lattice(args) -> int:
    given = _flag_from_args(args) if args.flag else None
    L = given.ambient if given is not None else _lattice_from_args(args)
    if args.action == "info":
        p, q, z = inertia(L.gram)
        obj = {"lattice": lattice_to_json(L), "signature": [p, q], "rank": L.rank,
               "det": la.det(L.G)}
        _emit(args, obj, _table([["rank", L.rank], ["signature", (p, q)], ["det", la.det(L.G)]]))
        return 0
    flag = given if given is not None else find_isotropic_flag(L, args.bound, require_j=not args.no_j)
    flag.validate()
    obj = flag_to_json(flag)
    if args.action == "cusp":
        cd = cusp_data(flag)
        obj.update(vi_gram=flag.vi_gram, unipotent_basis=integral_unipotent_lattice(flag),
                   alpha0=cd.alpha0, beta0=cd.beta0)
    rows = [["e1", flag.e1], ["e2", flag.e2], ["f1", flag.f1], ["f2", flag.f2],
            ["vj", flag.vj]]
    if args.action == "cusp":
        rows += [["alpha0", obj["alpha0"]], ["unipotent basis", obj["unipotent_basis"]]]
    _emit(args, obj, _table([[k, _fjson(v)] for k, v in rows]))
    return 0


def cmd_rep(args) -> int:
    lam = parse_lambda(args.lam, args.n)
    if args.action == "dim":
        S = schur_space(SplitQuadraticSpace(args.n), lam)
        pred = predicted_dimension(lam)
        obj = {"lambda": list(lam.parts), "n": args.n, "dim": S.dim, "predicted": pred,
               "agrees": S.dim == pred}
        if args.format == "table":
            print(S.dim)
        else:
            _emit(args, obj)
        return 0 if S.dim == pred else 1
    if args.action == "weyl":
        info = so_restriction(lam)
        obj = dict(info, predicted=predicted_dimension(lam), n=args.n, **{"lambda": list(lam.parts)})
        _emit(args, obj, _table([[k, v] for k, v in sorted(obj.items())]))
        return 0
    S = schur_space(SplitQuadraticSpace(args.n), lam)
    obj = u_invariants_equal_bottom(S)
    _emit(args, obj, _table([[k, v] for k, v in sorted(obj.items())]))
    return 0 if obj["equal"] else 1


def cmd_jfilt(args) -> int:
    lam = parse_lambda(args.lam, args.n)
    if args.action == "table":
        T = filtration_table(schur_space(SplitQuadraticSpace(args.n), lam))
        obj = {"lambda": list(lam.parts), "n": args.n,
               "alpha": {str(r): a for r, a in sorted(T.alpha.items())},
               "level_dims": {str(r): T.levels[r].dim for r in sorted(T.levels)},
               "symmetric": T.is_symmetric(), "total": T.total()}
        _emit(args, obj, _table(T.as_rows(), header=["r", "alpha", "dim F^r"]))
        return 0
    obj = jacobi_decomposition(lam, args.k)
    _emit(args, obj, _table([[f"J_(k={w})", m] for w, m in obj["terms"]], header=["weight", "mult"])
          + ("\nvanishes" if obj["vanishes"] else ""))
    return 0


def cmd_domain(args) -> int:
    flag = _flag_from_args(args)
    rng = np.random.default_rng(args.seed)
    if args.action == "point":
        z = [complex(x) for x in args.z] if args.z else None
        Z = tube_point(flag, complex(args.tau), z, complex(args.w))
        om = omega_of(Z)
        obj = {"omega": [[x.real, x.imag] for x in om], "imag_norm": Z.imag_norm()}
        _emit(args, obj, _table([[i, f"{x:.6g}"] for i, x in enumerate(om)], header=["i", "omega"]))
        return 0
    worst = {"collinearity": 0.0, "cocycle_L": 0.0, "cocycle_E": 0.0, "orthogonality_E": 0.0}
    Gv = la.to_float(flag.vi_gram)
    for _ in range(args.samples):
        Z = random_tube_point(flag, rng, scale=args.scale)
        g, h = random_isometry(flag, rng), random_isometry(flag, rng)
        gZ = act(g, Z)
        worst["collinearity"] = max(worst["collinearity"],
                                    collinearity_defect(omega_of(gZ), g.as_float @ omega_of(Z)))
        jl = factor_L(g @ h, Z)
        worst["cocycle_L"] = max(worst["cocycle_L"],
                                 abs(jl - factor_L(g, act(h, Z)) * factor_L(h, Z)) / abs(jl))
        E = factor_E(g @ h, Z)
        E2 = factor_E(g, act(h, Z)) @ factor_E(h, Z)
        worst["cocycle_E"] = max(worst["cocycle_E"], np.abs(E - E2).max() / np.abs(E).max())
        Eg = factor_E(g, Z)
        worst["orthogonality_E"] = max(worst["orthogonality_E"],
                                       np.abs(Eg.T @ Gv @ Eg - Gv).max() / np.abs(Gv).max())
    ok = all(v < args.tol for v in worst.values())
    obj = dict(worst, samples=args.samples, ok=ok)
    _emit(args, obj, _table([[k, f"{v:.3g}"] for k, v in worst.items()], header=["check", "max defect"]))
    return 0 if ok else 1


def cmd_fourier(args) -> int:
    exp = expansion_from_json(_read_json(args.file))
    if args.action == "validate":
        rep = validate(exp)
        _emit(args, rep.as_dict(), "\n".join(
            [f"ok: {rep.ok}"] + [f"violation: {v}" for v in rep.violations]
            + [f"lint: {v}" for v in rep.lints]))
        return 0 if rep.ok and not rep.lints else 1
    if args.action == "symmetrize":
        group = [CuspStabilizer.make(g["gamma1"], g.get("eps", 1),
                                     [Fraction(x) for x in g["alpha"]] if g.get("alpha") else None)
                 for g in _read_json(args.group)]
        _emit(args, expansion_to_json(symmetrize(exp, group)))
        return 0
    z = [complex(x) for x in args.z] if args.z else None
    Z = tube_point(exp.flag, complex(args.tau), z, complex(args.w))
    val = evaluate(exp, Z)
    _emit(args, {"value": [[x.real, x.imag] for x in val]},
          _table([[i, f"{x:.10g}"] for i, x in enumerate(val)], header=["i", "value"]))
    return 0


def _sub_from_args(exp, args):
    L = exp.flag.ambient
    return sublattice(L, json.loads(args.basis))


def cmd_op(args) -> int:
    exp = expansion_from_json(_read_json(args.file))
    if args.action == "siegel":
        r = siegel_operator(exp)
        obj = {"weight": r.weight, "target_dim": r.target_dim, "generator": r.generator,
               "coeffs": [{"t": t, "a": a} for t, a in r.coeffs]}
        _emit(args, obj, _table([[la.fstr(t), _fjson(a)] for t, a in r.coeffs], header=["t", "a"])
              + f"\nweight {r.weight}, target dim {r.target_dim}")
        return 0
    if args.action == "fj-slice":
        slices = fourier_jacobi_decomposition(exp)
        if args.m is not None:
            m = Fraction(args.m)
            slices = {m: slices[m]} if m in slices else {}
        obj = {la.fstr(m): dict(expansion_to_json(s.expansion), holomorphy_defects=s.holomorphy_defects())
               for m, s in slices.items()}
        _emit(args, obj, _table([[la.fstr(m), len(s.expansion), len(s.holomorphy_defects())]
                                 for m, s in slices.items()], header=["m", "terms", "defects"]))
        return 0
    if args.action == "restrict":
        out = restrict(exp, _sub_from_args(exp, args))
        _emit(args, expansion_to_json(out))
        return 0
    if args.action == "quasi-pullback":
        qp = quasi_pullback(exp, _sub_from_args(exp, args), args.max_degree)
        obj = {"nu": qp.nu, "isotropic_zero": qp.isotropic_zero,
               "slices": [{"degrees": list(d), "expansion": expansion_to_json(e)}
                          for d, e in qp.slices.items()]}
        _emit(args, obj, _table([[list(d), len(e)] for d, e in qp.slices.items()],
                                header=["degrees", "terms"]) + f"\nnu = {qp.nu}")
        return 0 if qp.isotropic_zero else 1
    other = expansion_from_json(_read_json(args.other), exp.flag)
    _emit(args, expansion_to_json(rankin_cohen(exp, other)))
    return 0


def cmd_metric(args) -> int:
    obj = _read_json(args.point)
    flag = flag_from_json(obj["flag"])
    cz = lambda v: complex(*v) if isinstance(v, list) else complex(v)
    Z = tube_point(flag, cz(obj["tau"]), [cz(x) for x in obj.get("z", [])], cz(obj.get("w", 0)))
    S = None
    if args.lam is not None:
        S = coefficient_space(flag, parse_lambda(args.lam, flag.n))
    rep = metric_report(Z, S, args.k)
    d = rep.as_dict()
    ok = rep.gram_L > 0 and min(d["gram_E_eigenvalues"]) > 0
    _emit(args, d, _table([["gram_L", f"{rep.gram_L:.12g}"],
                           ["volume_factor", f"{rep.volume_factor:.12g}"],
                           ["min eig gram_E", f"{min(d['gram_E_eigenvalues']):.6g}"]]))
    return 0 if ok else 1


_K_EXPR = re.compile(r"d([+-]\d+)?")


def _verdict_line(v) -> str:
    if v.m_vanish:
        return f"M vanishes ({'; '.join(v.reasons)})" if not v.vt1 else "M vanishes (VT I)"
    if v.cusp_vanish:
        return "S vanishes (VT II); M not forced to vanish"
    return "no vanishing forced"


def cmd_check(args) -> int:
    if args.action == "tensors":
        obj = holomorphic_tensor_table(args.n, args.k)
        _emit(args, obj, "vanishes" if obj["vanishes"] else
              " + ".join(f"{name}^{m}" if m != 1 else name for name, m in obj["terms"]))
        return 0
    runs = []
    if args.lam == "d":
        m = _K_EXPR.fullmatch(args.k.replace(" ", ""))
        if not m:
            raise UsageError("with --lambda d, --k must be d, d+c or d-c")
        shift = int(m.group(1) or 0)
        for d in range(1, args.dmax + 1):
            if d + shift >= -1:
                runs.append(weight_verdict(partition((d,), args.n), d + shift, witt_index=args.witt))
    else:
        lam = parse_lambda(args.lam, args.n)
        ks = range(args.sweep[0], args.sweep[1] + 1) if args.sweep else [int(args.k)]
        runs = [weight_verdict(lam, k, witt_index=args.witt) for k in ks]
    lines = sorted({_verdict_line(v) for v in runs})
    if args.format == "json":
        _emit(args, [v.as_dict() for v in runs])
    elif args.lam == "d" and len(lines) == 1:
        print(lines[0])
    else:
        print(_table([[list(v.lam.parts), v.k, v.m_vanish, v.cusp_vanish, v.l2_class, _verdict_line(v)]
                      for v in runs], header=["lambda", "k", "M=0", "S=0", "L2", "verdict"]))
    return 0


# ----------------------------------------------------------------- parser

def _common(p, flag=False):
    p.add_argument("--format", choices=("json", "table"), default="table")
    if flag:
        p.add_argument("--blocks", help="lattice as blocks, e.g. U,U,-2 or U,U,A2")
        p.add_argument("--gram", help="Gram matrix as JSON")
        p.add_argument("--lattice", help="lattice or flag JSON file")
        p.add_argument("--flag", help="flag JSON file (overrides the search)")
        p.add_argument("--bound", type=int, default=DEFAULT_HEIGHT_BOUND)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="orthmf", description="Vector-valued orthogonal modular forms toolkit.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lattice", help="lattice data, isotropic flags and cusp lattices")
    p.add_argument("action", choices=("info", "flag", "cusp"))
    _common(p, flag=True)
    p.add_argument("--no-j", action="store_true", help="allow Witt index 1")
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("rep", help="orthogonal Schur functor spaces")
    p.add_argument("action", choices=("dim", "weyl", "uinv"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda", dest="lam", required=True)
    _common(p)
    p.set_defaults(func=cmd_rep)

    p = sub.add_parser("jfilt", help="J-filtration tables and Jacobi decompositions")
    p.add_argument("action", choices=("table", "jacobi"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--k", type=int, default=0)
    _common(p)
    p.set_defaults(func=cmd_jfilt)

    p = sub.add_parser("domain", help="tube-domain points and automorphy self-checks")
    p.add_argument("action", choices=("point", "selfcheck"))
    _common(p, flag=True)
    p.add_argument("--tau", default="1j")
    p.add_argument("--z", nargs="*")
    p.add_argument("--w", default="1j")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=float(os.environ.get("ORTHMF_TOL", 1e-9)))
    p.set_defaults(func=cmd_domain)

    p = sub.add_parser("fourier", help="validate, symmetrize or evaluate an expansion")
    p.add_argument("action", choices=("validate", "symmetrize", "eval"))
    p.add_argument("file")
    p.add_argument("--group", help="JSON list of {gamma1, eps, alpha}")
    p.add_argument("--tau", default="1j")
    p.add_argument("--z", nargs="*")
    p.add_argument("--w", default="1j")
    _common(p)
    p.set_defaults(func=cmd_fourier)

    p = sub.add_parser("op", help="Siegel, Fourier–Jacobi, restriction, quasi-pullback, Rankin–Cohen")
    p.add_argument("action", choices=("siegel", "fj-slice", "restrict", "quasi-pullback", "rankin-cohen"))
    p.add_argument("file")
    p.add_argument("--m")
    p.add_argument("--basis", help="sublattice basis rows as JSON")
    p.add_argument("--other", help="second expansion for rankin-cohen")
    p.add_argument("--max-degree", type=int, default=DEFAULT_MAX_TAYLOR_DEGREE)
    _common(p)
    p.set_defaults(func=cmd_op)

    p = sub.add_parser("metric", help="Petersson metrics at a point")
    p.add_argument("action", choices=("eval",))
    p.add_argument("--point", required=True, help="JSON with flag, tau, z, w")
    p.add_argument("--lambda", dest="lam")
    p.add_argument("--k", type=int, default=0)
    _common(p)
    p.set_defaults(func=cmd_metric)

    p = sub.add_parser("check", help="weight predicates and holomorphic tensor table")
    p.add_argument("action", choices=("weights", "tensors"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda", dest="lam", default="1")
    p.add_argument("--k", default="0")
    p.add_argument("--sweep", type=int, nargs=2, metavar=("KMIN", "KMAX"))
    p.add_argument("--dmax", type=int, default=6)
    p.add_argument("--witt", type=int, choices=(1, 2))
    _common(p)
    p.set_defaults(func=cmd_check)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command == "check" and args.action == "tensors":
        try:
            args.k = int(args.k)
        except ValueError:
            ap.error("--k must be an integer")
    if args.command == "op" and args.action in ("restrict", "quasi-pullback") and not args.basis:
        ap.error("--basis is required")
    if args.command == "op" and args.action == "rankin-cohen" and not args.other:
        ap.error("--other is required")
    if args.command == "fourier" and args.action == "symmetrize" and not args.group:
        ap.error("--group is required")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"orthmf: error: {exc}", file=sys.stderr)
        return 2
    except (OrthMFError, AssertionError) as exc:
        print(f"orthmf: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"orthmf: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
