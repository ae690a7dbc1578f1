"""Command-line interface: ``epwgm <command> ...``.

Exit codes: 0 success, 2 parse error, 3 invariant failure, 4 degenerate
input, 5 enumeration bound exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from . import census as cen
from . import lattice as lat
from .fields import QQ, Field, PrimeField, parse_field
from .gmdata import (
    GMData,
    gm_to_lagrangian,
    lagrangian_to_gm,
    line_instance,
    pencil_instance,
    random_gm,
    symmetric_gm_surface,
)
from .lagrangian import (
    DegenerateLagrangianError,
    InvariantError,
    LagrangianData,
    dual_stratum_dim,
    is_automorphism,
    is_lagrangian,
    permutation_cycles,
    sextic_polynomial,
    strata_permutation,
    swap_symmetric_lagrangian,
)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INVARIANT = 3
EXIT_DEGENERATE = 4
EXIT_BOUND = 5


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    command: str
    inputs: list = dc_field(default_factory=list)
    field: Field | None = None
    primes: list = dc_field(default_factory=list)
    seed: int | None = None
    bound: int | None = None
    out: str | None = None
    threads: int = 1


# ---------------------------------------------------------------------------
# input / output


def read_json(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(EXIT_PARSE, f"{path}: cannot read ({exc.strerror})") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_PARSE, f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def _structural(path: str, exc: Exception) -> CliError:
    return CliError(EXIT_PARSE, f"{path}: malformed data ({type(exc).__name__}: {exc})")


def load_datum(path: str):
    """A LagrangianData or GMData from a JSON file, validated."""
    obj = read_json(path)
    if not isinstance(obj, dict):
        raise CliError(EXIT_PARSE, f"{path}: expected a JSON object")
    kind = obj.get("kind") or ("gm" if "qx" in obj else "lagrangian")
    try:
        if kind == "gm":
            return GMData.from_json(obj)
        if kind == "lagrangian":
            L = LagrangianData.from_json(obj)
            if not is_lagrangian(L.A):
                raise InvariantError("A is not a Lagrangian subspace")
            return L
    except InvariantError as exc:
        raise CliError(EXIT_INVARIANT, f"{path}: {exc}") from exc
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise _structural(path, exc) from exc
    raise CliError(EXIT_PARSE, f"{path}: unknown kind {kind!r}")


def as_lagrangian(datum) -> LagrangianData:
    if isinstance(datum, GMData):
        try:
            return gm_to_lagrangian(datum)
        except InvariantError as exc:
            raise CliError(EXIT_INVARIANT, str(exc)) from exc
    return datum


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def emit(cfg: RunConfig, payload: dict, summary: list[str]):
    """Machine output to --out (or stdout), human summary to stdout (or stderr)."""
    text = dumps(payload)
    if cfg.out:
        Path(cfg.out).write_text(text)
        for line in summary:
            print(line)
    else:
        for line in summary:
            print(line, file=sys.stderr)
        sys.stdout.write(text)


def _parse_matrix(obj, field: Field, path: str):
    try:
        M = [[field(x) if not isinstance(x, str) else field.decode(x) for x in row] for row in obj]
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise _structural(path, exc) from exc
    if len(M) != 6 or any(len(r) != 6 for r in M):
        raise CliError(EXIT_PARSE, f"{path}: expected a 6x6 matrix")
    return M


# ---------------------------------------------------------------------------
# commands


def cmd_gen(cfg: RunConfig, args) -> int:
    f = cfg.field or QQ
    kind = args.kind
    try:
        if kind == "gm":
            G = random_gm(cfg.seed, f, args.dim_w)
        elif kind == "line":
            G = line_instance(cfg.seed, f)
        elif kind == "pencil":
            G = pencil_instance(cfg.seed, f)
        elif kind == "symmetric":
            G, phi = symmetric_gm_surface(cfg.seed, f)
        elif kind == "swap":
            L, phi = swap_symmetric_lagrangian(cfg.seed, f)
    except ValueError as exc:
        raise CliError(EXIT_INVARIANT, str(exc)) from exc
    if kind == "swap":
        payload = L.to_json()
        payload["symmetry"] = [[f.encode(x) for x in r] for r in phi]
        summary = [f"swap-symmetric Lagrangian over {f.name}, seed {cfg.seed}"]
    else:
        payload = G.to_json()
        if kind == "symmetric":
            payload["symmetry"] = [[f.encode(x) for x in r] for r in phi]
        summary = [f"{kind} GM datum over {f.name}, seed {cfg.seed}, dim W = {G.W.dim}"]
    emit(cfg, payload, summary)
    return EXIT_OK


def cmd_convert(cfg: RunConfig, args) -> int:
    path = cfg.inputs[0]
    datum = load_datum(path)
    if isinstance(datum, GMData):
        if args.direction == "lagrangian-to-gm":
            raise CliError(EXIT_PARSE, f"{path}: input is a GM datum")
        L = as_lagrangian(datum)
        G = datum
        payload = L.to_json()
    else:
        if args.direction == "gm-to-lagrangian":
            raise CliError(EXIT_PARSE, f"{path}: input is a Lagrangian datum")
        L = datum
        if not L.is_canonical_chart():
            raise CliError(EXIT_INVARIANT, "datum is not in the canonical chart V5 = <e1..e5>, x = e6")
        try:
            G = lagrangian_to_gm(L)
        except InvariantError as exc:
            raise CliError(EXIT_INVARIANT, str(exc)) from exc
        payload = G.to_json()
    d = dual_stratum_dim(L, L.V5cov)
    emit(cfg, payload, [f"dim W = {G.W.dim}", f"dual stratum at the Plücker point = {d}"])
    return EXIT_OK


def cmd_census(cfg: RunConfig, args) -> int:
    L = as_lagrangian(load_datum(cfg.inputs[0]))
    f = L.field
    if cfg.primes:
        primes = cfg.primes
    elif isinstance(f, PrimeField):
        primes = [f.p]
    else:
        primes = list(cen.DEFAULT_PRIMES)
    bound = cfg.bound or cen.DEFAULT_POINT_BOUND
    reports = []
    lines = []
    for p in primes:
        if isinstance(f, PrimeField) and f.p != p:
            raise CliError(EXIT_INVARIANT, f"datum lives over F_{f.p}; cannot scan over F_{p}")
        t0 = time.perf_counter()
        try:
            rep = cen.census(L, [p], cfg.threads, bound)[0]
        except cen.PointBoundError as exc:
            raise CliError(EXIT_BOUND, str(exc)) from exc
        reports.append(rep.to_json())
        if rep.bad_prime:
            lines.append(f"p = {p}: bad prime ({rep.note})")
            continue
        lines.append(f"p = {p}: {rep.total} points, {time.perf_counter() - t0:.2f} s")
        lines.append("  k  stratum  dual")
        for k in sorted(set(rep.counts) | set(rep.dual_counts)):
            lines.append(f"  {k:>2} {rep.counts.get(k, 0):>8} {rep.dual_counts.get(k, 0):>5}")
        lines.append(f"  stratum >= 4: {rep.count_at_least(4)}")
    emit(cfg, {"schema_version": SCHEMA_VERSION, "kind": "census_run", "reports": reports}, lines)
    return EXIT_OK


def _sextic_verification(S, L: LagrangianData, primes) -> dict:
    """Compare the sextic with the census on the chart e6-coordinate != 0."""
    for p in primes:
        try:
            Lp = cen.reduce_mod_p(L, p) if L.field == QQ else L
            Sp = S.reduce_mod(p) if L.field == QQ else S
        except (cen.BadPrimeError, ZeroDivisionError):
            continue
        if Sp.is_zero():
            continue
        P = cen.projective_points(6, p)
        P = P[P[:, 5] != 0]
        s = cen.strata_of_points(Lp, P)
        vanish = Sp.evaluate_mod_p(P, p) == 0
        grads = np.stack([Sp.partial(i).evaluate_mod_p(P, p) for i in range(6)], axis=1)
        sing = (grads == 0).all(axis=1)
        return {"prime": p, "points_checked": int(len(P)),
                "vanishing_mismatches": int(((s >= 1) != vanish).sum()),
                "singular_mismatches": int(((s >= 2) != sing).sum())}
    return {"prime": None, "points_checked": 0, "note": "no good prime available"}


def cmd_sextic(cfg: RunConfig, args) -> int:
    L = as_lagrangian(load_datum(cfg.inputs[0]))
    try:
        S = sextic_polynomial(L, workers=cfg.threads)
    except DegenerateLagrangianError as exc:
        raise CliError(EXIT_DEGENERATE, str(exc)) from exc
    except ValueError as exc:
        raise CliError(EXIT_INVARIANT, str(exc)) from exc
    f = L.field
    primes = cfg.primes or ([f.p] if isinstance(f, PrimeField) else list(cen.DEFAULT_PRIMES))
    check = _sextic_verification(S, L, primes)
    payload = {"schema_version": SCHEMA_VERSION, "kind": "sextic", "field": f.to_json(),
               "degree": S.degree, "terms": len(S.coeffs), "coefficients": S.to_json(),
               "verification": check}
    lines = [f"degree {S.degree}, {len(S.coeffs)} nonzero terms over {f.name}"]
    if check["prime"] is not None:
        lines.append(f"checked {check['points_checked']} chart points over F_{check['prime']}: "
                     f"{check['vanishing_mismatches']} vanishing mismatches, "
                     f"{check['singular_mismatches']} singular-locus mismatches")
    emit(cfg, payload, lines)
    return EXIT_OK


def _read_gram(args) -> lat.IntegralLattice:
    src = args.gram
    if src is None:
        raise CliError(EXIT_PARSE, "--gram is required")
    if Path(src).exists():
        obj = read_json(src)
        where = src
    else:
        try:
            obj = json.loads(src)
        except json.JSONDecodeError as exc:
            raise CliError(EXIT_PARSE, f"--gram:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
        where = "--gram"
    if isinstance(obj, list):
        obj = {"gram": obj}
    try:
        return lat.IntegralLattice.from_json(obj)
    except (KeyError, TypeError) as exc:
        raise _structural(where, exc) from exc
    except ValueError as exc:
        raise CliError(EXIT_INVARIANT, f"{where}: {exc}") from exc


def _fmt_subgroup(H) -> list:
    return [list(h) for h in sorted(H)]


def cmd_lattice(cfg: RunConfig, args) -> int:
    L = _read_gram(args)
    payload = {"schema_version": SCHEMA_VERSION, "kind": "lattice", "query": args.query,
               "gram": [list(r) for r in L.gram]}
    lines = []
    try:
        if args.query == "discriminant":
            F = lat.discriminant_form(L)
            payload.update({"orders": list(F.orders), "order": F.order, "even": F.even})
            if F.even:
                bound = cfg.bound or lat.DEFAULT_BOUND
                iso = lat.isotropic_subgroups(F, bound)
                payload["isotropic_subgroups"] = [_fmt_subgroup(H) for H in iso]
            group = " x ".join(f"Z/{d}" for d in F.orders) or "0"
            lines.append(f"discriminant group {group} (order {F.order})")
        elif args.query == "overlattices":
            bound = cfg.bound or lat.DEFAULT_BOUND
            raw = lat.overlattices(L, bound)
            classes = lat.overlattice_classes(L, bound)
            payload["overlattices"] = [
                {"gram": [list(r) for r in o.lattice.gram], "index": o.index,
                 "subgroup": _fmt_subgroup(o.subgroup), "even": o.lattice.is_even(),
                 "det": o.lattice.det, "isometric_to_U": lat.is_isometric_to_U(o.lattice)}
                for o in classes]
            payload["raw_count"] = len(raw)
            if not classes:
                lines.append("none")
            for o in classes:
                tag = " (isometric to U)" if lat.is_isometric_to_U(o.lattice) else ""
                lines.append(f"index {o.index}: {[list(r) for r in o.lattice.gram]}{tag}")
        elif args.query == "divisor":
            if args.x is None or args.y is None:
                raise CliError(EXIT_PARSE, "divisor needs --x and --y")
            D = lat.divisor_membership(L, args.h_index, args.x, args.y, cfg.bound or 10)
            payload.update({"x": args.x, "y": args.y, "vector": D})
            lines.append("none within bound" if D is None else f"D = {D}")
    except lat.BoundExceededError as exc:
        raise CliError(EXIT_BOUND, str(exc)) from exc
    except lat.OddLatticeError as exc:
        raise CliError(EXIT_INVARIANT, str(exc)) from exc
    except ValueError as exc:
        raise CliError(EXIT_INVARIANT, str(exc)) from exc
    emit(cfg, payload, lines)
    return EXIT_OK


def cmd_auto(cfg: RunConfig, args) -> int:
    L = as_lagrangian(load_datum(cfg.inputs[0]))
    f = L.field
    mpath = args.matrix
    if mpath is None:
        raise CliError(EXIT_PARSE, "--matrix is required")
    M = _parse_matrix(read_json(mpath), f, mpath)
    try:
        verdict = is_automorphism(M, L)
    except ValueError as exc:
        raise CliError(EXIT_INVARIANT, f"{mpath}: {exc}") from exc
    payload = {"schema_version": SCHEMA_VERSION, "kind": "automorphism", "verdict": verdict}
    lines = [f"automorphism: {'yes' if verdict else 'no'}"]
    if verdict:
        if args.points:
            raw = read_json(args.points)
            try:
                pts = [[f.decode(x) if isinstance(x, str) else f(x) for x in r] for r in raw]
            except (TypeError, ValueError, ZeroDivisionError) as exc:
                raise _structural(args.points, exc) from exc
        elif isinstance(f, PrimeField):
            pts = cen.scan_strata(L, cfg.threads, cfg.bound or cen.DEFAULT_POINT_BOUND).dual_witnesses.get(3, [])
        else:
            pts = [list(L.V5cov)]
        try:
            perm = strata_permutation(M, L, pts)
        except ValueError as exc:
            raise CliError(EXIT_INVARIANT, str(exc)) from exc
        cycles = permutation_cycles(perm)
        payload.update({"points": [[f.encode(x) for x in p] for p in pts],
                        "permutation": list(perm), "cycles": [list(c) for c in cycles]})
        lines.append(f"{len(pts)} dual stratum-3 points, cycles: "
                     + " ".join("(" + " ".join(str(i) for i in c) + ")" for c in cycles))
    emit(cfg, payload, lines)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _prime_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad prime list {text!r}") from exc


def _field(text: str) -> Field:
    try:
        return parse_field(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON result here (default: stdout)")
    common.add_argument("--threads", type=int, default=1, help="worker threads (output does not depend on it)")
    common.add_argument("--bound", type=int, help="enumeration bound (points, group order, or search box)")

    ap = argparse.ArgumentParser(prog="epwgm", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate a random or engineered instance")
    g.add_argument("--kind", choices=["gm", "line", "pencil", "symmetric", "swap"], default="gm")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--field", type=_field, default=QQ, help="Q or a prime p")
    g.add_argument("--dim-w", type=int, default=7, help="dim W for --kind gm (6..10)")

    c = sub.add_parser("convert", parents=[common], help="GM datum <-> Lagrangian datum")
    c.add_argument("input")
    c.add_argument("--direction", choices=["auto", "gm-to-lagrangian", "lagrangian-to-gm"], default="auto")

    s = sub.add_parser("census", parents=[common], help="stratum histograms over F_p")
    s.add_argument("input")
    s.add_argument("--prime", type=_prime_list, help="comma-separated primes (default 5,7,11)")

    x = sub.add_parser("sextic", parents=[common], help="extract the sextic equation")
    x.add_argument("input")
    x.add_argument("--prime", type=_prime_list, help="primes tried for the verification block")

    lt = sub.add_parser("lattice", parents=[common], help="discriminant forms, overlattices, divisors")
    lt.add_argument("query", choices=["discriminant", "overlattices", "divisor"])
    lt.add_argument("--gram", help="Gram matrix as JSON text or a file path")
    lt.add_argument("--h-index", type=int, default=0, help="basis index of the square-10 class")
    lt.add_argument("--x", type=int)
    lt.add_argument("--y", type=int)

    au = sub.add_parser("auto", parents=[common], help="automorphism test and action on dual stratum-3 points")
    au.add_argument("input")
    au.add_argument("--matrix", help="JSON 6x6 matrix")
    au.add_argument("--points", help="JSON list of covectors (default: all over F_p, or the Plücker point)")
    return ap


COMMANDS = {"gen": cmd_gen, "convert": cmd_convert, "census": cmd_census,
            "sextic": cmd_sextic, "lattice": cmd_lattice, "auto": cmd_auto}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(command=args.command,
                    inputs=[args.input] if hasattr(args, "input") else [],
                    field=getattr(args, "field", None),
                    primes=getattr(args, "prime", None) or [],
                    seed=getattr(args, "seed", None),
                    bound=args.bound, out=args.out, threads=max(1, args.threads))
    try:
        return COMMANDS[args.command](cfg, args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
