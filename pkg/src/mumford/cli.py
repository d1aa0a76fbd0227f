"""Command line front end: JSON config in, JSON out (DOT as a sidecar).

    mumford periods group.json --digits 12
    mumford aj group.json --point 3 --base 7/2
    mumford graph group.json --dot quotient.dot
"""
import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import jsonschema

from .errors import (
    EvenPrime,
    EvenPrimeUnsupported,
    MathematicalRejection,
    MumfordError,
    SchemaError,
    SingularGenerator,
)
from .padic_field import GUARD_DIGITS, check_prime

RATIONAL = r"^\s*-?[0-9]+(\s*/\s*[0-9]+)?\s*$"

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["prime", "precision", "generators"],
    "additionalProperties": False,
    "properties": {
        "prime": {"type": "integer"},
        "precision": {"type": "integer", "minimum": 8},
        "generators": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "array",
                "minItems": 2,
                "maxItems": 2,
                "items": {
                    "type": "array",
                    "minItems": 2,
                    "maxItems": 2,
                    "items": {"type": "string", "pattern": RATIONAL},
                },
            },
        },
        "depth": {"type": "integer", "minimum": 1},
        "trunc": {"type": "integer", "minimum": 0},
    },
}


@dataclass
class JobConfig:
    prime: int
    precision: int
    generators: list  # 2x2 rows of Fraction
    depth: int = 3
    trunc: int = None
    texts: list = field(default_factory=list)

    def group(self):
        from .schottky import SchottkyGroup

        return SchottkyGroup.from_rows(self.generators, self.prime, self.precision, GUARD_DIGITS)


def _path(err):
    return "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in err.absolute_path)


def parse_config(text):
    """Validate a JSON config and parse the matrix entries exactly."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}") from None
    errors = sorted(jsonschema.Draft7Validator(CONFIG_SCHEMA).iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        raise SchemaError(_path(errors[0]), errors[0].message)
    p = data["prime"]
    try:
        check_prime(p)
    except EvenPrimeUnsupported:
        raise EvenPrime("$.prime", "p = 2 is not supported") from None
    except ValueError as exc:
        raise SchemaError("$.prime", str(exc)) from None
    gens = []
    for i, rows in enumerate(data["generators"]):
        mat = []
        for r, row in enumerate(rows):
            out = []
            for c, s in enumerate(row):
                try:
                    out.append(Fraction(s.replace(" ", "")))
                except ZeroDivisionError:
                    raise SchemaError(f"$.generators[{i}][{r}][{c}]", "zero denominator") from None
            mat.append(out)
        if mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0] == 0:
            raise SingularGenerator(f"$.generators[{i}]", "matrix is not invertible")
        gens.append(mat)
    return JobConfig(p, data["precision"], gens, data.get("depth", 3), data.get("trunc"), data["generators"])


# -- commands -----------------------------------------------------------------


def cmd_info(cfg, args):
    G = cfg.group()
    gens = []
    for text, f in zip(cfg.texts, G.fixed):
        gens.append(
            {
                "matrix": text,
                "attracting": f.attractive.to_text(),
                "repelling": f.repulsive.to_text(),
                "translation_length": f.translation_length,
            }
        )
    return {"prime": cfg.prime, "genus": G.genus, "generators": gens, "certificate": G.certificate.to_json()}


def cmd_graph(cfg, args):
    from .schottky import quotient_graph

    Q = quotient_graph(cfg.group(), args.depth)
    out = Q.to_json()
    out["depth"] = args.depth
    out["stable_at"] = args.depth + 1
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(Q.to_dot())
        out["dot"] = args.dot
    return out


def _digits(args, G):
    return args.digits if args.digits is not None else G.precision


def _periods(cfg, args, G):
    from .jacobian import period_matrix
    from .schottky import quotient_graph

    Q = quotient_graph(G, args.depth)
    return period_matrix(G, args.trunc, _digits(args, G), quotient=Q)


def cmd_periods(cfg, args):
    return _periods(cfg, args, cfg.group()).to_json()


def cmd_aj(cfg, args):
    from .jacobian import abel_jacobi, reduce_mod_lattice
    from .proj_line import parse_point

    G = cfg.group()
    z = parse_point(args.point, G.prime, G.work_precision)
    z0 = parse_point(args.base, G.prime, G.work_precision)
    t = abel_jacobi(G, z, z0, args.trunc, _digits(args, G))
    P = _periods(cfg, args, G)
    rep, n = reduce_mod_lattice(P, t)
    return {"point": t.to_json(), "reduced": rep.to_json(), "n": n, "digits": min(t.digits, P.digits)}


def _pairs(text):
    out = []
    for chunk in text.split(";"):
        parts = [s.strip() for s in chunk.split(",")]
        if len(parts) != 2 or not all(parts):
            raise UsageError(f"expected 'p,q' pairs separated by ';', got {chunk!r}")
        out.append(parts)
    return out


def cmd_theta(cfg, args):
    from .proj_line import parse_point
    from .theta import ThetaSpec, theta_quotient_detail

    G = cfg.group()
    W = G.work_precision
    pairs = [tuple(parse_point(s, G.prime, W) for s in pq) for pq in _pairs(args.divisor)]
    z, w = (parse_point(s, G.prime, W) for s in _pairs(args.at)[0])
    S = ThetaSpec(G, pairs, args.trunc, _digits(args, G))
    r = theta_quotient_detail(S, z, w)
    return {"value": r.value.to_json(), "digits": r.digits, "truncation": r.truncation}


def _divisor(text, G):
    from .mint import DegreeZeroDivisor
    from .proj_line import parse_point

    terms = []
    for chunk in text.split(","):
        pt, sep, m = chunk.rpartition(":")
        if not sep:
            raise UsageError(f"expected 'point:multiplicity', got {chunk!r}")
        try:
            terms.append((parse_point(pt, G.prime, G.work_precision), int(m)))
        except ValueError:
            raise UsageError(f"bad divisor term {chunk!r}") from None
    return DegreeZeroDivisor(terms)


def _measure_word(text):
    from .schottky import GroupWord

    s = text.strip()
    if s.startswith("gamma_"):
        s = "g" + s[len("gamma_"):]
    try:
        return GroupWord.parse(s)
    except ValueError:
        raise UsageError(f"bad measure {text!r}; use gamma_j or a word such as g1*g2^-1") from None


def _check_word(w, G):
    if w.is_identity() or any(abs(s) > G.genus for s in w):
        raise UsageError(f"measure word {w} is trivial or uses a missing generator")
    return w


def cmd_integrate(cfg, args):
    from .mint import integrate_window, valuation_of_integral
    from .schottky import quotient_graph

    G = cfg.group()
    D = _divisor(args.divisor, G)
    w = _check_word(_measure_word(args.measure), G)
    Q = quotient_graph(G, args.depth)
    digits = args.digits if args.digits is not None else 10
    r = integrate_window(Q, w, D, digits=digits)
    v = valuation_of_integral(r.tree, r.cochain, D, r.base)
    return {"value": r.value.to_json(), "digits": r.digits, "window_depth": r.depth, "valuation": v}


def run_checks(G, depth=3, truncation=None, digits=None):
    """The invariant suite on one group; each entry is {"name", "ok", "detail"}."""
    from .bt_tree import build_tree
    from .graph_homology import mu_gamma, validate_harmonic
    from .jacobian import abel_jacobi, equal_mod_lattice, period_matrix
    from .mint import DegreeZeroDivisor, integrate_window, valuation_of_integral
    from .schottky import GroupWord, points_in_domain, quotient_graph

    digits = digits or 8
    checks = []
    state = {}

    def check(name, fn):
        try:
            ok, detail = fn()
        except MumfordError as exc:
            ok, detail = False, f"{exc.kind}: {exc}"
        checks.append({"name": name, "ok": bool(ok), "detail": detail})
        return ok

    def quotient():
        state["Q"] = Q = quotient_graph(G, depth)
        return Q.graph.betti_number() == G.genus, f"betti {Q.graph.betti_number()}, stable from {depth} to {depth + 1}"

    def periods():
        state["P"] = P = period_matrix(G, truncation, digits, quotient=state["Q"])
        return True, f"gram {P.gram}, {P.digits} digits"

    def harmonic():
        Q = state["Q"]
        T = build_tree(Q.window(4))
        bad = [j for j in range(1, G.genus + 1) if not validate_harmonic(T, mu_gamma(G, Q, T, GroupWord([j])))]
        return not bad, f"{len(T.leaves)} window ends" if not bad else f"not harmonic for {bad}"

    def well_defined():
        P = state["P"]
        z0, *zs = points_in_domain(G, 3)
        for z in zs:
            t = abel_jacobi(G, z, z0, truncation, digits)
            for j in range(1, G.genus + 1):
                if not equal_mod_lattice(P, abel_jacobi(G, G.act((j,), z), z0, truncation, digits), t):
                    return False, f"shift by g{j} at {z.to_text()}"
        return True, f"{len(zs)} points"

    def engines():
        Q = state["Q"]
        z0, z = points_in_domain(G, 2)
        want = min(digits, 6)
        D = DegreeZeroDivisor.difference(z, z0)
        r = integrate_window(Q, GroupWord([1]), D, digits=want)
        th = abel_jacobi(G, z, z0, truncation, want).coords[0]
        v = valuation_of_integral(r.tree, r.cochain, D, r.base)
        agree = r.value.agreement(th)
        ok = agree >= want and v == th.valuation == r.value.valuation
        return ok, f"{agree} digits, valuation {v}"

    check("ping_pong", lambda: (G.certificate is not None, f"{len(G.certificate.disks)} disks"))
    if check("quotient_graph", quotient):
        check("harmonic_measures", harmonic)
        check("riemann_vs_theta", engines)
        if check("period_matrix", periods):
            check("aj_well_defined", well_defined)
    return checks


def cmd_selfcheck(cfg, args):
    checks = run_checks(cfg.group(), depth=args.depth, truncation=args.trunc, digits=args.digits)
    return {"ok": all(c["ok"] for c in checks), "checks": checks}


COMMANDS = {
    "info": cmd_info,
    "graph": cmd_graph,
    "periods": cmd_periods,
    "aj": cmd_aj,
    "theta": cmd_theta,
    "integrate": cmd_integrate,
    "selfcheck": cmd_selfcheck,
}


class UsageError(Exception):
    kind = "UsageError"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    parser = _Parser(prog="mumford", description="Schottky groups, periods and Abel-Jacobi maps over Q_p.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("config", help="JSON config file, or - for stdin")
        sp.add_argument("--depth", type=int, default=None, help="quotient graph depth (default 3)")
        sp.add_argument("--trunc", type=int, default=None, help="theta truncation cap")
        sp.add_argument("--digits", type=int, default=None, help="certified digits requested")
        sp.add_argument("--precision", type=int, default=None, help="override the config precision")
        if name == "graph":
            sp.add_argument("--dot", help="write the quotient graph as DOT to this file")
        if name == "aj":
            sp.add_argument("--point", required=True)
            sp.add_argument("--base", required=True)
        if name == "theta":
            sp.add_argument("--divisor", required=True, help="pairs p,q separated by ';' for theta(p - q)")
            sp.add_argument("--at", required=True, help="z,w: evaluate theta(z)/theta(w)")
        if name == "integrate":
            sp.add_argument("--divisor", required=True, help="degree zero divisor 'z:1,z0:-1'")
            sp.add_argument("--measure", required=True, help="gamma_j or a group word")
    return parser


def dumps(doc):
    return json.dumps(doc, ensure_ascii=False, indent=2)


def run(command, cfg, args):
    return COMMANDS[command](cfg, args)


def main(argv=None, out=None):
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        if args.config == "-":
            text = sys.stdin.read()
        else:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        cfg = parse_config(text)
        if args.precision is not None:
            if args.precision < 8:
                raise UsageError("--precision must be at least 8")
            cfg.precision = args.precision
        if args.depth is None:
            args.depth = cfg.depth
        if args.trunc is None:
            args.trunc = cfg.trunc
        doc = run(args.command, cfg, args)
        code = 0
        if args.command == "selfcheck" and not doc["ok"]:
            code = 1
    except MathematicalRejection as exc:
        doc, code = {"error": {"kind": exc.kind, "detail": str(exc)}}, 2
    except (MumfordError, UsageError) as exc:
        doc, code = {"error": {"kind": exc.kind, "detail": str(exc)}}, 1
    except OSError as exc:
        doc, code = {"error": {"kind": "IOError", "detail": str(exc)}}, 1
    out.write(dumps(doc) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
