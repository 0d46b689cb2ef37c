"""Command-line front end.

Sequences are 1-based and given in application order: ``--seq "1 3 2"``
mutates at 1 first. (Right-to-left products ``mu_2 mu_3 mu_1`` denote the
same sequence.)

Exit codes: 0 success, 1 domain error (JSON error object on stdout),
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Optional, Sequence

from .errors import DimensionMismatch, DomainError, PreconditionError
from .exchange import (
    DEFAULT_CLASSIFY_CAP,
    ExchangeMatrix,
    ExtendedExchangeMatrix,
    FoldingAutomorphism,
    classify,
    fold,
    mutate_extended_sequence,
    mutate_sequence,
)
from .linalg import frac

USAGE_EXIT = 2
DOMAIN_EXIT = 1


class UsageError(Exception):
    pass


def _num(x):
    x = frac(x)
    return int(x) if x.denominator == 1 else str(x)


def _vec(v) -> list:
    return [_num(x) for x in v]


# --------------------------------------------------------------------------
# Input parsing
# --------------------------------------------------------------------------

def parse_matrix_text(text: str) -> list[list[int]]:
    text = text.strip()
    if not text:
        raise UsageError("empty matrix input")
    if text.startswith(("{", "[")):
        try:
            obj = json.loads(text)
            if isinstance(obj, list):
                obj = {"rows": obj}
            rows = [[int(x) for x in r] for r in obj["rows"]]
        except (ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"malformed JSON matrix: {exc}") from None
        if "m" in obj and obj["m"] != len(rows):
            raise UsageError(f"declared m = {obj['m']} but {len(rows)} rows given")
        if "n" in obj and any(len(r) != obj["n"] for r in rows):
            raise UsageError(f"declared n = {obj['n']} does not match the row lengths")
        if not rows or len({len(r) for r in rows}) != 1:
            raise UsageError("matrix rows have different lengths")
        return rows
    try:
        rows = [[int(x) for x in line.split()] for line in text.splitlines() if line.strip()]
    except ValueError:
        raise UsageError("matrix rows must be integers separated by spaces") from None
    if len({len(r) for r in rows}) != 1:
        raise UsageError("matrix rows have different lengths")
    return rows


def read_matrix(spec: Optional[str]) -> ExchangeMatrix | ExtendedExchangeMatrix:
    if spec is None:
        raise UsageError("--matrix is required")
    if spec == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(spec, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {spec}: {exc.strerror}") from None
    rows = parse_matrix_text(text)
    n = len(rows[0])
    if len(rows) < n:
        raise UsageError("matrix has fewer rows than columns")
    if len(rows) == n:
        return ExchangeMatrix.of(rows)
    return ExtendedExchangeMatrix.of(rows)


def parse_vector(text: Optional[str], what: str = "--lambda") -> tuple:
    if text is None:
        raise UsageError(f"{what} is required")
    try:
        return tuple(Fraction(x) for x in text.replace(",", " ").split())
    except ValueError:
        raise UsageError(f"{what} entries must be rationals like 3 or -1/2") from None


def parse_lambdas(text: Optional[str]) -> list[tuple]:
    if text is None:
        raise UsageError("--lambda is required")
    return [parse_vector(part) for part in text.split(";") if part.strip()]


def parse_seq(text: Optional[str]) -> tuple[int, ...]:
    if not text:
        return ()
    try:
        return tuple(int(x) for x in text.replace(",", " ").split())
    except ValueError:
        raise UsageError("--seq entries must be integers") from None


def parse_sigma(text: Optional[str], n: int) -> FoldingAutomorphism:
    """``"1 3; 2"`` lists the orbits; singletons may be omitted."""
    if not text:
        raise UsageError("--sigma is required for fold")
    try:
        cycles = [tuple(int(x) for x in part.split()) for part in text.split(";") if part.strip()]
    except ValueError:
        raise UsageError("--sigma orbits must be integers") from None
    return FoldingAutomorphism.from_cycles(n, cycles)


def _top(b) -> ExchangeMatrix:
    return b.top if isinstance(b, ExtendedExchangeMatrix) else b


def _cap(args) -> int:
    if args.cap is not None:
        return args.cap
    env = os.environ.get("CLUSTERDOM_CAP")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError("CLUSTERDOM_CAP must be an integer") from None
    return DEFAULT_CLASSIFY_CAP


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------

def cmd_classify(args) -> dict:
    return classify(_top(read_matrix(args.matrix)), _cap(args)).to_json()


def cmd_mutate(args) -> dict:
    b = read_matrix(args.matrix)
    seq = parse_seq(args.seq)
    if isinstance(b, ExtendedExchangeMatrix):
        return {"rows": mutate_extended_sequence(b, seq).to_lists()}
    return {"rows": mutate_sequence(b, seq).to_lists()}


def cmd_eta(args) -> dict:
    from .mutation_maps import eta, eta_extended

    b = read_matrix(args.matrix)
    seq = parse_seq(args.seq)
    x = parse_vector(args.lam)
    if isinstance(b, ExtendedExchangeMatrix):
        return {"vector": _vec(eta_extended(b, seq, x))}
    y, trace = eta(b, seq, x)
    return {"vector": _vec(y), "signs": list(trace.signs)}


def cmd_green(args) -> dict:
    from .frames import find_maximal_green, find_maximal_red, final_frame

    b = _top(read_matrix(args.matrix))
    cap = _cap(args) if (args.cap is not None or os.environ.get("CLUSTERDOM_CAP")) else 100_000
    green = find_maximal_green(b, cap)
    red = find_maximal_red(b, cap)
    out = {
        "green": list(green.indices) if green is not None else None,
        "red": list(red.indices) if red is not None else None,
    }
    if args.emit_rays and green is not None:
        out["rays"] = [list(c) for c in final_frame(b, green.indices).g_columns()]
    return out


def cmd_neighboring(args) -> dict:
    from .affine import neighboring_structure

    return neighboring_structure(_top(read_matrix(args.matrix))).to_json()


def cmd_companion(args) -> dict:
    from .affine import comp_c, comp_c_bar

    b = _top(read_matrix(args.matrix))
    c = comp_c(b)
    return {
        "comp_c": c.to_lists(),
        "comp_c_bar": [list(r) for r in comp_c_bar(b)],
        "type": classify(c).to_json() if c.n else None,
    }


def cmd_delta(args) -> dict:
    from .affine import delta_general

    data = delta_general(_top(read_matrix(args.matrix)), _cap(args))
    out = data.to_json()
    if args.emit_rays:
        out["rays"] = [list(data.ray)]
    return out


def cmd_fold(args) -> dict:
    b = _top(read_matrix(args.matrix))
    sigma = parse_sigma(args.sigma, b.n)
    return {"rows": fold(b, sigma).to_lists(), "orbits": [list(o) for o in sigma.orbits]}


def _dominance_one(payload) -> dict:
    from .dominance import dominance

    rows, lam, depth, emit, seq, mode = payload
    b = _matrix_from_rows(rows)
    bt = b if isinstance(b, ExtendedExchangeMatrix) else ExtendedExchangeMatrix.coefficient_free(b)
    _check_dim(bt, lam)
    if seq is not None:
        return _piece_json(bt, lam, seq, mode, emit)
    res = dominance(bt, lam, depth)
    out = res.to_json()
    if emit:
        out["rays"] = _rays_of(res)
    return out


def _piece_json(bt, lam, seq, mode, emit) -> dict:
    from .dominance import dominance_piece

    piece = dominance_piece(bt, lam, seq, mode)
    out = {"kind": "piece", "lambda": _vec(lam), "seq": list(seq), "mode": mode, "region": piece.to_json()}
    if emit:
        gens = piece.generators if mode == "hull" else [r for p in piece.pieces for r in p.rays + p.lines]
        out["rays"] = [_vec(g) for g in gens]
    return out


def _integral_one(payload) -> dict:
    from .dominance import integral_dominance

    rows, lam = payload[:2]
    b = _matrix_from_rows(rows)
    bt = b if isinstance(b, ExtendedExchangeMatrix) else ExtendedExchangeMatrix.coefficient_free(b)
    _check_dim(bt, lam)
    if any(x.denominator != 1 for x in lam):
        raise PreconditionError("lambda must be integral")
    pts = integral_dominance(bt, tuple(int(x) for x in lam))
    return {"lambda": _vec(lam), "integral": [_vec(p) for p in pts]}


def _matrix_from_rows(rows):
    if len(rows) == len(rows[0]):
        return ExchangeMatrix.of(rows)
    return ExtendedExchangeMatrix.of(rows)


def _check_dim(bt: ExtendedExchangeMatrix, lam) -> None:
    if len(lam) != bt.m:
        raise DimensionMismatch(f"lambda has length {len(lam)}, expected {bt.m}")


def _rays_of(res) -> list:
    if res.segment is not None:
        return [_vec(res.segment.direction)]
    region = res.region
    if region is None:
        return []
    pieces = getattr(region, "pieces", None)
    if pieces is None:
        return [_vec(g) for g in getattr(region, "generators", ())]
    rays = []
    for p in pieces:
        rays += [_vec(r) for r in p.rays] + [_vec(l) for l in p.lines]
    return rays


def _batch(args, worker) -> dict | list:
    b = read_matrix(args.matrix)
    lams = parse_lambdas(args.lam)
    seq = parse_seq(args.seq) if args.seq is not None else None
    payloads = [(b.rows, lam, args.depth, args.emit_rays, seq, args.mode) for lam in lams]
    if args.jobs > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(worker, payloads))
    else:
        results = [worker(p) for p in payloads]
    return results[0] if len(results) == 1 else results


def cmd_dominance(args):
    return _batch(args, _dominance_one)


def cmd_integral(args):
    return _batch(args, _integral_one)


COMMANDS = {
    "classify": cmd_classify,
    "mutate": cmd_mutate,
    "eta": cmd_eta,
    "green": cmd_green,
    "neighboring": cmd_neighboring,
    "companion": cmd_companion,
    "delta": cmd_delta,
    "fold": cmd_fold,
    "dominance": cmd_dominance,
    "integral": cmd_integral,
}


# --------------------------------------------------------------------------
# Output
# --------------------------------------------------------------------------

def render_text(obj, indent: str = "") -> str:
    if isinstance(obj, list) and obj and isinstance(obj[0], dict):
        return "\n---\n".join(render_text(o, indent) for o in obj)
    if isinstance(obj, dict):
        lines = []
        for key, value in obj.items():
            if isinstance(value, dict):
                lines.append(f"{indent}{key}:")
                lines.append(render_text(value, indent + "  "))
            else:
                lines.append(f"{indent}{key}: {json.dumps(value)}")
        return "\n".join(lines)
    return indent + json.dumps(obj)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="clusterdom", description="Exact dominance regions of cluster algebras.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--matrix", help="matrix file, or - for stdin (text rows or JSON)")
    p.add_argument("--lambda", dest="lam", help='vector such as "-2 2"; several separated by ";"')
    p.add_argument("--seq", help="1-based indices in application order")
    p.add_argument("--mode", choices=("exact", "hull"), default="hull")
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--cap", type=int, default=None)
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--sigma", help='orbits for fold, such as "1 3; 2"')
    p.add_argument("--emit-rays", action="store_true", help="include ray data for external plotters")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.jobs < 1 or args.depth < 0 or (args.cap is not None and args.cap < 1):
            raise UsageError("--jobs and --cap must be positive, --depth nonnegative")
        result = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"clusterdom: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except DomainError as exc:
        print(json.dumps(exc.to_json(), sort_keys=True))
        return DOMAIN_EXIT
    if args.format == "json":
        print(json.dumps(result, sort_keys=False))
    else:
        print(render_text(result))
    return 0


if __name__ == "__main__":
    sys.exit(main())
