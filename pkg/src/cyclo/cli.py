"""``cyclo`` command-line entry point and the JSON-lines result cache.

Exit codes:
    0  success
    1  unexpected internal error
    2  usage error (unknown flag, malformed number)
    3  domain error (argument out of range)
    4  budget exceeded (tau cap for B)
    5  cache / I/O failure
    6  configuration error (unknown psi name)
    7  integrity failure (inexact division)
    8  resource limit (sieve too large)
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from .bounds import bateman_check, chain_bound, maier_constants
from .cyclotomic import cyclotomic, height_A, height_A0
from .errors import CycloError, PersistenceError
from .experiments import (
    KnownHeights,
    ScanSummary,
    estimate_maier_C,
    lemma31_density,
    lemma32_profile,
    lemma33_count,
    mertens_sum_check,
    scan_heights,
    write_csv,
)
from .polynomial import poly_to_json
from .search import DEFAULT_MAX_TAU, height_B

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE = 0, 1, 2
EXIT_DOMAIN, EXIT_BUDGET, EXIT_IO, EXIT_CONFIG, EXIT_INTEGRITY, EXIT_RESOURCE = 3, 4, 5, 6, 7, 8

CACHE_ENV = "CYCLO_CACHE"
CACHE_VERSION = "1"

# -- persistent cache -------------------------------------------------------------


@dataclass(frozen=True)
class CacheEntry:
    n: int
    A: int
    A0: int
    A0_witness: int | None = None
    B: int | None = None
    B_witness: tuple[int, ...] | None = None

    def __post_init__(self):
        if (self.B is None) != (self.B_witness is None):
            raise PersistenceError(f"cache entry for n={self.n}: B and B_witness go together")

    def to_line(self) -> str:
        doc = {"n": self.n, "A": str(self.A), "A0": str(self.A0)}
        if self.A0_witness is not None:
            doc["A0_witness"] = str(self.A0_witness)
        if self.B is not None:
            doc["B"] = str(self.B)
            doc["B_witness"] = list(self.B_witness)
        doc["v"] = CACHE_VERSION
        return json.dumps(doc, separators=(",", ":"))

    @classmethod
    def from_doc(cls, doc: dict) -> "CacheEntry":
        w = doc.get("A0_witness")
        b = doc.get("B")
        bw = doc.get("B_witness")
        return cls(
            int(doc["n"]),
            int(doc["A"]),
            int(doc["A0"]),
            None if w is None else int(w),
            None if b is None else int(b),
            None if bw is None else tuple(int(d) for d in bw),
        )

    def known(self) -> KnownHeights:
        return KnownHeights(self.A, self.A0, self.A0_witness, self.B, self.B_witness)


def _parse_line(line: str) -> CacheEntry:
    doc = json.loads(line)
    if not isinstance(doc, dict):
        raise ValueError("not an object")
    return CacheEntry.from_doc(doc)


def cache_load(path: str | os.PathLike) -> dict[int, CacheEntry]:
    """Read a JSON-lines cache; later lines for the same n win.

    A malformed final line without a trailing newline is a torn write: it is
    cut from the file with a warning.  Any other malformed line is fatal.
    """
    path = Path(path)
    if not path.exists():
        return {}
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise PersistenceError(f"cannot read cache {path}: {exc}") from exc
    lines = raw.split(b"\n")
    entries: dict[int, CacheEntry] = {}
    offset = 0
    for i, line in enumerate(lines):
        last = i == len(lines) - 1
        if line.strip():
            try:
                e = _parse_line(line.decode("utf-8"))
            except (ValueError, KeyError, TypeError, PersistenceError, UnicodeDecodeError) as exc:
                if last:
                    warnings.warn(f"cache {path}: truncating torn last line", RuntimeWarning, stacklevel=2)
                    try:
                        with open(path, "r+b") as fh:
                            fh.truncate(offset)
                    except OSError as err:
                        raise PersistenceError(f"cannot truncate cache {path}: {err}") from err
                    break
                raise PersistenceError(f"cache {path}: malformed line {i + 1}: {exc}") from exc
            entries[e.n] = e
        offset += len(line) + 1
    return entries


def cache_append(path: str | os.PathLike, entries: Iterable[CacheEntry]) -> int:
    text = "".join(e.to_line() + "\n" for e in entries)
    if not text:
        return 0
    try:
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(text)
            fh.flush()
    except OSError as exc:
        raise PersistenceError(f"cannot write cache {path}: {exc}") from exc
    return text.count("\n")


def _cache_path(args) -> Path | None:
    if args.no_cache:
        return None
    p = args.cache or os.environ.get(CACHE_ENV)
    return Path(p) if p else None


# -- argument parsing -------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text}")
    return v


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative: {text}")
    return v


def _real(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "csv", "json"), default="text")
    common.add_argument("--threads", type=_nonneg, default=1, help="worker processes (0 = one per CPU)")
    common.add_argument("--cache", help=f"JSON-lines result cache (default: ${CACHE_ENV})")
    common.add_argument("--no-cache", action="store_true")

    p = _Parser(prog="cyclo", description="Heights of cyclotomic polynomials and divisors of x^n - 1.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, help_ in (("phi", "coefficients of Phi_n"), ("A", "height of Phi_n"),
                        ("A0", "max height over Phi_d, d | n"), ("bound", "divisor-product bounds on B(n)")):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("n", type=_positive)

    s = sub.add_parser("B", parents=[common], help="max height over divisors of x^n - 1")
    s.add_argument("n", type=_positive)
    s.add_argument("--max-tau", type=_positive, default=DEFAULT_MAX_TAU)
    s.add_argument("--prune", action="store_true")

    s = sub.add_parser("scan", parents=[common], help="per-n height table over 2..X")
    s.add_argument("--max", type=_positive, required=True, dest="x")
    s.add_argument("--psi", required=True)
    s.add_argument("--B-tau", type=_nonneg, default=0, dest="b_tau")
    s.add_argument("--out", help="CSV destination (default stdout)")
    s.add_argument("--summary", help="JSON summary destination (default stderr)")

    s = sub.add_parser("lemma31", parents=[common], help="omega density count")
    s.add_argument("--max", type=_positive, required=True, dest="x")
    s.add_argument("--gamma", type=_real, required=True)

    s = sub.add_parser("lemma32", parents=[common], help="large p_k counts against the bound")
    s.add_argument("--max", type=_positive, required=True, dest="x")
    s.add_argument("--gamma", type=_real, required=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--C2", type=_real)
    g.add_argument("--fit", action="store_true")
    s.add_argument("--all-k", action="store_true", help="also report k outside the lemma range")

    s = sub.add_parser("lemma33", parents=[common], help="tail count against 2 eps x")
    s.add_argument("--max", type=_positive, required=True, dest="x")
    s.add_argument("--gamma", type=_real, required=True)
    s.add_argument("--eps", type=_real, required=True)
    s.add_argument("--C2", type=_real, help="explicit C2 (default: fitted at --max)")

    s = sub.add_parser("maier-C", parents=[common], help="empirical lower bound for the Maier constant")
    s.add_argument("--max", type=_positive, required=True, dest="x")

    s = sub.add_parser("mertens", parents=[common], help="prime-power sum check")
    s.add_argument("--limit", type=_positive, required=True)

    s = sub.add_parser("constants", parents=[common], help="(b, eps, c0) from the grid search")
    s.add_argument("--gamma", type=_real, required=True)
    s.add_argument("--C2", type=_real, default=1.0)
    return p


# -- output ---------------------------------------------------------------------


def _jsonable(v):
    if isinstance(v, bool) or v is None or isinstance(v, (float, str)):
        return v
    if isinstance(v, int):
        return str(v)
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "__dataclass_fields__"):
        return _jsonable(asdict(v))
    return str(v)


def _emit(fmt: str, doc: dict, out) -> None:
    """One flat record: key: value lines, one CSV row with header, or JSON."""
    if fmt == "json":
        print(json.dumps(_jsonable(doc), sort_keys=True), file=out)
    elif fmt == "csv":
        keys = list(doc)
        print(",".join(keys), file=out)
        print(",".join(_cell(doc[k]) for k in keys), file=out)
    else:
        width = max(len(k) for k in doc)
        for k, v in doc.items():
            print(f"{k:<{width}}  {_cell(v, ' ')}", file=out)


def _cell(v, sep=";") -> str:
    if v is None:
        return ""
    if isinstance(v, (list, tuple)):
        return sep.join(str(x) for x in v)
    return str(v)


def _emit_table(fmt: str, rows: list[dict], out) -> None:
    if fmt == "json":
        print(json.dumps(_jsonable(rows), sort_keys=True), file=out)
        return
    if not rows:
        return
    keys = list(rows[0])
    if fmt == "csv":
        print(",".join(keys), file=out)
        for r in rows:
            print(",".join(_cell(r[k]) for k in keys), file=out)
        return
    cells = [[_cell(r[k], " ") for k in keys] for r in rows]
    widths = [max(len(k), *(len(c[i]) for c in cells)) for i, k in enumerate(keys)]
    print("  ".join(k.rjust(w) for k, w in zip(keys, widths)), file=out)
    for c in cells:
        print("  ".join(v.rjust(w) for v, w in zip(c, widths)), file=out)


# -- subcommands ------------------------------------------------------------------


def _cmd_phi(args, out):
    f = cyclotomic(args.n)
    if args.format == "text":
        print(json.dumps([int(c) for c in f.coeffs]), file=out)
        print(str(f), file=out)
    else:
        _emit(args.format, {"n": args.n, "degree": f.degree, "coeffs": poly_to_json(f)}, out)


def _cmd_A(args, out):
    _emit(args.format, {"n": args.n, "A": height_A(args.n)}, out)


def _cmd_A0(args, out):
    value, witness = height_A0(args.n)
    _emit(args.format, {"n": args.n, "A0": value, "witness": witness}, out)


def _cmd_B(args, out):
    path = _cache_path(args)
    cached = cache_load(path).get(args.n) if path else None
    if cached is not None and cached.B is not None and not args.prune:
        b, witness, examined = cached.B, cached.B_witness, None
    else:
        res = height_B(args.n, max_tau=args.max_tau, prune=args.prune, workers=args.threads)
        b, witness, examined = res.b_value, res.witness, res.subsets_examined
        if path:
            a0, w = height_A0(args.n)
            cache_append(path, [CacheEntry(args.n, height_A(args.n), a0, w, b, witness)])
    doc = {"n": args.n, "B": b, "witness": list(witness)}
    if examined is not None:
        doc["subsets_examined"] = examined
    _emit(args.format, doc, out)


def _cmd_bound(args, out):
    first, second = chain_bound(args.n)
    b = bateman_check(args.n)
    doc = {"n": args.n, "prod_bound": first, "A0_bound": second, "A": b.A, "omega": b.k,
           "bateman_holds": b.holds}
    for name, cmp in b.bpv.items():
        doc[f"bpv[{name}]"] = "n/a" if cmp is None else cmp.status
    _emit(args.format, doc, out)


def _open_out(path: str | None, default):
    if path is None:
        return default
    try:
        return open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise PersistenceError(f"cannot open {path}: {exc}") from exc


def _cmd_scan(args, out):
    path = _cache_path(args)
    loaded = cache_load(path) if path else {}
    known = {n: e.known() for n, e in loaded.items()}

    def checkpoint(batch):
        if path is None:
            return
        fresh = []
        for r in batch:
            prev = loaded.get(r.n)
            if prev is not None and prev.A0_witness is not None and (r.B is None or prev.B is not None):
                continue
            b, bw = (r.B, r.B_witness) if r.B is not None else (
                (prev.B, prev.B_witness) if prev is not None else (None, None))
            fresh.append(CacheEntry(r.n, r.A, r.A0, r.A0_witness, b, bw))
        cache_append(path, fresh)

    summary = ScanSummary(args.x, args.psi)
    records = scan_heights(args.x, args.psi, args.b_tau, known=known, checkpoint=checkpoint,
                           workers=args.threads or os.cpu_count() or 1)
    fh = _open_out(args.out, out)
    try:
        write_csv(records, fh, summary)
    except OSError as exc:
        raise PersistenceError(f"cannot write scan output: {exc}") from exc
    finally:
        if fh is not out:
            fh.close()
    text = summary.to_json()
    if args.summary:
        try:
            Path(args.summary).write_text(text + "\n", encoding="utf-8")
        except OSError as exc:
            raise PersistenceError(f"cannot write summary: {exc}") from exc
    else:
        print(text, file=sys.stderr)


def _cmd_lemma31(args, out):
    r = lemma31_density(args.x, args.gamma)
    _emit(args.format, {"x": r.x, "gamma": r.gamma, "count": r.count, "density": r.density,
                        "excluded": list(r.excluded)}, out)


def _params(gamma, C2, x):
    if C2 is not None:
        return maier_constants(gamma, C2=C2)
    return maier_constants(gamma, empirical_x=x)


def _cmd_lemma32(args, out):
    params = _params(args.gamma, args.C2, args.x)
    rows = lemma32_profile(args.x, args.gamma, params, include_out_of_range=args.all_k)
    table = [{"k": r.k, "t": r.t, "count": r.count, "bound": r.bound, "ratio": r.ratio,
              "in_range": r.in_lemma_range, "omega_interval_hist": list(r.omega_interval_hist)}
             for r in rows]
    if args.format == "text":
        print(f"C2 = {params.C2!r} ({'fitted' if params.C2_empirical else 'given'}), c0 = {params.c0!r}", file=out)
    _emit_table(args.format, table, out)


def _cmd_lemma33(args, out):
    params = _params(args.gamma, args.C2, args.x)
    r = lemma33_count(args.x, params, args.eps)
    _emit(args.format, {"x": r.x, "epsilon": args.eps, "k0": r.k0, "k_start": r.k_start,
                        "count": r.count, "bound": r.bound, "holds": r.holds,
                        "degenerate": r.degenerate, "beyond_lemma_range": r.beyond_lemma_range}, out)


def _cmd_maier_C(args, out):
    r = estimate_maier_C(args.x)
    _emit(args.format, {"x": r.x, "C": r.C, "argmax": r.argmax}, out)


def _cmd_mertens(args, out):
    r = mertens_sum_check(args.limit)
    _emit(args.format, {"limit": r.limit, "right": r.right, "left": r.left, "left_closed": r.left_closed,
                        "below_four": r.below_four, "forms_agree": r.forms_agree}, out)


def _cmd_constants(args, out):
    p = maier_constants(args.gamma, C2=args.C2)
    _emit(args.format, {"gamma": p.gamma, "b": p.b, "epsilon": p.epsilon, "c0": p.c0, "C2": p.C2,
                        "k0": p.k0, "constraint_residual": p.constraint_residual()}, out)


_COMMANDS = {
    "phi": _cmd_phi, "A": _cmd_A, "A0": _cmd_A0, "B": _cmd_B, "bound": _cmd_bound,
    "scan": _cmd_scan, "lemma31": _cmd_lemma31, "lemma32": _cmd_lemma32, "lemma33": _cmd_lemma33,
    "maier-C": _cmd_maier_C, "mertens": _cmd_mertens, "constants": _cmd_constants,
}


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        _COMMANDS[args.command](args, out)
    except CycloError as exc:
        print(f"cyclo: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"cyclo: {exc}", file=sys.stderr)
        return EXIT_IO
    except Exception as exc:  # noqa: BLE001 - last-resort diagnostic
        print(f"cyclo: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


def main() -> None:
    sys.exit(run())
