"""Range scans and density profiles at desk scale.

Records stream out one n at a time; summaries are plain accumulators so a
scan over 10^6 integers runs in constant memory apart from the height
memo tables.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping

import numpy as np

from .bounds import (
    BORDERLINE,
    PASS,
    MaierParams,
    _check_gamma,
    k0_of,
    maier_sum,
    prop21_check,
    theorem12_check,
)
from .cyclotomic import CycloCache, _squarefree_height, default_cache
from .errors import ConfigError, DomainError
from .numtheory import SpfSieve, omega_table, prime_rank_tables, primes_up_to
from .search import height_B

CHECKPOINT_EVERY = 100_000
CSV_FIELDS = ("n", "tau", "omega", "A", "A0", "A0_witness", "B", "psi", "prop21_pass", "theorem12_pass")


# -- psi menu -----------------------------------------------------------------


def _loglog(n: int) -> float:
    return math.log(math.log(max(n, 16)))


@dataclass(frozen=True)
class Psi:
    name: str
    func: Callable[[int], object]

    def __call__(self, n: int):
        return self.func(n)


def parse_psi(spec: str) -> Psi:
    """Named psi functions: const:c, loglog, logloglog, sqrt_loglog.

    Iterated logs use max(n, 16) so every menu entry is positive for n >= 1.
    Constants stay exact (int or Fraction).
    """
    if spec.startswith("const:"):
        raw = spec.split(":", 1)[1]
        try:
            c = Fraction(raw)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"bad psi constant {raw!r}") from exc
        if c <= 0:
            raise ConfigError("psi constant must be positive")
        value = int(c) if c.denominator == 1 else c
        return Psi(spec, lambda n, v=value: v)
    table = {
        "loglog": _loglog,
        "logloglog": lambda n: math.log(_loglog(n)),
        "sqrt_loglog": lambda n: math.sqrt(_loglog(n)),
    }
    if spec not in table:
        raise ConfigError(f"unknown psi {spec!r}; choose const:c, loglog, logloglog or sqrt_loglog")
    return Psi(spec, table[spec])


def format_psi(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


# -- height scan --------------------------------------------------------------


@dataclass
class HeightRecord:
    n: int
    tau: int
    omega: int
    A: int
    A0: int
    A0_witness: int
    psi_value: object
    prop21_status: str
    B: int | None = None
    B_witness: tuple[int, ...] | None = None
    theorem12_status: str | None = None

    @property
    def prop21_pass(self) -> bool:
        return self.prop21_status == PASS

    @property
    def theorem12_pass(self) -> bool | None:
        return None if self.theorem12_status is None else self.theorem12_status == PASS

    def csv_row(self) -> list[str]:
        return [
            str(self.n),
            str(self.tau),
            str(self.omega),
            str(self.A),
            str(self.A0),
            str(self.A0_witness),
            "" if self.B is None else str(self.B),
            format_psi(self.psi_value),
            self.prop21_status,
            self.theorem12_status or "",
        ]


@dataclass(frozen=True)
class KnownHeights:
    """Previously computed values for one n (from the persistent cache)."""

    A: int
    A0: int
    A0_witness: int | None = None
    B: int | None = None
    B_witness: tuple[int, ...] | None = None


def _a0_over(primes: tuple[int, ...], cache: CycloCache, memo: dict) -> tuple[int, int]:
    """Largest A(d) over squarefree d composed of ``primes``; smallest maximizer."""
    key = primes
    hit = memo.get(key)
    if hit is not None:
        return hit
    divs = [1]
    for p in primes:
        divs += [d * p for d in divs]
    best, witness = 0, 1
    for d in sorted(divs):
        h = _squarefree_height(d, cache)
        if h > best:
            best, witness = h, d
    memo[key] = (best, witness)
    return best, witness


def _scan_block(lo: int, hi: int, psi: Psi, b_tau: int, cache: CycloCache,
                known: Mapping[int, KnownHeights], sieve: SpfSieve) -> Iterator[HeightRecord]:
    memo: dict = {}
    for n in range(lo, hi):
        fd = sieve.factor_dict(n)
        primes = tuple(sorted(fd))
        tau = 1
        for e in fd.values():
            tau *= e + 1
        r = 1
        for p in primes:
            r *= p
        hit = known.get(n)
        if hit is not None and hit.A0_witness is not None:
            a, a0, w = hit.A, hit.A0, hit.A0_witness
        else:
            a = _squarefree_height(r, cache)
            a0, w = _a0_over(primes, cache, memo)
        psi_value = psi(n)
        rec = HeightRecord(n, tau, len(primes), a, a0, w, psi_value,
                           prop21_check(n, psi_value, a0).status)
        if b_tau and tau <= b_tau:
            if hit is not None and hit.B is not None:
                rec.B, rec.B_witness = hit.B, hit.B_witness
            else:
                res = height_B(n, max_tau=b_tau, cache=cache)
                rec.B, rec.B_witness = res.b_value, res.witness
            rec.theorem12_status = theorem12_check(n, psi_value, rec.B).status
        yield rec


def _scan_job(args):
    lo, hi, psi_name, b_tau, x_max, known = args
    sieve = SpfSieve(max(x_max, 2))
    return list(_scan_block(lo, hi, parse_psi(psi_name), b_tau, CycloCache(), known, sieve))


def scan_heights(
    x_max: int,
    psi: Psi | str,
    compute_B_up_to_tau: int = 0,
    cache: CycloCache | None = None,
    known: Mapping[int, KnownHeights] | None = None,
    checkpoint: Callable[[list[HeightRecord]], None] | None = None,
    workers: int = 1,
) -> Iterator[HeightRecord]:
    """One HeightRecord per 2 <= n <= x_max, in increasing n.

    B(n) is computed only when tau(n) <= compute_B_up_to_tau (0 disables).
    ``checkpoint`` receives each batch of CHECKPOINT_EVERY new records.
    With workers > 1 contiguous blocks run in separate processes; output
    order is still by n.
    """
    if x_max < 2:
        raise DomainError("x_max must be >= 2")
    if isinstance(psi, str):
        psi = parse_psi(psi)
    cache = default_cache() if cache is None else cache
    known = {} if known is None else known
    return _stream(x_max, psi, compute_B_up_to_tau, cache, known, checkpoint, workers)


def _stream(x_max, psi, compute_B_up_to_tau, cache, known, checkpoint, workers):
    if workers > 1:
        edges = np.linspace(2, x_max + 1, 4 * workers + 1).astype(int).tolist()
        jobs = [(a, b, psi.name, compute_B_up_to_tau, x_max,
                 {n: v for n, v in known.items() if a <= n < b})
                for a, b in zip(edges, edges[1:]) if b > a]
        pool = ProcessPoolExecutor(max_workers=workers)
        blocks = (rec for block in pool.map(_scan_job, jobs) for rec in block)
    else:
        pool = None
        blocks = _scan_block(2, x_max + 1, psi, compute_B_up_to_tau, cache, known, SpfSieve(x_max))
    pending: list[HeightRecord] = []
    try:
        for rec in blocks:
            if checkpoint is not None:
                pending.append(rec)
                if len(pending) >= CHECKPOINT_EVERY:
                    checkpoint(pending)
                    pending = []
            yield rec
        if checkpoint is not None and pending:
            checkpoint(pending)
    finally:
        if pool is not None:
            pool.shutdown()


@dataclass
class ScanSummary:
    """Cumulative exception counts at every power of ten and at x_max."""

    x_max: int
    psi: str
    rows: int = 0
    prop21_exceptions: int = 0
    prop21_borderline: int = 0
    theorem12_checked: int = 0
    theorem12_exceptions: int = 0
    theorem12_borderline: int = 0
    checkpoints: list[dict] = field(default_factory=list)

    def add(self, rec: HeightRecord) -> None:
        self.rows += 1
        if rec.prop21_status == BORDERLINE:
            self.prop21_borderline += 1
        elif rec.prop21_status != PASS:
            self.prop21_exceptions += 1
        if rec.theorem12_status is not None:
            self.theorem12_checked += 1
            if rec.theorem12_status == BORDERLINE:
                self.theorem12_borderline += 1
            elif rec.theorem12_status != PASS:
                self.theorem12_exceptions += 1
        n = rec.n
        if n == self.x_max or (n >= 10 and 10 ** round(math.log10(n)) == n):
            self.checkpoints.append(self._snapshot(n))

    def _snapshot(self, x: int) -> dict:
        return {
            "x": x,
            "prop21_exceptions": self.prop21_exceptions,
            "prop21_density": self.prop21_exceptions / x,
            "prop21_borderline": self.prop21_borderline,
            "theorem12_checked": self.theorem12_checked,
            "theorem12_exceptions": self.theorem12_exceptions,
            "theorem12_density": self.theorem12_exceptions / x,
            "theorem12_borderline": self.theorem12_borderline,
        }

    def to_dict(self) -> dict:
        out = {"x_max": self.x_max, "psi": self.psi, "rows": self.rows,
               "excluded": "n = 1 (scan starts at 2)"}
        out.update(self._snapshot(self.x_max))
        out["by_decade"] = [c for c in self.checkpoints if c["x"] != self.x_max] + [self._snapshot(self.x_max)]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def write_csv(records: Iterable[HeightRecord], fh, summary: ScanSummary | None = None) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for rec in records:
        writer.writerow(rec.csv_row())
        if summary is not None:
            summary.add(rec)


def run_scan(x_max: int, psi: str, compute_B_up_to_tau: int = 0, **kwargs) -> tuple[str, ScanSummary]:
    """Full scan into an in-memory CSV string plus its summary."""
    summary = ScanSummary(x_max, psi)
    buf = io.StringIO()
    write_csv(scan_heights(x_max, psi, compute_B_up_to_tau, **kwargs), buf, summary)
    return buf.getvalue(), summary


# -- many prime factors ---------------------------------------------------------


@dataclass(frozen=True)
class DensityResult:
    x: int
    gamma: float
    count: int
    density: float
    excluded: tuple[int, ...] = (1, 2)


def omega_threshold(n: np.ndarray | int, gamma: float):
    return np.log(np.log(n)) / math.log(gamma)


def lemma31_density(x: int, gamma: float) -> DensityResult:
    """#{3 <= n <= x : omega(n) >= log log n / log gamma}, and that count / x.

    n = 1, 2 are left out because log log n is undefined or negative there.
    """
    if x < 3:
        raise DomainError("x must be >= 3")
    _check_gamma(gamma)
    om = omega_table(x)
    n = np.arange(3, x + 1, dtype=np.float64)
    count = int(np.count_nonzero(om[3:] >= omega_threshold(n, gamma)))
    return DensityResult(x, gamma, count, count / x)


# -- large p_k counts ------------------------------------------------------------


def lemma_k_range(x: int, gamma: float) -> list[int]:
    """Natural k with k < log log x / log gamma."""
    limit = math.log(math.log(x)) / math.log(gamma)
    return [k for k in range(1, math.ceil(limit) + 1) if k < limit]


def _rank_tables(x: int, depth: int) -> np.ndarray:
    return prime_rank_tables(x, max(depth, 1))


def _large_pk_mask(ranks: np.ndarray, k: int, x: int, gamma: float) -> np.ndarray:
    """n <= x with log p_k(n) > gamma^-k log x (index n, entry 0 unused)."""
    row = ranks[k - 1].astype(np.float64)
    return np.log(row) > gamma ** (-k) * math.log(x)


def lemma32_counts(x: int, gamma: float, ks: Iterable[int] | None = None) -> dict[int, int]:
    if x < 16:
        raise DomainError("x must be >= 16")
    _check_gamma(gamma)
    ks = lemma_k_range(x, gamma) if ks is None else sorted(ks)
    if not ks:
        return {}
    ranks = _rank_tables(x, max(ks))
    return {k: int(np.count_nonzero(_large_pk_mask(ranks, k, x, gamma)[1:])) for k in ks}


@dataclass(frozen=True)
class ProfileRow:
    k: int
    t: float
    count: int
    bound: float
    ratio: float
    in_lemma_range: bool
    omega_interval_hist: tuple[int, ...]
    count_via_interval: int


def omega_interval(x: int, t: float) -> np.ndarray:
    """omega([t, x], n) for 0 <= n <= x."""
    out = np.zeros(x + 1, dtype=np.int16)
    for p in primes_up_to(x):
        if p >= t:
            out[p::p] += 1
    return out


def lemma32_profile(x: int, gamma: float, params: MaierParams,
                    include_out_of_range: bool = False) -> list[ProfileRow]:
    """Per-k count of n <= x with log p_k > gamma^-k log x against C2 x e^{-c0 k}.

    Each row also carries the distribution of omega([t, x], n) at
    t = x^(gamma^-k) and the count re-derived from it (n with at least k
    distinct primes above t), an independent route to the same number.
    """
    if x < 16:
        raise DomainError("x must be >= 16")
    _check_gamma(gamma)
    ks = lemma_k_range(x, gamma)
    in_range = set(ks)
    if include_out_of_range:
        top = int(omega_table(x).max())
        ks = list(range(1, max(top, max(ks, default=0)) + 1))
    if not ks:
        return []
    ranks = _rank_tables(x, max(ks))
    rows = []
    for k in ks:
        count = int(np.count_nonzero(_large_pk_mask(ranks, k, x, gamma)[1:]))
        t = x ** (gamma ** (-k))
        interval = omega_interval(x, t)[1:]
        hist = tuple(int(v) for v in np.bincount(interval))
        bound = params.C2 * x * math.exp(-params.c0 * k)
        rows.append(ProfileRow(k, t, count, bound, count / bound, k in in_range, hist,
                               int(np.count_nonzero(interval >= k))))
    return rows


# -- tail count ------------------------------------------------------------------


@dataclass(frozen=True)
class TailCountResult:
    x: int
    k0: float
    k_start: int
    count: int
    bound: float
    holds: bool
    degenerate: bool
    beyond_lemma_range: bool


def lemma33_count(x: int, params: MaierParams, epsilon: float | None = None) -> TailCountResult:
    """#{n <= x : log p_k(n) > gamma^-k log x for some k >= k0} against 2 eps x.

    k0 < 1 is flagged as degenerate and counted from k = 1; k0 beyond the
    lemma's k range is flagged too (no effective threshold for "x large").
    """
    if x < 16:
        raise DomainError("x must be >= 16")
    gamma = params.gamma
    eps = params.epsilon if epsilon is None else epsilon
    k0 = k0_of(params, eps)
    degenerate = k0 < 1
    k_start = 1 if degenerate else math.ceil(k0)
    lemma_top = math.log(math.log(x)) / math.log(gamma)
    max_omega = int(omega_table(x).max())
    count = 0
    if k_start <= max_omega:
        ranks = _rank_tables(x, max_omega)
        hit = np.zeros(x + 1, dtype=bool)
        for k in range(k_start, max_omega + 1):
            hit |= _large_pk_mask(ranks, k, x, gamma)
        count = int(np.count_nonzero(hit[1:]))
    bound = 2 * eps * x
    return TailCountResult(x, k0, k_start, count, bound, count <= bound, degenerate, k0 > lemma_top)


# -- Maier constant ---------------------------------------------------------------


@dataclass(frozen=True)
class MaierEstimate:
    x: int
    C: float
    argmax: int | None


def estimate_maier_C(x: int, cache: CycloCache | None = None) -> MaierEstimate:
    """max over squarefree 2 <= n <= x of log A(n) / sum_k 2^k log p_k(n).

    Any constant valid for the whole range must be at least this large.
    """
    if x < 2:
        raise DomainError("x must be >= 2")
    cache = default_cache() if cache is None else cache
    sieve = SpfSieve(max(x, 2))
    best, arg = 0.0, None
    for n in range(2, x + 1):
        fd = sieve.factor_dict(n)
        if any(e > 1 for e in fd.values()):
            continue
        a = _squarefree_height(n, cache)
        if a == 1:
            continue
        ratio = math.log(a) / maier_sum(n)
        if ratio > best:
            best, arg = ratio, n
    return MaierEstimate(x, best, arg)


# -- prime sum ------------------------------------------------------------------


@dataclass(frozen=True)
class MertensReport:
    limit: int
    right: float
    left: float
    left_closed: float
    left_truncation: float
    below_four: bool
    forms_agree: bool


def mertens_sum_check(limit: int, nu_max: int = 40, tol: float = 1e-6) -> MertensReport:
    """Compare the two sides of the prime-power sum identity used for the second
    sieve condition.

    right       = 2 sum_{p <= limit} log p / (p(p-1))
    left        = sum_{p <= limit} sum_{nu=2}^{nu_max} nu log p / p^nu
    left_closed = sum_{p <= limit} (2p - 1) log p / (p (p-1)^2), the nu -> oo
                  limit of ``left``, evaluated in closed form.
    ``forms_agree`` asks |left - right| <= tol + truncation.
    """
    if limit < 2:
        raise DomainError("limit must be >= 2")
    p = primes_up_to(limit).astype(np.float64)
    logp = np.log(p)
    right = 2.0 * math.fsum(logp / (p * (p - 1)))
    nus = np.arange(2, nu_max + 1, dtype=np.float64)
    series = (nus[None, :] * p[:, None] ** -nus[None, :]).sum(axis=1)
    left = math.fsum(series * logp)
    left_closed = math.fsum((2 * p - 1) * logp / (p * (p - 1) ** 2))
    y = 1.0 / p
    trunc = math.fsum(logp * (nu_max + 1) * y ** (nu_max + 1) / (1 - y) ** 2)
    return MertensReport(limit, right, left, left_closed, trunc, right < 4,
                         abs(left - right) <= tol + trunc)
