"""Seeded verification campaigns with an append-only JSONL record store.

Campaign identity (and hence the campaign hash) covers everything that
determines the produced records: backends, laws, grids, budget, seed.
The parallelism degree is an execution parameter and is excluded, so runs
at different job counts produce byte-identical record streams after the
canonical (backend, law, index, sub) ordering.

Per-instance randomness comes from a dedicated Mersenne Twister seeded by
SHA-256 of "seed:backend:law:index", so any single record can be replayed
in isolation.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import itertools
import json
import math
import random
import time
from dataclasses import dataclass, field

from .errors import ResourceLimitError, UnsupportedOperationError, UsageError
from .groups import GroupBackend, KleinBackend, LatticeBackend, backend_from_spec
from .isoperimetry import CERTIFIED_EXACT, IsoInstance, kappa_restricted
from .laws import (
    ATOM_LAWS,
    EQUALITY_PAIR_CAP,
    LAW_IDS,
    THEOREM_LAWS,
    check_3k4,
    check_atom_lemmas,
    check_c_lower,
    check_corollary_AB,
    check_equality_characterization,
    check_freiman_dim,
    check_gardner_gronchi,
    check_hls,
    check_kempermann,
    check_main_theorem,
    check_ruzsa_dim,
    check_uvk,
    example_klein_grid,
    example_klein_union,
    klein_union_set,
    standard_triple,
)
from .reports import (
    LawReport,
    VERDICT_FINDING,
    VERDICT_SKIPPED,
    VERDICT_VIOLATED,
    VERDICTS,
    subset_payload,
)
from .setops import (
    FiniteSubset,
    detect_progression,
    product_size,
)

SCHEMA_VERSION = 1
ARTIFACT_VERSION = "0.1.0"

EXTREMAL_PAIR_CAP = 200_000

_PAIR_LAWS = frozenset({"kempermann", "hls", "ruzsa_dim", "gardner_gronchi"})
_LATTICE_ONLY = frozenset({"freiman_dim", "ruzsa_dim", "gardner_gronchi"})
_KLEIN_ONLY = frozenset({"klein_grid", "klein_union", "c_lower"})


@dataclass(frozen=True)
class Campaign:
    backends: tuple[str, ...]
    laws: tuple[str, ...]
    budget: int = 100
    seed: int = 0
    jobs: int = 1
    radius: int = 3
    sizes: tuple[int, int] = (1, 8)
    n_values: tuple[int, ...] = (1, 2)
    k_values: tuple[int, ...] = (1,)
    d_values: tuple[int, ...] = (3,)
    m_values: tuple[int, ...] = (1, 2, 3, 4, 5)
    iso_radius: int = 3

    def __post_init__(self):
        for spec in self.backends:
            backend_from_spec(spec)
        unknown = [law for law in self.laws if law not in LAW_IDS]
        if unknown:
            raise UsageError(f"unknown law ids: {unknown}")
        if self.budget < 1:
            raise UsageError("budget must be positive")

    def canonical(self) -> dict:
        # jobs is an execution parameter, not part of the campaign identity
        return {
            "schema_version": SCHEMA_VERSION,
            "backends": list(self.backends),
            "laws": list(self.laws),
            "budget": self.budget,
            "seed": self.seed,
            "radius": self.radius,
            "sizes": list(self.sizes),
            "n_values": list(self.n_values),
            "k_values": list(self.k_values),
            "d_values": list(self.d_values),
            "m_values": list(self.m_values),
            "iso_radius": self.iso_radius,
        }

    def hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]

    @classmethod
    def from_dict(cls, data: dict) -> "Campaign":
        version = data.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise UsageError(f"unsupported campaign schema_version {version}")
        backends = data.get("backends") or data.get("backend")
        if isinstance(backends, str):
            backends = [backends]
        if not backends:
            raise UsageError("campaign config needs at least one backend")
        laws = data.get("laws")
        if isinstance(laws, str):
            laws = [laws]
        if not laws:
            raise UsageError("campaign config needs at least one law")
        kwargs = {}
        for name in ("budget", "seed", "jobs", "radius", "iso_radius"):
            if name in data:
                kwargs[name] = int(data[name])
        for name in ("sizes", "n_values", "k_values", "d_values", "m_values"):
            if name in data:
                kwargs[name] = tuple(int(x) for x in data[name])
        return cls(backends=tuple(backends), laws=tuple(laws), **kwargs)

    @classmethod
    def from_file(cls, path) -> "Campaign":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class RunRecord:
    campaign_hash: str
    counts: dict[str, int]
    wall_clock: float
    version: str
    clean: bool
    records: list[dict] = field(default_factory=list)


def _instance_rng(seed: int, backend_spec: str, law: str, index: int) -> random.Random:
    digest = hashlib.sha256(f"{seed}:{backend_spec}:{law}:{index}".encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def sample_subset(rng: random.Random, backend: GroupBackend, radius: int, size: int) -> FiniteSubset:
    """Uniform size-`size` subset of the radius ball, without replacement."""
    ball = backend.ball_keys(radius)
    if size > len(ball):
        raise UsageError(f"cannot sample {size} elements from a ball of {len(ball)}")
    return FiniteSubset.from_keys(backend, rng.sample(ball, size))


def _skip(law: str, detail: str) -> list[LawReport]:
    return [LawReport(law, VERDICT_SKIPPED, None, {}, detail)]


def _run_law_instance(c: Campaign, backend_spec: str, law: str, index: int) -> list[LawReport]:
    backend = backend_from_spec(backend_spec)
    rng = _instance_rng(c.seed, backend_spec, law, index)
    lo, hi = c.sizes
    hi = min(hi, len(backend.ball_keys(c.radius)))
    lo = min(lo, hi)

    if law in _LATTICE_ONLY and not isinstance(backend, LatticeBackend):
        return _skip(law, "lattice backends only")
    if law in _KLEIN_ONLY and not isinstance(backend, KleinBackend):
        return _skip(law, "klein-specific family")

    if law in _PAIR_LAWS:
        A = sample_subset(rng, backend, c.radius, rng.randint(lo, hi))
        B = sample_subset(rng, backend, c.radius, rng.randint(lo, hi))
        if law in ("ruzsa_dim", "gardner_gronchi") and len(A) < len(B):
            A, B = B, A
        checker = {
            "kempermann": check_kempermann,
            "hls": check_hls,
            "ruzsa_dim": check_ruzsa_dim,
            "gardner_gronchi": check_gardner_gronchi,
        }[law]
        return [checker(A, B)]

    if law == "freiman_dim":
        A = sample_subset(rng, backend, c.radius, rng.randint(lo, hi))
        return [check_freiman_dim(A)]

    if law == "equality":
        window = backend.ball(min(c.radius, 2))
        max_size = min(hi, 3)
        while max_size >= 2:
            total = sum(math.comb(len(window), s) for s in range(2, max_size + 1))
            if total * total <= EQUALITY_PAIR_CAP:
                break
            max_size -= 1
        if max_size < 2:
            return _skip(law, "window too large for exhaustive pair enumeration")
        return [check_equality_characterization(window, (2, max_size))]

    if law == "3k4":
        lo4 = max(lo, 4)
        A = sample_subset(rng, backend, c.radius, rng.randint(lo4, max(hi, lo4)))
        return [check_3k4(A)]

    if law == "uvk":
        try:
            standard_triple(backend)
        except UnsupportedOperationError:
            return _skip(law, "no non-commuting generator pair")
        d = c.d_values[index % len(c.d_values)]
        B = sample_subset(rng, backend, c.radius, rng.randint(lo, hi))
        return [check_uvk(B, d)]

    if law == "main_theorem":
        k = c.k_values[index % len(c.k_values)]
        lo2 = max(lo, 2)
        A = sample_subset(rng, backend, c.radius, rng.randint(lo2, max(hi, lo2)))
        B = sample_subset(rng, backend, c.radius, rng.randint(lo, hi))
        return [check_main_theorem(A, B, k)]

    if law == "corollary_ab":
        A = sample_subset(rng, backend, c.radius, rng.randint(lo, hi))
        return [check_corollary_AB(A)]

    if law == "klein_grid":
        m = c.m_values[index % len(c.m_values)]
        return [example_klein_grid(m)[2]]

    if law == "klein_union":
        m = c.m_values[index % len(c.m_values)]
        return [example_klein_union(m)[1]]

    if law == "c_lower":
        k = c.k_values[index % len(c.k_values)]
        return [check_c_lower(k)]

    if law in ATOM_LAWS:
        window = backend.ball(c.iso_radius)
        n = c.n_values[index % len(c.n_values)]
        if n > len(window):
            return _skip(law, "window smaller than n")
        size = rng.randint(max(lo, 1), min(hi, 6))
        C = sample_subset(rng, backend, c.radius, size)
        result = kappa_restricted(IsoInstance(C, n, window), fragment_limit=0)
        reports = check_atom_lemmas(C, n, result)
        return [r for r in reports if r.law == law]

    raise UsageError(f"no campaign runner for law {law!r}")


def _record_sort_key(record: dict):
    return (record["backend"], record["law"], record["index"], record["sub"])


def run_campaign(c: Campaign, store_path=None) -> RunRecord:
    """Execute all instances; deterministic for a fixed seed at any job count."""
    start = time.perf_counter()
    campaign_hash = c.hash()
    tasks = [
        (backend, law, index)
        for backend in c.backends
        for law in c.laws
        for index in range(c.budget)
    ]

    def work(task):
        backend, law, index = task
        reports = _run_law_instance(c, backend, law, index)
        return [
            {
                "schema_version": SCHEMA_VERSION,
                "campaign": campaign_hash,
                "backend": backend,
                "law": law,
                "index": index,
                "sub": sub,
                "report": report.to_dict(),
            }
            for sub, report in enumerate(reports)
        ]

    if c.jobs > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=c.jobs) as pool:
            chunks = list(pool.map(work, tasks))
    else:
        chunks = [work(task) for task in tasks]
    records = [record for chunk in chunks for record in chunk]
    records.sort(key=_record_sort_key)

    counts: dict[str, int] = {verdict: 0 for verdict in VERDICTS}
    clean = True
    for record in records:
        verdict = record["report"]["verdict"]
        counts[verdict] = counts.get(verdict, 0) + 1
        if verdict == VERDICT_VIOLATED and record["law"] in THEOREM_LAWS:
            clean = False

    if store_path is not None:
        write_records(store_path, records)
    wall = time.perf_counter() - start
    return RunRecord(campaign_hash, counts, wall, ARTIFACT_VERSION, clean, records)


def write_records(path, records: list[dict]) -> None:
    """Append one canonical JSON object per line."""
    try:
        with open(path, "a", encoding="utf-8") as fh:
            for record in records:
                fh.write(json.dumps(record, sort_keys=True, separators=(",", ":")) + "\n")
    except OSError as exc:
        raise OSError(f"record store write failed at {path}: {exc}") from exc


def read_records(path) -> list[dict]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


def summarize(records: list[dict]) -> list[dict]:
    """Per-law verdict counts and slack extremes, sorted by law id."""
    by_law: dict[str, dict] = {}
    for record in records:
        report = record["report"]
        row = by_law.setdefault(
            record["law"],
            {"law": record["law"], "holds": 0, "violated": 0, "hypothesis_not_met": 0,
             "finding": 0, "skipped": 0, "min_slack": None, "max_slack": None},
        )
        row[report["verdict"]] += 1
        slack = report.get("slack")
        if slack is not None:
            row["min_slack"] = slack if row["min_slack"] is None else min(row["min_slack"], slack)
            row["max_slack"] = slack if row["max_slack"] is None else max(row["max_slack"], slack)
    return [by_law[law] for law in sorted(by_law)]


def extremal_pairs(window: FiniteSubset, size_a: int, size_b: int):
    """All pairs (A, B) inside the window minimizing the deficiency."""
    backend = window.backend
    grid = math.comb(len(window), size_a) * math.comb(len(window), size_b)
    if grid > EXTREMAL_PAIR_CAP:
        raise ResourceLimitError(f"{grid} pairs exceed the enumeration cap {EXTREMAL_PAIR_CAP}")
    combos_a = list(itertools.combinations(window.keys, size_a))
    combos_b = list(itertools.combinations(window.keys, size_b))
    mul = backend.mul_key
    best = None
    out: list[tuple[FiniteSubset, FiniteSubset, int]] = []
    for ka in combos_a:
        for kb in combos_b:
            dfc = len({mul(a, b) for a in ka for b in kb}) - size_a - size_b
            if best is None or dfc < best:
                best = dfc
                out = [(ka, kb, dfc)]
            elif dfc == best:
                out.append((ka, kb, dfc))
    return [
        (FiniteSubset._from_keys(backend, ka), FiniteSubset._from_keys(backend, kb), dfc)
        for ka, kb, dfc in out
    ]


# -- conjecture hunts --------------------------------------------------------

CONJECTURE_IDS = ("atom_conjecture", "3k4", "freiman_union")


def hunt(conjecture: str, grid: dict) -> list[LawReport]:
    """Scan a parameter grid, emitting finding records only."""
    if conjecture == "atom_conjecture":
        return _hunt_atom_conjecture(grid)
    if conjecture == "3k4":
        return _hunt_3k4(grid)
    if conjecture == "freiman_union":
        return _hunt_freiman_union(grid)
    raise UsageError(f"unknown conjecture id {conjecture!r}")


def _universe_keys(backend: GroupBackend, grid: dict) -> list[tuple]:
    span = grid.get("span")
    if span is not None:
        if not isinstance(backend, LatticeBackend) or backend.dim != 1:
            raise UsageError("span universes are defined for zd:1")
        return [(i,) for i in range(span + 1)]
    return list(backend.ball_keys(grid.get("radius", 3)))


def _hunt_atom_conjecture(grid: dict) -> list[LawReport]:
    """Scan for certified atoms larger than n; sets are translation-normalized."""
    backend = backend_from_spec(grid.get("backend", "zd:1"))
    universe = _universe_keys(backend, grid)
    n_max = grid.get("n_max", 3)
    window = backend.ball(grid.get("x_radius", 4))
    id_key = backend.identity_key
    others = [k for k in universe if k != id_key]
    findings: list[LawReport] = []
    for mask in range(1 << len(others)):
        keys = [id_key] + [k for i, k in enumerate(others) if mask >> i & 1]
        C = FiniteSubset.from_keys(backend, keys)
        for n in range(1, min(n_max, len(window)) + 1):
            result = kappa_restricted(IsoInstance(C, n, window), fragment_limit=0)
            if result.certificate != CERTIFIED_EXACT:
                continue
            for U in result.atoms:
                if len(U) != n:
                    findings.append(
                        LawReport(
                            "atom_conjecture",
                            VERDICT_FINDING,
                            len(U) - n,
                            {"C": subset_payload(C), "n": n, "U": subset_payload(U)},
                            "certified atom larger than n",
                        )
                    )
    return findings


def _hunt_3k4(grid: dict) -> list[LawReport]:
    """Exhaustive small-square progression-cover scan over a universe."""
    backend = backend_from_spec(grid.get("backend", "zd:1"))
    universe = _universe_keys(backend, grid)
    sizes = grid.get("sizes", (4, 5))
    findings: list[LawReport] = []
    for size in sizes:
        for combo in itertools.combinations(universe, size):
            report = check_3k4(FiniteSubset._from_keys(backend, combo))
            if report.verdict in (VERDICT_VIOLATED, VERDICT_FINDING):
                findings.append(
                    LawReport("3k4", VERDICT_FINDING, report.slack, report.witness, report.detail)
                )
    return findings


def _hunt_freiman_union(grid: dict) -> list[LawReport]:
    """Check the 10/3 union threshold on the Klein union family.

    The family sits exactly at 3|A^2| = 10|A| - 13, above the strict
    threshold 3|A^2| < 10|A| - 15, so the hypothesis is never met and the
    expected outcome is an empty list. A bipartition failure under a met
    hypothesis is reported as an unconfirmed finding since overlapping
    covers are not enumerated.
    """
    findings: list[LawReport] = []
    for m in grid.get("m_values", (1, 2, 3, 4, 5)):
        A = klein_union_set(m)
        sq = product_size(A, A)
        if not 3 * sq < 10 * len(A) - 15:
            continue
        if not _splits_into_two_progressions(A):
            findings.append(
                LawReport(
                    "freiman_union",
                    VERDICT_FINDING,
                    3 * sq - (10 * len(A) - 15),
                    {"A": subset_payload(A), "square_size": sq, "m": m},
                    "unconfirmed: no exact bipartition into two progressions",
                )
            )
    return findings


def _splits_into_two_progressions(A: FiniteSubset) -> bool:
    keys = A.keys
    first, rest = keys[0], keys[1:]
    for mask in range(1 << len(rest)):
        left = [first] + [k for i, k in enumerate(rest) if mask >> i & 1]
        right = [k for i, k in enumerate(rest) if not mask >> i & 1]
        if not right:
            continue
        S = FiniteSubset._from_keys(A.backend, tuple(left))
        T = FiniteSubset._from_keys(A.backend, tuple(right))
        if detect_progression(S) is not None and detect_progression(T) is not None:
            return True
    return detect_progression(A) is not None
