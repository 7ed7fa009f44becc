"""Verification campaigns over the exhaustive grid with seeded weight vectors.

Grid order is fixed: m = 1..m_max, then ``a`` and ``c`` lexicographically
(``c_i`` in ``[0, a_i + 1]``), then n = 0..sum(a)+1 for restricted labels followed
by the unrestricted point, then the weight vector index, then the label.  Weight
vectors are drawn from a stream keyed by (seed, a, c), so every n of a grid point
and its unrestricted partner see the same weights.
"""

from __future__ import annotations

import json
import sys
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Optional, TextIO

from .closed_form import (
    DegenerateDenominator,
    check_mutation,
    literal_layer_parts,
    rhs_by_moments,
    rhs_literal,
    rhs_unrestricted,
)
from .enumeration import brute_force_lhs_many
from .exact import gaussian_to_json
from .instance import (
    IdentityLabel,
    ProblemInstance,
    child_rng,
    compute_aggregates,
    draw_weights,
    require_valid,
)

STRATEGIES = ("literal", "moments")
RECORD_LEVELS = ("all", "nonpass", "fail", "none")


@dataclass(frozen=True)
class CampaignConfig:
    identities: tuple = tuple(IdentityLabel)
    m_max: int = 3
    a_max: int = 4
    weight_kind: str = "gaussian"
    seed: int = 0
    random_count: int = 25
    strategies: tuple = STRATEGIES
    out: Optional[str] = None
    jobs: int = 1
    mutate: Optional[str] = None
    records: str = "all"
    fail_fast: bool = False

    def __post_init__(self):
        if not self.identities:
            raise ValueError("identity set must be nonempty")
        if self.m_max < 1:
            raise ValueError("m_max must be >= 1")
        if self.a_max < 0:
            raise ValueError("a_max must be >= 0")
        if self.random_count < 1:
            raise ValueError("random_count must be >= 1")
        if self.weight_kind not in ("gaussian", "rational"):
            raise ValueError(f"unknown weight kind {self.weight_kind!r}")
        bad = [s for s in self.strategies if s not in STRATEGIES]
        if bad or not self.strategies:
            raise ValueError(f"strategies must be a nonempty subset of {STRATEGIES}, got {self.strategies}")
        if self.records not in RECORD_LEVELS:
            raise ValueError(f"records must be one of {RECORD_LEVELS}")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        check_mutation(self.mutate)


@dataclass
class VerificationRecord:
    """One (identity, instance, strategy) comparison against the oracle."""

    identity: str
    instance: ProblemInstance
    strategy: str
    lhs: object
    rhs: object  # GaussianRational, "degenerate" or "error: ..."
    match: Optional[bool]  # None when the strategy is undefined on the instance
    degenerate: bool
    elapsed_us: int = 0

    @property
    def status(self) -> str:
        if self.match is False:
            return "fail"
        return "degenerate" if self.degenerate else "pass"

    @property
    def is_error(self) -> bool:
        return isinstance(self.rhs, str) and self.rhs.startswith("error")

    def to_json(self) -> dict:
        return {
            "identity": self.identity,
            "strategy": self.strategy,
            "instance": self.instance.to_json(),
            "lhs": gaussian_to_json(self.lhs),
            "rhs": self.rhs if isinstance(self.rhs, str) else gaussian_to_json(self.rhs),
            "match": self.match,
            "degenerate": self.degenerate,
            "status": self.status,
            "elapsed_us": self.elapsed_us,
        }


@dataclass
class CampaignSummary:
    records: int = 0
    passed: int = 0
    failed: int = 0
    degenerate: int = 0
    errors: int = 0
    by_strategy: Counter = field(default_factory=Counter)
    by_identity: Counter = field(default_factory=Counter)
    elapsed_s: float = 0.0
    stopped_early: bool = False

    @property
    def ok(self) -> bool:
        return self.failed == 0 and self.errors == 0

    def merge(self, other: "CampaignSummary") -> None:
        self.records += other.records
        self.passed += other.passed
        self.failed += other.failed
        self.degenerate += other.degenerate
        self.errors += other.errors
        self.by_strategy.update(other.by_strategy)
        self.by_identity.update(other.by_identity)
        self.stopped_early = self.stopped_early or other.stopped_early

    def to_json(self) -> dict:
        return {
            "summary": {
                "records": self.records,
                "pass": self.passed,
                "fail": self.failed,
                "degenerate": self.degenerate,
                "errors": self.errors,
                "by_strategy": {f"{k}:{v}": n for (k, v), n in sorted(self.by_strategy.items())},
                "by_identity": {f"{k}:{v}": n for (k, v), n in sorted(self.by_identity.items())},
                "stopped_early": self.stopped_early,
                "ok": self.ok,
                "elapsed_s": round(self.elapsed_s, 3),
            }
        }


def grid_points(m_max: int, a_max: int) -> Iterator[tuple]:
    """(a, c) pairs in campaign order."""
    for m in range(1, m_max + 1):
        for a in product(range(a_max + 1), repeat=m):
            for c in product(*(range(ai + 2) for ai in a)):
                yield a, c


def _a_vectors(m_max: int, a_max: int):
    for m in range(1, m_max + 1):
        yield from product(range(a_max + 1), repeat=m)


def weight_vectors(cfg: CampaignConfig, a: tuple, c: tuple) -> list:
    rng = child_rng(cfg.seed, "weights", a, c)
    m = len(a)
    return [(draw_weights(rng, m, cfg.weight_kind), draw_weights(rng, m, cfg.weight_kind))
            for _ in range(cfg.random_count)]


def _strategy_value(cfg: CampaignConfig, strategy: str, label: IdentityLabel, inst, layers):
    if strategy == "moments":
        return rhs_by_moments(label, inst, cfg.mutate, check=False)
    if label.restricted:
        return rhs_literal(label, inst, cfg.mutate, check=False, layers=layers)
    return rhs_unrestricted(label, inst, cfg.mutate, check=False, layers=layers)


def _evaluate(cfg: CampaignConfig, label: IdentityLabel, inst: ProblemInstance, lhs,
              layers=None) -> list:
    """One record per requested strategy.

    A degenerate literal is excused only when the total route matches, so a
    literal-only campaign still evaluates the moment route on those instances.
    """
    strategies = list(cfg.strategies)
    out = []
    i = 0
    while i < len(strategies):
        strategy = strategies[i]
        i += 1
        start = time.perf_counter_ns()
        degenerate = False
        try:
            value = _strategy_value(cfg, strategy, label, inst, layers)
            match = value == lhs
        except DegenerateDenominator:
            value, match, degenerate = "degenerate", None, True
            if "moments" not in strategies:
                strategies.append("moments")
        except Exception as exc:  # a crash in a closed form is a failed check
            value, match = f"error: {type(exc).__name__}: {exc}", False
        elapsed = (time.perf_counter_ns() - start) // 1000
        out.append(VerificationRecord(label.value, inst, strategy, lhs, value, match, degenerate, elapsed))
    return out


def _tally(summary: CampaignSummary, rec: VerificationRecord) -> str:
    status = rec.status
    summary.records += 1
    if status == "fail":
        summary.failed += 1
        if rec.is_error:
            summary.errors += 1
    elif status == "degenerate":
        summary.degenerate += 1
    else:
        summary.passed += 1
    summary.by_identity[rec.identity, status] += 1
    summary.by_strategy[rec.strategy, status] += 1
    return status


def _keep(level: str, status: str) -> bool:
    if level == "all":
        return True
    if level == "nonpass":
        return status != "pass"
    if level == "fail":
        return status == "fail"
    return False


def run_chunk(cfg: CampaignConfig, a: tuple) -> tuple:
    """All grid points sharing one ``a`` vector; returns (summary, report lines)."""
    summary = CampaignSummary()
    lines = []
    restricted = [lab for lab in cfg.identities if lab.restricted]
    unrestricted = [lab for lab in cfg.identities if not lab.restricted]
    need_layers = "literal" in cfg.strategies
    keep = cfg.records
    for c in product(*(range(ai + 2) for ai in a)):
        weights = weight_vectors(cfg, a, c)
        base = [ProblemInstance(len(a), a, c, x, None, y) for x, y in weights]
        for label in restricted:
            require_valid(base[0].with_n(0), label)
        for label in unrestricted:
            require_valid(base[0], label)
        layers = []
        for inst in base:
            if need_layers and not inst.is_zero_instance:
                agg = compute_aggregates(inst)
                layers.append({lab: literal_layer_parts(lab, agg) for lab in cfg.identities})
            else:
                layers.append({})
        points = []
        if restricted:
            points += [(n, restricted) for n in range(sum(a) + 2)]
        if unrestricted:
            points.append((None, unrestricted))
        for n, labels in points:
            for inst0, lay in zip(base, layers):
                inst = inst0.with_n(n)
                lhs = brute_force_lhs_many(labels, inst, check=False)
                for label in labels:
                    for rec in _evaluate(cfg, label, inst, lhs[label], lay.get(label)):
                        status = _tally(summary, rec)
                        if keep == "all" or (keep != "none" and _keep(keep, status)):
                            lines.append(json.dumps(rec.to_json()))
                        if status == "fail" and cfg.fail_fast:
                            summary.stopped_early = True
                            return summary, lines
    return summary, lines


def _run_chunk_star(args):
    return run_chunk(*args)


def iter_chunks(cfg: CampaignConfig) -> Iterator[tuple]:
    """(summary, lines) per ``a`` vector, in grid order, serially or across processes."""
    avecs = list(_a_vectors(cfg.m_max, cfg.a_max))
    if cfg.jobs == 1:
        for a in avecs:
            yield run_chunk(cfg, a)
        return
    with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
        # map preserves submission order, which keeps the report deterministic
        yield from pool.map(_run_chunk_star, [(cfg, a) for a in avecs], chunksize=4)


def run_campaign(cfg: CampaignConfig, stream: Optional[TextIO] = None) -> CampaignSummary:
    """Run the campaign, writing one JSON record per line and a final summary line.

    Output goes to ``stream`` if given, else to ``cfg.out`` if set, else nowhere.
    """
    start = time.perf_counter()
    summary = CampaignSummary()
    close = False
    if stream is None and cfg.out is not None:
        stream = open(cfg.out, "w") if cfg.out != "-" else sys.stdout
        close = cfg.out != "-"
    try:
        for chunk_summary, lines in iter_chunks(cfg):
            summary.merge(chunk_summary)
            if stream is not None:
                for line in lines:
                    stream.write(line + "\n")
            if summary.stopped_early:
                break
        summary.elapsed_s = time.perf_counter() - start
        if stream is not None:
            stream.write(json.dumps(summary.to_json()) + "\n")
    finally:
        if close:
            stream.close()
    return summary


TIMING_FIELDS = ("elapsed_us", "elapsed_s")


def strip_timing(lines: Iterable[str]) -> list:
    """Parsed report lines with timing fields removed, for determinism comparisons."""
    out = []
    for line in lines:
        doc = json.loads(line)
        for key in TIMING_FIELDS:
            doc.pop(key, None)
            if "summary" in doc:
                doc["summary"].pop(key, None)
        out.append(doc)
    return out
