"""Boundary detection: the sample-then-search loop with its two local
strategies, and the deduplicating archive of scored candidates.

Local Neighbor Sampling (LNS) probes every +/-1 mutation of every argument
around a sampled point.  Boundary Crossing Search (BCS) picks one random
direction, expands the step exponentially until the output partition
changes, then binary-searches down to the adjacent input pair straddling
the change.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional

from .distances import STRLEN, OutputDistance, pdq
from .sampling import SamplerConfig, sample_arguments
from .suts import SutDescriptor, execute
from .values import ExecutionOutcome, InputTuple, render_tuple


@dataclass(frozen=True)
class MutationOperator:
    direction: str        # increment | decrement
    argument_index: int

    @property
    def delta(self) -> int:
        return 1 if self.direction == "increment" else -1


def mutate(inputs: InputTuple, op: MutationOperator) -> Optional[InputTuple]:
    """Apply +/-1 to one argument; None when the mutation is inapplicable.

    Booleans only support false->true (increment) and true->false
    (decrement); anything leaving {false, true} is inapplicable.
    """
    v = inputs[op.argument_index]
    if isinstance(v, bool):
        if op.direction == "increment" and v is False:
            new = True
        elif op.direction == "decrement" and v is True:
            new = False
        else:
            return None
    else:
        new = v + op.delta
    return inputs[:op.argument_index] + (new,) + inputs[op.argument_index + 1:]


@dataclass(frozen=True)
class BoundaryCandidate:
    """A pair of nearby inputs with their outputs and exact score.

    Candidates are stored in canonical ascending input order, so the same
    boundary discovered from either side deduplicates to one entry.
    """

    input1: InputTuple
    output1: ExecutionOutcome
    input2: InputTuple
    output2: ExecutionOutcome
    score: Fraction

    @property
    def key(self) -> tuple:
        return (render_tuple(self.input1), render_tuple(self.input2))

    @property
    def validity(self) -> str:
        tags = (self.output1.is_valid, self.output2.is_valid)
        if all(tags):
            return "VV"
        if not any(tags):
            return "EE"
        return "VE"


def canonical_candidate(i1: InputTuple, o1: ExecutionOutcome,
                        i2: InputTuple, o2: ExecutionOutcome,
                        score: Fraction) -> BoundaryCandidate:
    """Build a candidate with its sides in ascending input order.

    Both distances are symmetric, so the score is orientation-independent.
    """
    if i1 > i2:  # bools compare as 0/1, so this is numeric elementwise order
        i1, o1, i2, o2 = i2, o2, i1, o1
    return BoundaryCandidate(i1, o1, i2, o2, score)


def make_candidate(i1: InputTuple, o1: ExecutionOutcome,
                   i2: InputTuple, o2: ExecutionOutcome,
                   output_distance: OutputDistance) -> BoundaryCandidate:
    score = pdq(i1, o1.text, i2, o2.text, output_distance)
    return canonical_candidate(i1, o1, i2, o2, score)


class Archive:
    """Insertion-ordered set of candidates above the boundariness threshold,
    keyed by the rendered input pair in its canonical orientation."""

    def __init__(self, threshold: Fraction = Fraction(0)):
        self.threshold = Fraction(threshold)
        self._entries: dict = {}
        self.strategies: dict = {}    # key -> set of strategy names that found it

    def add(self, candidate: BoundaryCandidate, strategy: Optional[str] = None) -> bool:
        """Insert if above threshold and unseen; returns True on insertion."""
        if candidate.score <= self.threshold:
            return False
        key = candidate.key
        fresh = key not in self._entries
        if fresh:
            self._entries[key] = candidate
        if strategy:
            self.strategies.setdefault(key, set()).add(strategy)
        return fresh

    def merge(self, other: "Archive") -> None:
        for candidate in other:
            self.add(candidate)
        for key, tags in other.strategies.items():
            if key in self._entries:
                self.strategies.setdefault(key, set()).update(tags)

    def __contains__(self, key) -> bool:
        return key in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[BoundaryCandidate]:
        return iter(self._entries.values())

    @property
    def candidates(self) -> list:
        return list(self._entries.values())


Executor = Callable[[InputTuple], ExecutionOutcome]


def lns_search(sut: SutDescriptor, inputs: InputTuple,
               output_distance: OutputDistance = STRLEN,
               executor: Optional[Executor] = None) -> list:
    """All applicable one-step neighbors of the starting point, unfiltered."""
    run = executor or (lambda i: execute(sut, i))
    base_outcome = run(inputs)
    found = []
    for arg in range(sut.arity):
        for direction in ("increment", "decrement"):
            neighbor = mutate(inputs, MutationOperator(direction, arg))
            if neighbor is None:
                continue
            found.append(make_candidate(inputs, base_outcome, neighbor, run(neighbor),
                                        output_distance))
    return found


def _with_value(inputs: InputTuple, index: int, value) -> InputTuple:
    return inputs[:index] + (value,) + inputs[index + 1:]


def bcs_search(sut: SutDescriptor, output_distance: OutputDistance,
               inputs: InputTuple, rng: random.Random,
               max_doublings: int = 96,
               domains: Optional[tuple] = None,
               executor: Optional[Executor] = None) -> list:
    """Boundary Crossing Search from one starting point.

    Returns the initial one-step pair when it already crosses (or when no
    crossing is reachable, leaving the caller's threshold to discard it);
    otherwise expands along the chosen direction in steps of 2^k until the
    output partition changes, then squeezes the bracket down to the adjacent
    pair right at the change.  Probes never leave the sampled value domain.
    """
    run = executor or (lambda i: execute(sut, i))
    arg = rng.randrange(sut.arity)
    op = MutationOperator(rng.choice(("increment", "decrement")), arg)
    first = mutate(inputs, op)
    if first is None:
        return []
    base_outcome = run(inputs)
    next_outcome = run(first)
    initial = make_candidate(inputs, base_outcome, first, next_outcome, output_distance)
    if initial.score > 0:
        return [initial]

    start = inputs[arg]
    if isinstance(start, bool):
        # chained mutations leave {false, true} immediately; nothing to expand
        return [initial]
    domain = domains[arg] if domains else None

    def probe(step: int) -> Optional[ExecutionOutcome]:
        value = start + op.delta * step
        if domain is not None and not domain.contains(value):
            return None
        return run(_with_value(inputs, arg, value))

    crossing = None
    for k in range(1, max_doublings + 1):
        outcome = probe(1 << k)
        if outcome is None:
            break  # left the sampled domain: truncate the expansion
        if output_distance(base_outcome.text, outcome.text) > 0:
            crossing = k
            break
    if crossing is None:
        return [initial]

    # smallest step in (2^(k-1), 2^k] whose output differs from the start's
    low, high = 1 << (crossing - 1), 1 << crossing
    while high - low > 1:
        mid = (low + high) // 2
        outcome = probe(mid)
        if outcome is not None and output_distance(base_outcome.text, outcome.text) > 0:
            high = mid
        else:
            low = mid
    i1 = _with_value(inputs, arg, start + op.delta * (high - 1))
    i2 = _with_value(inputs, arg, start + op.delta * high)
    return [make_candidate(i1, run(i1), i2, run(i2), output_distance)]


@dataclass
class DetectionConfig:
    strategy: str = "bcs"                         # lns | bcs
    budget_seconds: Optional[float] = None
    budget_iterations: Optional[int] = None
    threshold: Fraction = Fraction(0)
    output_distance: OutputDistance = STRLEN
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    bcs_max_doublings: int = 96

    def __post_init__(self):
        if self.strategy not in ("lns", "bcs"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.budget_seconds is None and self.budget_iterations is None:
            raise ValueError("a budget (seconds or iterations) is required")


@dataclass
class DetectionResult:
    archive: Archive
    samples: int = 0
    executions: int = 0
    elapsed: float = 0.0


def detect(sut: SutDescriptor, config: DetectionConfig,
           rng: Optional[random.Random] = None) -> DetectionResult:
    """Run the two-step detection loop until the budget is exhausted.

    Each iteration samples a fresh global starting point, runs the configured
    local strategy, and archives every returned candidate whose score exceeds
    the threshold and whose ordered input pair is unseen.
    """
    rng = rng or random.Random(config.sampler.seed)
    archive = Archive(config.threshold)
    result = DetectionResult(archive)

    def counted(i: InputTuple) -> ExecutionOutcome:
        result.executions += 1
        return execute(sut, i)

    start = time.monotonic()
    while True:
        if config.budget_iterations is not None:
            if result.samples >= config.budget_iterations:
                break
        elif time.monotonic() - start >= config.budget_seconds:
            break
        pairs = sample_arguments(sut, config.sampler, rng)
        inputs = tuple(v for v, _ in pairs)
        domains = tuple(d for _, d in pairs)
        result.samples += 1
        if config.strategy == "lns":
            found = lns_search(sut, inputs, config.output_distance, executor=counted)
        else:
            found = bcs_search(sut, config.output_distance, inputs, rng,
                               config.bcs_max_doublings, domains, executor=counted)
        for candidate in found:
            archive.add(candidate, strategy=config.strategy)
    result.elapsed = time.monotonic() - start
    return result
