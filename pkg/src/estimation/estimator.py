"""
Weighted-ratio estimation of separability probabilities

Each sample carries a log-weight (Haar + eigenvalue measure). Sums are kept as
exp(log_weight - log_shift) in Neumaier-compensated accumulators, so the
estimates are invariant under a constant added to every log-weight and never
overflow. States over disjoint index ranges merge by aligning their shifts;
merging chunk states in chunk order is what makes parallel runs reproducible.
"""

import json
import logging
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np

from src.config.config_main import estimation_config
from src.errors import DomainError
from src.quantum.measures import LogWeight
from src.quantum.septest import SepFlags
from src.quantum.statespace import BlochRadii

logger = logging.getLogger(__name__)

TRACE_HEADER = "block,points,sep_estimate,abs_sep_estimate,discards,ess"
BINS_HEADER = "lower,upper,count,sep_estimate,abs_sep_estimate"
SUBSYSTEMS = ("A", "B")


class NoDataError(ValueError):
    """An estimate was requested before any weight was accumulated."""


@dataclass
class CompensatedSum:
    """Neumaier summation; value() is total + compensation."""
    total: float = 0.0
    compensation: float = 0.0

    def add(self, x: float) -> None:
        t = self.total + x
        if abs(self.total) >= abs(x):
            self.compensation += (self.total - t) + x
        else:
            self.compensation += (x - t) + self.total
        self.total = t

    def add_array(self, values: np.ndarray) -> None:
        if values.size:
            self.add(math.fsum(values))

    def scale(self, factor: float) -> None:
        self.total *= factor
        self.compensation *= factor

    def merge(self, other: "CompensatedSum") -> None:
        self.add(other.total)
        self.add(other.compensation)

    def value(self) -> float:
        return self.total + self.compensation

    def copy(self) -> "CompensatedSum":
        return CompensatedSum(self.total, self.compensation)


@dataclass(frozen=True)
class TruncationPolicy:
    """
    How extreme samples are handled.

    mode 'none' keeps everything finite; 'weight-cap' clamps log-weights at
    log_cap; 'eigen-floor' rejects spectra with min eigenvalue below delta
    before they are weighted.
    """
    mode: str = "none"
    log_cap: Optional[float] = None
    delta: Optional[float] = None

    def __post_init__(self):
        if self.mode not in ("none", "weight-cap", "eigen-floor"):
            raise DomainError(f"unknown truncation mode '{self.mode}'")
        if self.mode == "weight-cap" and (self.log_cap is None or math.isnan(self.log_cap)):
            raise DomainError("weight-cap needs a log cap")
        if self.mode == "eigen-floor" and not (self.delta is not None and self.delta > 0.0):
            raise DomainError("eigen-floor needs a positive delta")

    @classmethod
    def parse(cls, text: str) -> "TruncationPolicy":
        """'none', 'weight-cap:<log cap>' or 'eigen-floor:<delta>'."""
        mode, _, arg = text.strip().lower().partition(":")
        if mode == "none":
            if arg:
                raise DomainError(f"policy 'none' takes no argument, got '{text}'")
            return cls()
        try:
            value = float(arg)
        except ValueError:
            raise DomainError(f"policy '{text}' needs a numeric argument")
        if mode == "weight-cap":
            return cls(mode=mode, log_cap=value)
        if mode == "eigen-floor":
            return cls(mode=mode, delta=value)
        raise DomainError(f"unknown truncation policy '{text}'")

    def __str__(self) -> str:
        if self.mode == "weight-cap":
            return f"weight-cap:{self.log_cap:g}"
        if self.mode == "eigen-floor":
            return f"eigen-floor:{self.delta:g}"
        return "none"


@dataclass(frozen=True)
class WeightedSample:
    log_weight: LogWeight
    flags: SepFlags
    radii: BlochRadii
    index: int
    min_eigenvalue: float = math.inf


@dataclass
class SampleBlock:
    """Columnar batch of weighted samples, indices start..start+len-1."""
    start: int
    log_weight: np.ndarray
    finite: np.ndarray
    separable: np.ndarray
    absolutely_separable: np.ndarray
    r_a: np.ndarray
    r_b: np.ndarray
    min_eigenvalue: np.ndarray

    def __len__(self) -> int:
        return self.log_weight.shape[0]

    @classmethod
    def from_sample(cls, sample: WeightedSample) -> "SampleBlock":
        def one(value, dtype=np.float64):
            return np.array([value], dtype=dtype)

        return cls(
            start=sample.index,
            log_weight=one(sample.log_weight.log_value),
            finite=one(sample.log_weight.finite, bool),
            separable=one(sample.flags.separable, bool),
            absolutely_separable=one(sample.flags.absolutely_separable, bool),
            r_a=one(sample.radii.r_a),
            r_b=one(sample.radii.r_b),
            min_eigenvalue=one(sample.min_eigenvalue),
        )


@dataclass(frozen=True)
class TraceRow:
    block: int
    points: int
    sep_estimate: float
    abs_sep_estimate: float
    discards: int
    ess: float


@dataclass(frozen=True)
class BinEstimate:
    lower: float
    upper: float
    count: int
    sep_estimate: Optional[float]
    abs_sep_estimate: Optional[float]


@dataclass
class BinAccumulator:
    """Per-radius-bin sums, in the same shifted domain as the parent state."""
    edges: np.ndarray
    counts: np.ndarray
    total: np.ndarray
    sep: np.ndarray
    abs_sep: np.ndarray

    @classmethod
    def uniform(cls, bins: int) -> "BinAccumulator":
        if bins < 1:
            raise DomainError(f"bins must be >= 1, got {bins}")
        return cls(
            edges=np.linspace(0.0, 1.0, bins + 1),
            counts=np.zeros(bins, dtype=np.int64),
            total=np.zeros(bins),
            sep=np.zeros(bins),
            abs_sep=np.zeros(bins),
        )

    @property
    def size(self) -> int:
        return self.counts.shape[0]

    def index(self, radius: np.ndarray) -> np.ndarray:
        idx = np.floor(np.clip(radius, 0.0, 1.0) * self.size).astype(np.int64)
        return np.minimum(idx, self.size - 1)

    def add(self, radius: np.ndarray, w: np.ndarray, sep: np.ndarray, abs_sep: np.ndarray) -> None:
        idx = self.index(radius)
        n = self.size
        self.counts += np.bincount(idx, minlength=n)
        self.total += np.bincount(idx, weights=w, minlength=n)
        self.sep += np.bincount(idx, weights=w * sep, minlength=n)
        self.abs_sep += np.bincount(idx, weights=w * abs_sep, minlength=n)

    def scale(self, factor: float) -> None:
        self.total *= factor
        self.sep *= factor
        self.abs_sep *= factor

    def copy(self) -> "BinAccumulator":
        return BinAccumulator(
            self.edges.copy(), self.counts.copy(), self.total.copy(),
            self.sep.copy(), self.abs_sep.copy(),
        )


@dataclass
class EstimatorState:
    """
    Mergeable accumulator for one run (or one chunk of a run).

    log_shift is None until the first finite log-weight is seen. count is the
    number of weighted samples; discard_count the non-finite weights;
    rejected_count the eigen-floor rejections.
    """
    bins: BinAccumulator = field(default_factory=lambda: BinAccumulator.uniform(estimation_config.bins))
    subsystem: str = "A"
    shift_margin: float = estimation_config.shift_margin
    log_shift: Optional[float] = None
    sum_total: CompensatedSum = field(default_factory=CompensatedSum)
    sum_sq: CompensatedSum = field(default_factory=CompensatedSum)
    sum_sep: CompensatedSum = field(default_factory=CompensatedSum)
    sum_abs: CompensatedSum = field(default_factory=CompensatedSum)
    count: int = 0
    discard_count: int = 0
    rejected_count: int = 0
    trace: List[TraceRow] = field(default_factory=list)

    def __post_init__(self):
        if self.subsystem not in SUBSYSTEMS:
            raise DomainError(f"subsystem must be one of {SUBSYSTEMS}, got '{self.subsystem}'")

    @classmethod
    def empty(cls, bins: int = None, subsystem: str = "A") -> "EstimatorState":
        return cls(
            bins=BinAccumulator.uniform(estimation_config.bins if bins is None else bins),
            subsystem=subsystem,
        )

    @property
    def points(self) -> int:
        return self.count + self.discard_count + self.rejected_count

    @property
    def total_discards(self) -> int:
        return self.discard_count + self.rejected_count

    def _rescale(self, new_shift: float) -> None:
        factor = math.exp(self.log_shift - new_shift)
        for acc in (self.sum_total, self.sum_sep, self.sum_abs):
            acc.scale(factor)
        self.sum_sq.scale(factor * factor)
        self.bins.scale(factor)
        self.log_shift = new_shift

    def _align(self, log_values: np.ndarray) -> None:
        candidates = log_values[np.isfinite(log_values)]
        if candidates.size == 0:
            return
        if self.log_shift is None:
            self.log_shift = float(candidates[0])
        top = float(candidates.max())
        if top > self.log_shift + self.shift_margin:
            logger.debug(f"Rescaling log shift {self.log_shift:.3f} -> {top:.3f}")
            self._rescale(top)

    def add_block(self, block: SampleBlock, policy: TruncationPolicy) -> None:
        keep = np.ones(len(block), dtype=bool)

        if policy.mode == "eigen-floor":
            rejected = block.min_eigenvalue < policy.delta
            self.rejected_count += int(rejected.sum())
            keep &= ~rejected

        bad = keep & ~(block.finite & ~np.isnan(block.log_weight) & ~np.isposinf(block.log_weight))
        self.discard_count += int(bad.sum())
        keep &= ~bad
        if not keep.any():
            return

        log_w = block.log_weight[keep]
        if policy.mode == "weight-cap":
            log_w = np.minimum(log_w, policy.log_cap)

        self.count += int(keep.sum())
        self._align(log_w)
        if self.log_shift is None:
            # only zero weights so far
            return

        w = np.exp(log_w - self.log_shift)
        sep = block.separable[keep]
        abs_sep = block.absolutely_separable[keep]

        self.sum_total.add_array(w)
        self.sum_sq.add_array(w * w)
        self.sum_sep.add_array(w[sep])
        self.sum_abs.add_array(w[abs_sep])

        radius = block.r_a if self.subsystem == "A" else block.r_b
        self.bins.add(radius[keep], w, sep, abs_sep)

    def copy(self) -> "EstimatorState":
        return EstimatorState(
            bins=self.bins.copy(),
            subsystem=self.subsystem,
            shift_margin=self.shift_margin,
            log_shift=self.log_shift,
            sum_total=self.sum_total.copy(),
            sum_sq=self.sum_sq.copy(),
            sum_sep=self.sum_sep.copy(),
            sum_abs=self.sum_abs.copy(),
            count=self.count,
            discard_count=self.discard_count,
            rejected_count=self.rejected_count,
            trace=list(self.trace),
        )


def accumulate(state: EstimatorState, sample: WeightedSample, policy: TruncationPolicy = TruncationPolicy()) -> EstimatorState:
    state.add_block(SampleBlock.from_sample(sample), policy)
    return state


def accumulate_block(state: EstimatorState, block: SampleBlock, policy: TruncationPolicy = TruncationPolicy()) -> EstimatorState:
    state.add_block(block, policy)
    return state


def merge(first: EstimatorState, second: EstimatorState) -> EstimatorState:
    """Combine states over disjoint index ranges; first's trace rows come first."""
    if first.bins.size != second.bins.size or first.subsystem != second.subsystem:
        raise DomainError("cannot merge states with different bin layouts")

    merged = first.copy()
    other = second.copy()
    merged.count += other.count
    merged.discard_count += other.discard_count
    merged.rejected_count += other.rejected_count
    merged.trace.extend(other.trace)

    if other.log_shift is None:
        return merged
    if merged.log_shift is None:
        merged.log_shift = other.log_shift
    elif other.log_shift > merged.log_shift:
        merged._rescale(other.log_shift)
    elif other.log_shift < merged.log_shift:
        other._rescale(merged.log_shift)

    merged.sum_total.merge(other.sum_total)
    merged.sum_sq.merge(other.sum_sq)
    merged.sum_sep.merge(other.sum_sep)
    merged.sum_abs.merge(other.sum_abs)
    merged.bins.counts += other.bins.counts
    merged.bins.total += other.bins.total
    merged.bins.sep += other.bins.sep
    merged.bins.abs_sep += other.bins.abs_sep
    return merged


def _ratio(numerator: float, denominator: float) -> float:
    return min(1.0, max(0.0, numerator / denominator))


def current_estimate(state: EstimatorState) -> Tuple[float, float, float]:
    """(separability probability, absolute-separability probability, effective sample size)."""
    total = state.sum_total.value()
    if not total > 0.0:
        raise NoDataError("no weight accumulated yet")
    sep = _ratio(state.sum_sep.value(), total)
    abs_sep = min(sep, _ratio(state.sum_abs.value(), total))
    ess = total * total / state.sum_sq.value()
    return sep, abs_sep, ess


def bin_estimates(state: EstimatorState) -> List[BinEstimate]:
    bins = state.bins
    result = []
    for i in range(bins.size):
        populated = bins.counts[i] > 0 and bins.total[i] > 0.0
        result.append(BinEstimate(
            lower=float(bins.edges[i]),
            upper=float(bins.edges[i + 1]),
            count=int(bins.counts[i]),
            sep_estimate=_ratio(bins.sep[i], bins.total[i]) if populated else None,
            abs_sep_estimate=_ratio(bins.abs_sep[i], bins.total[i]) if populated else None,
        ))
    return result


def emit_trace_row(state: EstimatorState, block_index: int) -> Optional[TraceRow]:
    """
    Append a trace row for a completed block.

    No row is written before the first positive weight. A block made only of
    discards or rejections still gets a row: its points and discards advance
    while the estimates repeat the previous row.
    """
    if state.log_shift is None or not state.sum_total.value() > 0.0:
        return None
    if state.trace and state.trace[-1].points >= state.points:
        return None

    sep, abs_sep, ess = current_estimate(state)
    row = TraceRow(
        block=block_index,
        points=state.points,
        sep_estimate=sep,
        abs_sep_estimate=abs_sep,
        discards=state.total_discards,
        ess=ess,
    )
    state.trace.append(row)
    return row


def log_mean_weight(state: EstimatorState) -> float:
    """log((sum of weights) / points): the sampled total volume of the measure."""
    total = state.sum_total.value()
    if state.points == 0 or not total > 0.0:
        raise NoDataError("no weight accumulated yet")
    return state.log_shift + math.log(total) - math.log(state.points)


@dataclass
class RunSummary:
    measure: str
    alpha0: float
    points: int
    offset: int
    block: int
    policy: str
    subsystem: str
    sep_estimate: float
    abs_sep_estimate: float
    ess: float
    log_mean_weight: float
    samples: int
    discards: int
    rejections: int
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunSummary":
        known = {k: data[k] for k in cls.__dataclass_fields__ if k in data}
        return cls(**known)


def summarize(state: EstimatorState, measure: str, alpha0: float, offset: int,
              block: int, policy: TruncationPolicy, wall_time: float = 0.0) -> RunSummary:
    sep, abs_sep, ess = current_estimate(state)
    return RunSummary(
        measure=measure,
        alpha0=alpha0,
        points=state.points,
        offset=offset,
        block=block,
        policy=str(policy),
        subsystem=state.subsystem,
        sep_estimate=sep,
        abs_sep_estimate=abs_sep,
        ess=ess,
        log_mean_weight=log_mean_weight(state),
        samples=state.count,
        discards=state.discard_count,
        rejections=state.rejected_count,
        wall_time=wall_time,
    )


def volume_ratio(summary_a: Union[RunSummary, dict], summary_b: Union[RunSummary, dict]) -> float:
    """Ratio of sampled total volumes; both runs must share alpha0 and points to be comparable."""
    a = summary_a if isinstance(summary_a, RunSummary) else RunSummary.from_dict(summary_a)
    b = summary_b if isinstance(summary_b, RunSummary) else RunSummary.from_dict(summary_b)
    if (a.points, a.alpha0) != (b.points, b.alpha0):
        logger.warning(
            f"Volume ratio of runs with different sampling ({a.points} @ {a.alpha0} "
            f"vs {b.points} @ {b.alpha0})"
        )
    return math.exp(a.log_mean_weight - b.log_mean_weight)


def write_trace_csv(rows: List[TraceRow], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table = np.array(
        [[r.block, r.points, r.sep_estimate, r.abs_sep_estimate, r.discards, r.ess] for r in rows],
        dtype=np.float64,
    ).reshape(-1, 6)
    np.savetxt(
        path, table, delimiter=",", header=TRACE_HEADER, comments="",
        fmt=["%d", "%d", "%.12g", "%.12g", "%d", "%.12g"],
    )
    return path


def write_bins_csv(bins: List[BinEstimate], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [BINS_HEADER]
    for b in bins:
        sep = "" if b.sep_estimate is None else f"{b.sep_estimate:.12g}"
        abs_sep = "" if b.abs_sep_estimate is None else f"{b.abs_sep_estimate:.12g}"
        lines.append(f"{b.lower:g},{b.upper:g},{b.count},{sep},{abs_sep}")
    path.write_text("\n".join(lines) + "\n", encoding="ascii")
    return path


def write_summary_json(summary: RunSummary, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(summary.to_dict(), indent=2) + "\n", encoding="ascii")
    return path


def load_summary_json(path: Union[str, Path]) -> RunSummary:
    return RunSummary.from_dict(json.loads(Path(path).read_text(encoding="ascii")))
