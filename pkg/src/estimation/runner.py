"""
Chunked, parallel driver for quasirandom separability estimation

Points n = offset .. offset+N-1 are split into blocks (one trace row each) and
blocks into fixed chunks. Every chunk is processed into its own
EstimatorState, and chunk states are merged strictly in index order, so the
result does not depend on the number of workers or on scheduling.
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from src.config.config_main import estimation_config, sampling_config
from src.estimation.estimator import (
    EstimatorState, RunSummary, SampleBlock, TruncationPolicy,
    current_estimate, emit_trace_row, merge, summarize,
)
from src.errors import DomainError
from src.quantum.measures import MeasureKind, eig_weight_log_values
from src.quantum.septest import absolutely_separable, ppt_separable
from src.quantum.statespace import DIMENSION, assemble_block, bloch_radii_block
from src.sampling.lds import QuasirandomStream, fill_block, make_stream

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChunkTask:
    stream: QuasirandomStream
    kind: MeasureKind
    start: int
    count: int
    policy: TruncationPolicy
    bins: int
    subsystem: str
    ppt_atol: float


@dataclass
class RunResult:
    state: EstimatorState
    summary: RunSummary


def weigh_points(kind: MeasureKind, u: np.ndarray, start: int, ppt_atol: float = None) -> SampleBlock:
    """Unit-cube points -> states -> log-weights, separability flags and Bloch radii."""
    states = assemble_block(u)
    with np.errstate(invalid="ignore"):
        log_weight = states.log_haar + eig_weight_log_values(kind, states.spectrum)
    finite = ~(np.isnan(log_weight) | np.isposinf(log_weight))

    absolutely = absolutely_separable(states.spectrum)
    separable = ppt_separable(states.rho, atol=ppt_atol, check=False)
    # absolute separability implies PPT; keep that exact at the det = 0 boundary
    separable = separable | absolutely

    r_a, r_b = bloch_radii_block(states.rho)
    return SampleBlock(
        start=start,
        log_weight=log_weight,
        finite=finite,
        separable=separable,
        absolutely_separable=absolutely,
        r_a=r_a,
        r_b=r_b,
        min_eigenvalue=states.spectrum.min(axis=1),
    )


def process_chunk(task: ChunkTask) -> EstimatorState:
    """Worker entry point; must stay a top-level function to be picklable."""
    u = fill_block(task.stream, task.start, task.count)
    block = weigh_points(task.kind, u, task.start, task.ppt_atol)
    state = EstimatorState.empty(bins=task.bins, subsystem=task.subsystem)
    state.add_block(block, task.policy)
    logger.debug(
        f"Chunk [{task.start}, {task.start + task.count}): {state.count} weighted, "
        f"{state.discard_count} discarded, {state.rejected_count} rejected"
    )
    return state


def partition(offset: int, points: int, block: int, chunk: int) -> Iterator[Tuple[int, List[Tuple[int, int]]]]:
    """
    Yield (block_index, [(start, count), ...]) with 1-based block indices.

    Chunks never straddle a block boundary. A trailing partial block is
    yielded with block_index 0 and gets no trace row.
    """
    full_blocks, remainder = divmod(points, block)
    spans = [(b * block, block, b + 1) for b in range(full_blocks)]
    if remainder:
        spans.append((full_blocks * block, remainder, 0))

    for first, length, index in spans:
        chunks = []
        for c in range(0, length, chunk):
            chunks.append((offset + first + c, min(chunk, length - c)))
        yield index, chunks


class EstimationRunner:
    """Runs one estimation (one measure, one alpha0) over N points."""

    def __init__(
        self,
        kind: MeasureKind,
        alpha0: float = None,
        points: int = None,
        block: int = None,
        chunk: int = None,
        policy: TruncationPolicy = None,
        bins: int = None,
        workers: int = None,
        offset: int = None,
        subsystem: str = "A",
        show_progress: bool = True,
    ):
        self.kind = kind
        self.alpha0 = sampling_config.alpha0 if alpha0 is None else alpha0
        self.block = estimation_config.block_size if block is None else block
        self.points = self.block if points is None else points
        self.chunk = estimation_config.chunk_size if chunk is None else chunk
        self.policy = policy or TruncationPolicy()
        self.bins = estimation_config.bins if bins is None else bins
        self.workers = estimation_config.workers if workers is None else workers
        self.offset = sampling_config.index_offset if offset is None else offset
        self.subsystem = subsystem
        self.show_progress = show_progress

        if self.block < 1 or self.chunk < 1:
            raise DomainError("block and chunk sizes must be >= 1")
        if self.points < self.block:
            raise DomainError(f"points ({self.points}) must be >= block ({self.block})")
        if self.bins < 1:
            raise DomainError(f"bins must be >= 1, got {self.bins}")
        if self.workers < 1:
            raise DomainError(f"workers must be >= 1, got {self.workers}")

        self.stream = make_stream(DIMENSION, self.alpha0)

    def _tasks(self, chunks: List[Tuple[int, int]]) -> List[ChunkTask]:
        return [
            ChunkTask(
                stream=self.stream,
                kind=self.kind,
                start=start,
                count=count,
                policy=self.policy,
                bins=self.bins,
                subsystem=self.subsystem,
                ppt_atol=estimation_config.ppt_atol,
            )
            for start, count in chunks
        ]

    def _run_blocks(self, pool: Optional[ProcessPoolExecutor]) -> EstimatorState:
        state = EstimatorState.empty(bins=self.bins, subsystem=self.subsystem)
        plan = list(partition(self.offset, self.points, self.block, self.chunk))

        for block_index, chunks in tqdm(plan, desc=f"Estimating {self.kind}", unit="block",
                                        disable=not self.show_progress):
            tasks = self._tasks(chunks)
            partials = pool.map(process_chunk, tasks) if pool else map(process_chunk, tasks)
            for partial in partials:
                state = merge(state, partial)

            if block_index:
                row = emit_trace_row(state, block_index)
                if row is not None:
                    logger.debug(
                        f"Block {row.block}: sep={row.sep_estimate:.6f} "
                        f"abs={row.abs_sep_estimate:.6g} ess={row.ess:.4g}"
                    )
        return state

    def run(self) -> RunResult:
        logger.info(
            f"Estimating {self.kind}: alpha0={self.alpha0}, points={self.points}, "
            f"block={self.block}, policy={self.policy}, workers={self.workers}"
        )
        started = time.perf_counter()

        try:
            if self.workers == 1:
                state = self._run_blocks(None)
            else:
                with ProcessPoolExecutor(max_workers=self.workers) as pool:
                    state = self._run_blocks(pool)
        except Exception as e:
            logger.error(f"Estimation of {self.kind} failed: {e}")
            raise

        elapsed = time.perf_counter() - started
        if state.total_discards:
            logger.warning(
                f"{self.kind}: {state.discard_count} non-finite weights discarded, "
                f"{state.rejected_count} rejected by {self.policy}"
            )

        summary = summarize(
            state,
            measure=self.kind.label,
            alpha0=self.alpha0,
            offset=self.offset,
            block=self.block,
            policy=self.policy,
            wall_time=elapsed,
        )
        sep, abs_sep, ess = current_estimate(state)
        logger.info(
            f"Finished {self.kind} in {elapsed:.1f}s: sep={sep:.6f}, abs={abs_sep:.6g}, "
            f"ESS={ess:.4g} of {state.count}"
        )
        return RunResult(state=state, summary=summary)


def run_paired(kind: MeasureKind, **kwargs) -> Tuple[List[RunResult], float]:
    """Run the alpha0 = 1/4 and 3/4 pair; returns both results and the mean estimate."""
    results = []
    for alpha0 in estimation_config.paired_alpha0:
        results.append(EstimationRunner(kind, alpha0=alpha0, **kwargs).run())
    mean = float(np.mean([r.summary.sep_estimate for r in results]))
    logger.info(f"Paired mean for {kind}: {mean:.6f}")
    return results, mean
