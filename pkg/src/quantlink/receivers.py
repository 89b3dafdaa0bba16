"""Receiver state machines built from one-bit slicers.

Three families:

* one-shot: a fixed analog combiner and threshold bank slicing each channel
  output independently;
* blockwise: a delay network buffering channel outputs so that a rotating
  schedule of combiner/threshold pairs can slice a whole block of past
  outputs, one pair per channel use;
* adaptive: a per-stream pipeline whose slicer thresholds are linear
  functions of recent slicer outputs, realizing successive-approximation
  multi-bit quantization of each stream sample over consecutive uses.

Receiver objects are single-owner sequential state machines: call their step
functions once per channel use, in order.  Construction helpers are pure
given a seed.
"""

from __future__ import annotations

import io
from collections import deque
from dataclasses import dataclass

import numpy as np

from .arrangements import Arrangement, Hyperplane, SignVector, enumerate_regions
from .channel import ChannelMatrix
from .combinatorics import RegionCountQuery, max_regions

__all__ = [
    "OneShotReceiver",
    "BlockwiseReceiver",
    "AdaptiveReceiver",
    "one_shot_quantize",
    "blockwise_step",
    "design_blockwise",
    "sar_quantize",
    "sar_bin_index",
    "adaptive_step",
    "lifted_arrangement",
    "blockwise_to_text",
    "blockwise_from_text",
    "adaptive_to_text",
    "adaptive_from_text",
]


def _quantize(values: np.ndarray) -> tuple[int, ...]:
    # Elementwise sign with the 0 -> +1 tie convention.
    return tuple(np.where(np.asarray(values) >= 0.0, 1, -1).tolist())


@dataclass(frozen=True)
class OneShotReceiver:
    """Fixed combiner V (n_q x n_r) and threshold vector t (n_q)."""

    combiner: np.ndarray
    thresholds: np.ndarray

    def __post_init__(self) -> None:
        combiner = np.array(self.combiner, dtype=float)
        thresholds = np.array(self.thresholds, dtype=float).reshape(-1)
        if combiner.ndim != 2 or combiner.shape[0] != thresholds.size:
            raise ValueError(
                f"combiner {combiner.shape} inconsistent with {thresholds.size} thresholds"
            )
        combiner.flags.writeable = False
        thresholds.flags.writeable = False
        object.__setattr__(self, "combiner", combiner)
        object.__setattr__(self, "thresholds", thresholds)


def one_shot_quantize(receiver: OneShotReceiver, y: np.ndarray) -> SignVector:
    """Slicer outputs Q(Vy + t) for one channel output."""
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.size != receiver.combiner.shape[1]:
        raise ValueError(f"output of length {y.size} for combiner {receiver.combiner.shape}")
    return SignVector(_quantize(receiver.combiner @ y + receiver.thresholds))


class BlockwiseReceiver:
    """Delay-network receiver slicing blocks of past outputs on a schedule.

    ``slot_pairs`` holds one (combiner, thresholds) pair per slot; the slot-i
    combiner is n_q x (l*n_r) and acts on the concatenation of the previous
    block's l channel outputs.  The delay buffer never holds more than 2l
    outputs.  The schedule is realized by a channel-use counter rather than
    by modeling individual delay registers; the observable behavior is the
    same.
    """

    def __init__(self, block_length: int, slot_pairs, n_r: int):
        if block_length < 1:
            raise ValueError(f"block length must be >= 1, got {block_length}")
        pairs = []
        for combiner, thresholds in slot_pairs:
            combiner = np.array(combiner, dtype=float)
            thresholds = np.array(thresholds, dtype=float).reshape(-1)
            if combiner.shape != (thresholds.size, block_length * n_r):
                raise ValueError(
                    f"slot combiner {combiner.shape} must be n_q x {block_length * n_r}"
                )
            pairs.append((combiner, thresholds))
        if len(pairs) != block_length:
            raise ValueError(f"need {block_length} slot pairs, got {len(pairs)}")
        self.block_length = block_length
        self.slot_pairs = pairs
        self.n_r = n_r
        self.n_q = pairs[0][1].size
        self.delay_buffer: deque[np.ndarray] = deque(maxlen=2 * block_length)
        self.clock = 0
        self._block: np.ndarray | None = None

    def reset(self) -> None:
        self.delay_buffer.clear()
        self.clock = 0
        self._block = None


def blockwise_step(receiver: BlockwiseReceiver, y: np.ndarray) -> SignVector | None:
    """Advance one channel use; returns slicer outputs once warmed up.

    The first l uses produce nothing (the delay network is filling).  From
    use l+1 on, the pair for slot ((clock-1) mod l) is applied to the
    concatenation of the previous block's outputs.
    """
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.size != receiver.n_r:
        raise ValueError(f"output of length {y.size}, expected {receiver.n_r}")
    receiver.clock += 1
    receiver.delay_buffer.append(y.copy())
    l = receiver.block_length
    if receiver.clock <= l:
        return None
    slot = (receiver.clock - 1) % l
    if slot == 0 or receiver._block is None:
        held = list(receiver.delay_buffer)
        receiver._block = np.concatenate(held[-(l + 1) : -1])
    combiner, thresholds = receiver.slot_pairs[slot]
    return SignVector(_quantize(combiner @ receiver._block + thresholds))


def lifted_arrangement(channel: ChannelMatrix, receiver: BlockwiseReceiver) -> Arrangement:
    """Arrangement cut by all slot pairs on the noiseless stacked output span.

    The l stacked outputs of the lifted channel live in the column span of
    I_l (x) H; expressing each slicer in an orthonormal chart of that span
    gives an arrangement in dimension l*rank whose regions are exactly the
    distinguishable noiseless blocks.
    """
    l = receiver.block_length
    basis = np.kron(np.eye(l), channel.left)  # (l n_r) x (l rank), orthonormal
    planes = []
    for combiner, thresholds in receiver.slot_pairs:
        chart = combiner @ basis
        for row, off in zip(chart, thresholds):
            planes.append(Hyperplane(row, float(off)))
    return Arrangement(tuple(planes), basis.shape[1])


def design_blockwise(
    channel: ChannelMatrix,
    block_length: int,
    n_q: int,
    zero_threshold: bool,
    seed: int,
    max_redraws: int = 16,
) -> BlockwiseReceiver:
    """Draw i.i.d. Gaussian slot combiners/thresholds over the lifted space.

    Random continuous draws maximize the region count with probability one.
    When l*n_q is small enough to enumerate, the draw is verified against
    the closed-form count and redrawn with the next seed on a miss (which
    has probability zero in exact arithmetic but guards against degenerate
    floating-point draws).
    """
    if block_length < 1 or n_q < 1:
        raise ValueError("block length and n_q must be >= 1")
    lifted_n = block_length * n_q
    lifted_d = block_length * channel.rank
    for attempt in range(max_redraws):
        rng = np.random.default_rng(seed + attempt)
        pairs = []
        for _ in range(block_length):
            combiner = rng.standard_normal((n_q, block_length * channel.n_r))
            thresholds = (
                np.zeros(n_q) if zero_threshold else rng.standard_normal(n_q)
            )
            pairs.append((combiner, thresholds))
        receiver = BlockwiseReceiver(block_length, pairs, channel.n_r)
        if lifted_n > 22:
            return receiver
        regions = enumerate_regions(lifted_arrangement(channel, receiver))
        expected = max_regions(RegionCountQuery(lifted_n, lifted_d, zero_threshold))
        if len(regions) == expected:
            return receiver
    raise RuntimeError(
        f"no draw achieved the maximal region count after {max_redraws} attempts"
    )


def sar_quantize(sample: float, n_bits: int, step: float) -> tuple[int, ...]:
    """Successive-approximation bits of one sample.

    Bit 1 is the sign of the sample; bit i compares the sample against
    step * sum_{j<i} 2^(n_bits-j-1) b_j, i.e. a binary search over 2**n_bits
    uniform bins of width ``step``.  Ties resolve to +1.
    """
    if n_bits < 1:
        raise ValueError(f"n_bits must be >= 1, got {n_bits}")
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    bits = []
    acc = 0.0
    for i in range(1, n_bits + 1):
        b = 1 if sample - step * acc >= 0.0 else -1
        bits.append(b)
        if i < n_bits:
            acc += 2.0 ** (n_bits - i - 1) * b
    return tuple(bits)


def sar_bin_index(bits: tuple[int, ...]) -> int:
    """Bin number in [0, 2**n) of a successive-approximation bit sequence."""
    index = 0
    for b in bits:
        index = 2 * index + (1 if b > 0 else 0)
    return index


class AdaptiveReceiver:
    """Adaptive-threshold receiver: combiner, slicer budgets, SAR pipelines.

    The combiner (s x n_r) maps each channel output to s streams; stream k
    owns ``stream_budgets[k]`` slicers and quantizes every sample over that
    many consecutive uses, one bit per use, with thresholds that are linear
    in recent slicer outputs: t(i) = A . vec(W(i)) where W(i) collects the
    outputs of the previous max budget - 1 uses.  A is generated from the
    successive-approximation recursion at construction.
    """

    def __init__(self, combiner: np.ndarray, stream_budgets, quantizer_steps):
        combiner = np.array(combiner, dtype=float)
        if combiner.ndim != 2:
            raise ValueError("combiner must be 2-D (streams x antennas)")
        budgets = tuple(int(b) for b in stream_budgets)
        steps = tuple(float(x) for x in quantizer_steps)
        if len(budgets) != combiner.shape[0] or len(steps) != len(budgets):
            raise ValueError("need one budget and one step per combiner stream")
        if any(b < 1 for b in budgets):
            raise ValueError(f"every stream budget must be >= 1, got {budgets}")
        if any(x <= 0 for x in steps):
            raise ValueError(f"quantizer steps must be positive, got {steps}")
        self.combiner = combiner
        self.stream_budgets = budgets
        self.quantizer_steps = steps
        self.n_q = sum(budgets)
        self.delay_depth = max(budgets) - 1
        self.threshold_coefficients = self._build_threshold_matrix()
        self.clock = 0
        self._stream_history: deque[np.ndarray] = deque(
            [np.zeros(len(budgets)) for _ in range(self.delay_depth)],
            maxlen=max(self.delay_depth, 1),
        )
        self._output_history: deque[np.ndarray] = deque(
            [np.zeros(self.n_q) for _ in range(self.delay_depth)],
            maxlen=max(self.delay_depth, 1),
        )
        self._pipelines: list[deque[list[int]]] = [deque() for _ in budgets]

    def _build_threshold_matrix(self) -> np.ndarray:
        # Row (k, j): slicer j of stream k compares its delayed sample
        # against step_k * sum_{j'<j} 2^(n_k-j'-1) b_j', where bit j' of the
        # same sample appeared j-j' uses ago.  vec(W) stacks the history
        # columns oldest first, so lag L lives in column depth-L.
        depth = self.delay_depth
        a = np.zeros((self.n_q, self.n_q * depth))
        offset = 0
        for k, n_k in enumerate(self.stream_budgets):
            for j in range(2, n_k + 1):
                row = offset + j - 1
                for jp in range(1, j):
                    lag = j - jp
                    col = (depth - lag) * self.n_q + offset + jp - 1
                    a[row, col] = -self.quantizer_steps[k] * 2.0 ** (n_k - jp - 1)
            offset += n_k
        return a

    @property
    def num_streams(self) -> int:
        return len(self.stream_budgets)

    def reset(self) -> None:
        depth = self.delay_depth
        self.clock = 0
        self._stream_history = deque(
            [np.zeros(self.num_streams) for _ in range(depth)], maxlen=max(depth, 1)
        )
        self._output_history = deque(
            [np.zeros(self.n_q) for _ in range(depth)], maxlen=max(depth, 1)
        )
        self._pipelines = [deque() for _ in self.stream_budgets]


def adaptive_step(receiver: AdaptiveReceiver, y: np.ndarray) -> list[tuple[int, ...] | None]:
    """Advance one channel use; returns each stream's finished bit group.

    Entry k is the complete successive-approximation bit tuple of the
    stream-k sample that finished on this use, or None while that stream's
    pipeline is still warming up.  After the warm-up of max budget - 1 uses
    every call emits one group per stream (n_q bits in total per use).
    """
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.size != receiver.combiner.shape[1]:
        raise ValueError(f"output of length {y.size} for combiner {receiver.combiner.shape}")
    receiver.clock += 1
    streams = receiver.combiner @ y
    depth = receiver.delay_depth

    # Slicer inputs: stage j of stream k sees the sample that entered j-1
    # uses ago (zero before the pipeline has filled).
    history = list(receiver._stream_history)
    inputs = np.zeros(receiver.n_q)
    offset = 0
    for k, n_k in enumerate(receiver.stream_budgets):
        for j in range(1, n_k + 1):
            inputs[offset + j - 1] = streams[k] if j == 1 else history[depth - (j - 1)][k]
        offset += n_k

    if depth > 0:
        past = np.concatenate(list(receiver._output_history))
        thresholds = receiver.threshold_coefficients @ past
    else:
        thresholds = np.zeros(receiver.n_q)
    outputs = np.where(inputs + thresholds >= 0.0, 1, -1)

    emitted: list[tuple[int, ...] | None] = []
    offset = 0
    for k, n_k in enumerate(receiver.stream_budgets):
        pipe = receiver._pipelines[k]
        pipe.appendleft([])
        for j, slot in enumerate(pipe):
            slot.append(int(outputs[offset + j]))
        if len(pipe) == n_k:
            emitted.append(tuple(pipe.pop()))
        else:
            emitted.append(None)
        offset += n_k

    if depth > 0:
        receiver._stream_history.append(streams)
        receiver._output_history.append(outputs.astype(float))
    return emitted


# ---------------------------------------------------------------------------
# Fixture serialization: configuration only, not runtime state.
# ---------------------------------------------------------------------------

def _write_matrix(out: io.StringIO, name: str, matrix: np.ndarray) -> None:
    matrix = np.atleast_2d(matrix)
    out.write(f"{name} {matrix.shape[0]} {matrix.shape[1]}\n")
    for row in matrix:
        out.write(" ".join(repr(float(v)) for v in row) + "\n")


class _Reader:
    def __init__(self, text: str):
        self.lines = [ln for ln in text.splitlines() if ln.strip()]
        self.pos = 0

    def line(self) -> str:
        ln = self.lines[self.pos]
        self.pos += 1
        return ln

    def matrix(self, name: str) -> np.ndarray:
        head = self.line().split()
        if head[0] != name:
            raise ValueError(f"expected section {name!r}, found {head[0]!r}")
        rows, cols = int(head[1]), int(head[2])
        data = [[float(v) for v in self.line().split()] for _ in range(rows)]
        m = np.array(data)
        if m.shape != (rows, cols):
            raise ValueError(f"section {name!r} has shape {m.shape}, expected {(rows, cols)}")
        return m


def blockwise_to_text(receiver: BlockwiseReceiver) -> str:
    out = io.StringIO()
    out.write(f"blockwise {receiver.block_length} {receiver.n_q} {receiver.n_r}\n")
    for i, (combiner, thresholds) in enumerate(receiver.slot_pairs):
        _write_matrix(out, f"V{i}", combiner)
        _write_matrix(out, f"t{i}", thresholds)
    return out.getvalue()


def blockwise_from_text(text: str) -> BlockwiseReceiver:
    reader = _Reader(text)
    head = reader.line().split()
    if head[0] != "blockwise":
        raise ValueError(f"not a blockwise receiver fixture: {head[0]!r}")
    block_length, _, n_r = int(head[1]), int(head[2]), int(head[3])
    pairs = []
    for i in range(block_length):
        combiner = reader.matrix(f"V{i}")
        thresholds = reader.matrix(f"t{i}").reshape(-1)
        pairs.append((combiner, thresholds))
    return BlockwiseReceiver(block_length, pairs, n_r)


def adaptive_to_text(receiver: AdaptiveReceiver) -> str:
    out = io.StringIO()
    out.write("adaptive\n")
    out.write("budgets " + " ".join(str(b) for b in receiver.stream_budgets) + "\n")
    out.write("steps " + " ".join(repr(x) for x in receiver.quantizer_steps) + "\n")
    _write_matrix(out, "combiner", receiver.combiner)
    return out.getvalue()


def adaptive_from_text(text: str) -> AdaptiveReceiver:
    reader = _Reader(text)
    if reader.line().strip() != "adaptive":
        raise ValueError("not an adaptive receiver fixture")
    budgets = [int(v) for v in reader.line().split()[1:]]
    steps = [float(v) for v in reader.line().split()[1:]]
    combiner = reader.matrix("combiner")
    return AdaptiveReceiver(combiner, budgets, steps)
