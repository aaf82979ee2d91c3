"""Cell-skeleton networks and their binary ReLU activation codes.

A network is built from one Genotype repeated through a fixed skeleton:

    stem conv+BN
    -> stage 1: cells_per_stage cells
    -> residual downsample (stride 2, channels x2)
    -> stage 2 -> residual downsample -> stage 3
    -> BN + ReLU -> global average pool -> linear head

Each cell realizes the genotype's 6 edges on the 4-node DAG; a node's
state is the sum of its incoming edge outputs.  Convolution edges are
ReLU -> conv -> BN triplets, so every such edge contributes one ReLU
site.  A forward pass records, for every input, one bit per ReLU unit
(1 where the pre-activation is strictly positive), bit-packed 64 to a
word.  The code length N_A is the total unit count over all sites.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .layers import (
    avg_pool2d,
    batchnorm_batchstats,
    conv2d,
    global_avg_pool,
    linear,
)
from .searchspace import EDGES, Genotype, OpKind

__all__ = [
    "NetworkConfig",
    "Network",
    "ActivationCodeMatrix",
    "NonFiniteActivation",
    "build_network",
    "forward_collect_codes",
    "count_relu_units",
]

Shape = tuple[int, int, int]


class NonFiniteActivation(ArithmeticError):
    """A forward pass produced a NaN or infinite activation."""


@dataclass(frozen=True)
class NetworkConfig:
    """Skeleton hyperparameters.  The default is the full-scale setup
    (stem 16, five cells per stage, 32x32 RGB inputs); ``desk()`` gives
    the small configuration used for fast CPU experiments."""

    stem_channels: int = 16
    cells_per_stage: int = 5
    stages: int = 3
    input_shape: Shape = (3, 32, 32)
    bn_epsilon: float = 1e-5
    init_seed: int = 0
    num_classes: int = 10

    def __post_init__(self) -> None:
        if self.stem_channels < 1 or self.cells_per_stage < 1 or self.num_classes < 1:
            raise ValueError("channel, cell, and class counts must be positive")
        if self.stages != 3:
            raise ValueError("the skeleton is fixed at 3 stages")
        c, h, w = self.input_shape
        if c < 1 or h < 1 or w < 1:
            raise ValueError(f"bad input shape {self.input_shape}")
        if h % 4 or w % 4:
            raise ValueError("input height/width must be multiples of 4 (two stride-2 blocks)")
        if self.bn_epsilon < 0:
            raise ValueError("bn_epsilon must be non-negative")

    @classmethod
    def desk(cls, **overrides) -> "NetworkConfig":
        """Small config for desk-scale runs: stem 8, one cell per stage, 8x8 inputs."""
        base = dict(stem_channels=8, cells_per_stage=1, input_shape=(3, 8, 8))
        base.update(overrides)
        return cls(**base)


@dataclass(frozen=True)
class ActivationCodeMatrix:
    """Per-input binary ReLU codes, bit-packed into uint64 words.

    Row i holds the n_units bits of input i in layer-major order
    (channel-major, then row-major within a site).
    """

    words: np.ndarray  # (N, n_words) uint64
    n_units: int

    @property
    def n_inputs(self) -> int:
        return self.words.shape[0]

    @classmethod
    def from_bits(cls, bits: np.ndarray) -> "ActivationCodeMatrix":
        """Pack a (N, n_units) boolean array."""
        n, n_units = bits.shape
        packed = np.packbits(bits, axis=1)
        pad = (-packed.shape[1]) % 8
        if pad:
            packed = np.pad(packed, ((0, 0), (0, pad)))
        return cls(words=np.ascontiguousarray(packed).view(np.uint64), n_units=n_units)

    def unpack(self) -> np.ndarray:
        """Recover the (N, n_units) boolean code matrix."""
        bits = np.unpackbits(self.words.view(np.uint8), axis=1)
        return bits[:, : self.n_units].astype(bool)


class _CodeRecorder:
    """Collects ReLU pre-activation sign bits during a forward pass."""

    def __init__(self) -> None:
        self.site_bits: list[np.ndarray] = []

    def record(self, pre_activation: np.ndarray) -> None:
        if not np.isfinite(pre_activation).all():
            raise NonFiniteActivation("NaN or Inf pre-activation at a ReLU site")
        n = pre_activation.shape[0]
        self.site_bits.append((pre_activation > 0).reshape(n, -1))

    def codes(self) -> ActivationCodeMatrix:
        return ActivationCodeMatrix.from_bits(np.concatenate(self.site_bits, axis=1))


# ---------------------------------------------------------------------------
# Layer graph.  Every piece answers forward(x, recorder), out_shape(shape)
# and relu_units(shape); composites walk their children for all three.
# ---------------------------------------------------------------------------


class Conv:
    def __init__(self, weights: np.ndarray, stride: int, padding: int) -> None:
        self.weights = weights
        self.stride = stride
        self.padding = padding

    def forward(self, x, recorder):
        return conv2d(x, self.weights, self.stride, self.padding)

    def out_shape(self, shape: Shape) -> Shape:
        _, h, w = shape
        k = self.weights.shape[2]
        oh = (h + 2 * self.padding - k) // self.stride + 1
        ow = (w + 2 * self.padding - k) // self.stride + 1
        return (self.weights.shape[0], oh, ow)

    def relu_units(self, shape: Shape) -> int:
        return 0


class BatchNorm:
    def __init__(self, epsilon: float) -> None:
        self.epsilon = epsilon

    def forward(self, x, recorder):
        return batchnorm_batchstats(x, self.epsilon)

    def out_shape(self, shape: Shape) -> Shape:
        return shape

    def relu_units(self, shape: Shape) -> int:
        return 0


class ReLU:
    def forward(self, x, recorder):
        if recorder is not None:
            recorder.record(x)
        return np.maximum(x, 0.0)

    def out_shape(self, shape: Shape) -> Shape:
        return shape

    def relu_units(self, shape: Shape) -> int:
        return math.prod(shape)


class AvgPool:
    def __init__(self, kernel: int, stride: int, padding: int) -> None:
        self.kernel = kernel
        self.stride = stride
        self.padding = padding

    def forward(self, x, recorder):
        return avg_pool2d(x, self.kernel, self.stride, self.padding)

    def out_shape(self, shape: Shape) -> Shape:
        c, h, w = shape
        oh = (h + 2 * self.padding - self.kernel) // self.stride + 1
        ow = (w + 2 * self.padding - self.kernel) // self.stride + 1
        return (c, oh, ow)

    def relu_units(self, shape: Shape) -> int:
        return 0


class Zero:
    """The zeroise edge: a zero tensor of the input's shape."""

    def forward(self, x, recorder):
        return np.zeros_like(x)

    def out_shape(self, shape: Shape) -> Shape:
        return shape

    def relu_units(self, shape: Shape) -> int:
        return 0


class Sequential:
    def __init__(self, layers) -> None:
        self.layers = list(layers)

    def forward(self, x, recorder):
        for layer in self.layers:
            x = layer.forward(x, recorder)
        return x

    def out_shape(self, shape: Shape) -> Shape:
        for layer in self.layers:
            shape = layer.out_shape(shape)
        return shape

    def relu_units(self, shape: Shape) -> int:
        total = 0
        for layer in self.layers:
            total += layer.relu_units(shape)
            shape = layer.out_shape(shape)
        return total


class Cell:
    """One genotype cell; node state = sum of incoming edge outputs."""

    def __init__(self, edge_ops: list[Sequential]) -> None:
        self.edge_ops = edge_ops  # aligned with searchspace.EDGES

    def _node_states(self, x, recorder):
        states = {0: x}
        for dest in (1, 2, 3):
            acc = None
            for k, (src, d) in enumerate(EDGES):
                if d != dest:
                    continue
                y = self.edge_ops[k].forward(states[src], recorder)
                acc = y if acc is None else acc + y
            states[dest] = acc
        return states

    def forward(self, x, recorder):
        return self._node_states(x, recorder)[3]

    def out_shape(self, shape: Shape) -> Shape:
        return shape  # every edge op preserves shape within a stage

    def relu_units(self, shape: Shape) -> int:
        return sum(op.relu_units(shape) for op in self.edge_ops)


class DownsampleBlock:
    """Residual block: stride-2 double-conv main path, pooled 1x1 shortcut."""

    def __init__(self, main: Sequential, shortcut: Sequential) -> None:
        self.main = main
        self.shortcut = shortcut

    def forward(self, x, recorder):
        return self.main.forward(x, recorder) + self.shortcut.forward(x, recorder)

    def out_shape(self, shape: Shape) -> Shape:
        return self.main.out_shape(shape)

    def relu_units(self, shape: Shape) -> int:
        return self.main.relu_units(shape)  # the shortcut has no ReLU


class GlobalAvgPool:
    def forward(self, x, recorder):
        return global_avg_pool(x)

    def out_shape(self, shape: Shape) -> Shape:
        return (shape[0], 1, 1)

    def relu_units(self, shape: Shape) -> int:
        return 0


class Linear:
    def __init__(self, weights: np.ndarray) -> None:
        self.weights = weights

    def forward(self, x, recorder):
        return linear(x, self.weights)

    def out_shape(self, shape: Shape) -> Shape:
        return (self.weights.shape[0], 1, 1)

    def relu_units(self, shape: Shape) -> int:
        return 0


@dataclass
class Network:
    """An untrained network: a genotype realized through the skeleton."""

    genotype: Genotype
    config: NetworkConfig
    blocks: list = field(repr=False)

    def forward(self, batch: np.ndarray, recorder: _CodeRecorder | None = None) -> np.ndarray:
        x = batch
        for block in self.blocks:
            x = block.forward(x, recorder)
        if not np.isfinite(x).all():
            raise NonFiniteActivation("NaN or Inf in network output")
        return x


def _he_normal(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int) -> np.ndarray:
    std = math.sqrt(2.0 / fan_in)
    return rng.standard_normal(shape, dtype=np.float32) * np.float32(std)


def _conv_layer(rng, c_in: int, c_out: int, kernel: int, stride: int) -> Conv:
    w = _he_normal(rng, (c_out, c_in, kernel, kernel), fan_in=c_in * kernel * kernel)
    return Conv(w, stride=stride, padding=kernel // 2)


def _edge_op(op: OpKind, rng, channels: int, eps: float) -> Sequential:
    if op is OpKind.ZEROISE:
        return Sequential([Zero()])
    if op is OpKind.IDENTITY:
        return Sequential([])
    if op is OpKind.CONV_3X3:
        return Sequential([ReLU(), _conv_layer(rng, channels, channels, 3, 1), BatchNorm(eps)])
    if op is OpKind.CONV_1X1:
        return Sequential([ReLU(), _conv_layer(rng, channels, channels, 1, 1), BatchNorm(eps)])
    if op is OpKind.AVGPOOL_3X3:
        return Sequential([AvgPool(3, stride=1, padding=1)])
    raise ValueError(f"unknown op {op!r}")


def _make_cell(genotype: Genotype, rng, channels: int, eps: float) -> Cell:
    return Cell([_edge_op(op, rng, channels, eps) for op in genotype.ops])


def _make_downsample(rng, c_in: int, eps: float) -> DownsampleBlock:
    c_out = 2 * c_in
    main = Sequential(
        [
            ReLU(),
            _conv_layer(rng, c_in, c_out, 3, stride=2),
            BatchNorm(eps),
            ReLU(),
            _conv_layer(rng, c_out, c_out, 3, stride=1),
            BatchNorm(eps),
        ]
    )
    shortcut = Sequential(
        [
            AvgPool(2, stride=2, padding=0),
            _conv_layer(rng, c_in, c_out, 1, stride=1),
        ]
    )
    return DownsampleBlock(main, shortcut)


def build_network(genotype: Genotype, config: NetworkConfig) -> Network:
    """Instantiate the skeleton for a genotype, weights drawn at init_seed.

    Structure and weights are a pure function of (genotype, config):
    weight arrays are drawn from a single seeded stream in fixed build
    order (stem, stage cells, downsample blocks, head).
    """
    rng = np.random.default_rng(config.init_seed)
    eps = config.bn_epsilon
    c_in = config.input_shape[0]
    channels = config.stem_channels

    blocks: list = [Sequential([_conv_layer(rng, c_in, channels, 3, 1), BatchNorm(eps)])]
    for stage in range(config.stages):
        if stage > 0:
            blocks.append(_make_downsample(rng, channels, eps))
            channels *= 2
        for _ in range(config.cells_per_stage):
            blocks.append(_make_cell(genotype, rng, channels, eps))
    head_w = _he_normal(rng, (config.num_classes, channels), fan_in=channels)
    blocks.append(Sequential([BatchNorm(eps), ReLU()]))
    blocks.append(GlobalAvgPool())
    blocks.append(Linear(head_w))
    return Network(genotype=genotype, config=config, blocks=blocks)


def forward_collect_codes(net: Network, batch: np.ndarray) -> ActivationCodeMatrix:
    """Run the forward pass and return the packed activation codes.

    Raises NonFiniteActivation if any activation is NaN or infinite.
    """
    expected = net.config.input_shape
    if batch.ndim != 4 or batch.shape[1:] != expected:
        raise ValueError(f"batch shape {batch.shape} does not match input shape {expected}")
    if batch.shape[0] < 2:
        raise ValueError("need at least 2 inputs for batch statistics")
    recorder = _CodeRecorder()
    net.forward(np.ascontiguousarray(batch, dtype=np.float32), recorder)
    return recorder.codes()


def count_relu_units(net: Network, input_shape: Shape | None = None) -> int:
    """Total ReLU unit count N_A from shape propagation alone (no data)."""
    shape = net.config.input_shape if input_shape is None else input_shape
    total = 0
    for block in net.blocks:
        total += block.relu_units(shape)
        shape = block.out_shape(shape)
    return total
