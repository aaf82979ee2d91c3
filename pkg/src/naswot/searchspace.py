"""Cell search space: 6 operation choices on a fixed 4-node DAG.

A cell is a densely connected DAG over nodes A, B, C, D (node A is the
input, node D the output).  Every one of the 6 forward edges carries one
of 5 operations, so the space holds 5**6 = 15,625 distinct cells.  Cells
are serialized to the canonical architecture-string grammar

    |op~0|+|op~0|op~1|+|op~0|op~1|op~2|

used by published benchmark accuracy exports, which makes the string the
join key between this package and those tables.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence, Union

import numpy as np

__all__ = [
    "OpKind",
    "Genotype",
    "MalformedArchString",
    "EDGES",
    "NUM_EDGES",
    "SPACE_SIZE",
    "as_generator",
    "parse_arch",
    "format_arch",
    "sample_uniform",
    "enumerate_all",
    "mutate",
]


class OpKind(enum.IntEnum):
    """The five edge operations, with stable ids 0..4."""

    ZEROISE = 0
    IDENTITY = 1
    CONV_3X3 = 2
    CONV_1X1 = 3
    AVGPOOL_3X3 = 4

    @property
    def canonical_name(self) -> str:
        return _OP_TO_NAME[self]


# Benchmark-export vocabulary; keys double as the only accepted spellings.
_OP_TO_NAME = {
    OpKind.ZEROISE: "none",
    OpKind.IDENTITY: "skip_connect",
    OpKind.CONV_3X3: "nor_conv_3x3",
    OpKind.CONV_1X1: "nor_conv_1x1",
    OpKind.AVGPOOL_3X3: "avg_pool_3x3",
}
_NAME_TO_OP = {name: op for op, name in _OP_TO_NAME.items()}

# Edge k connects node EDGES[k][0] -> EDGES[k][1]; nodes are 0=A .. 3=D.
EDGES = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
NUM_EDGES = len(EDGES)
SPACE_SIZE = len(OpKind) ** NUM_EDGES


class MalformedArchString(ValueError):
    """Raised when an architecture string does not follow the grammar."""


@dataclass(frozen=True)
class Genotype:
    """One cell: an operation for each of the 6 DAG edges.

    ``ops[k]`` is the operation on edge ``EDGES[k]``, i.e. the order is
    A->B, A->C, A->D, B->C, B->D, C->D.
    """

    ops: tuple[OpKind, ...]

    def __post_init__(self) -> None:
        if len(self.ops) != NUM_EDGES:
            raise ValueError(f"genotype needs {NUM_EDGES} ops, got {len(self.ops)}")
        object.__setattr__(self, "ops", tuple(OpKind(op) for op in self.ops))

    @classmethod
    def uniform(cls, op: OpKind) -> "Genotype":
        """The genotype with the same operation on every edge."""
        return cls((op,) * NUM_EDGES)

    def __str__(self) -> str:
        return format_arch(self)


def as_generator(rng: Union[int, np.random.Generator]) -> np.random.Generator:
    """Accept an integer seed or a Generator; return a Generator."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def parse_arch(text: str) -> Genotype:
    """Parse a canonical architecture string into a Genotype.

    Raises MalformedArchString on a wrong group count, an unknown
    operation name, or a source index that does not match its slot.
    """
    groups = text.split("+")
    if len(groups) != 3:
        raise MalformedArchString(f"expected 3 node groups, got {len(groups)}: {text!r}")
    ops_by_edge: dict[tuple[int, int], OpKind] = {}
    for node_idx, group in enumerate(groups, start=1):
        if len(group) < 2 or not (group.startswith("|") and group.endswith("|")):
            raise MalformedArchString(f"group {node_idx} not |-delimited: {group!r}")
        tokens = group[1:-1].split("|")
        if len(tokens) != node_idx:
            raise MalformedArchString(
                f"group {node_idx} has {len(tokens)} edges, expected {node_idx}"
            )
        for source_idx, token in enumerate(tokens):
            name, sep, src = token.partition("~")
            if not sep or name not in _NAME_TO_OP:
                raise MalformedArchString(f"unknown operation token {token!r}")
            if src != str(source_idx):
                raise MalformedArchString(
                    f"edge token {token!r} should name source {source_idx}"
                )
            ops_by_edge[(source_idx, node_idx)] = _NAME_TO_OP[name]
    return Genotype(tuple(ops_by_edge[edge] for edge in EDGES))


def format_arch(genotype: Genotype) -> str:
    """Render a Genotype as its canonical architecture string."""
    by_edge = dict(zip(EDGES, genotype.ops))
    groups = []
    for node_idx in (1, 2, 3):
        tokens = [
            f"{by_edge[(src, node_idx)].canonical_name}~{src}" for src in range(node_idx)
        ]
        groups.append("|" + "|".join(tokens) + "|")
    return "+".join(groups)


def sample_uniform(rng: Union[int, np.random.Generator]) -> Genotype:
    """Draw one genotype uniformly from all 15,625 cells."""
    gen = as_generator(rng)
    ids = gen.integers(0, len(OpKind), size=NUM_EDGES)
    return Genotype(tuple(OpKind(int(i)) for i in ids))


def enumerate_all(ops: Sequence[OpKind] | None = None) -> Iterator[Genotype]:
    """Yield every genotype exactly once, in lexicographic op-id order.

    ``ops`` restricts the per-edge vocabulary (e.g. a reduced 3-op space
    for exhaustive experiments); the default is all five operations.
    """
    vocab = sorted(set(OpKind if ops is None else ops))
    for combo in itertools.product(vocab, repeat=NUM_EDGES):
        yield Genotype(combo)


def mutate(genotype: Genotype, rng: Union[int, np.random.Generator]) -> Genotype:
    """Reassign one uniformly chosen edge to a uniformly chosen *other* op."""
    gen = as_generator(rng)
    edge = int(gen.integers(NUM_EDGES))
    alternatives = [op for op in OpKind if op != genotype.ops[edge]]
    new_op = alternatives[int(gen.integers(len(alternatives)))]
    ops = list(genotype.ops)
    ops[edge] = new_op
    return Genotype(tuple(ops))
