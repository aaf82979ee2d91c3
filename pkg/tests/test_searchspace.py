import itertools

import numpy as np
import pytest

from naswot.searchspace import (
    EDGES,
    NUM_EDGES,
    SPACE_SIZE,
    Genotype,
    MalformedArchString,
    OpKind,
    as_generator,
    enumerate_all,
    format_arch,
    mutate,
    parse_arch,
    sample_uniform,
)

EXAMPLE = "|nor_conv_3x3~0|+|none~0|skip_connect~1|+|avg_pool_3x3~0|nor_conv_1x1~1|skip_connect~2|"
ALL_IDENTITY = "|skip_connect~0|+|skip_connect~0|skip_connect~1|+|skip_connect~0|skip_connect~1|skip_connect~2|"


class TestSpaceConstants:
    def test_edge_list_is_the_fixed_dag(self):
        assert EDGES == ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
        assert NUM_EDGES == 6

    def test_space_size(self):
        assert SPACE_SIZE == 5 ** 6 == 15_625

    def test_op_vocabulary(self):
        names = {op.canonical_name for op in OpKind}
        assert names == {"none", "skip_connect", "nor_conv_3x3", "nor_conv_1x1", "avg_pool_3x3"}


class TestParseFormat:
    def test_example_string_decodes_edge_by_edge(self):
        genotype = parse_arch(EXAMPLE)
        assert genotype.ops == (
            OpKind.CONV_3X3,   # A -> B
            OpKind.ZEROISE,    # A -> C
            OpKind.AVGPOOL_3X3,  # A -> D
            OpKind.IDENTITY,   # B -> C
            OpKind.CONV_1X1,   # B -> D
            OpKind.IDENTITY,   # C -> D
        )

    def test_format_inverts_parse_on_example(self):
        assert format_arch(parse_arch(EXAMPLE)) == EXAMPLE

    def test_all_identity_string(self):
        assert str(Genotype.uniform(OpKind.IDENTITY)) == ALL_IDENTITY

    def test_roundtrip_over_every_genotype(self):
        for genotype in enumerate_all():
            assert parse_arch(format_arch(genotype)) == genotype

    @pytest.mark.parametrize(
        "text",
        [
            "",
            "|none~0|",
            "|none~0|+|none~0|none~1|",  # only two groups
            EXAMPLE + "+|none~0|",
            "|bogus~0|+|none~0|none~1|+|none~0|none~1|none~2|",
            "|none~1|+|none~0|none~1|+|none~0|none~1|none~2|",  # bad source index
            "|none~0|+|none~0|none~0|+|none~0|none~1|none~2|",  # repeated source
            "|none~0|+|none~0|+|none~0|none~1|none~2|",  # missing edge in group 2
            "|none0|+|none~0|none~1|+|none~0|none~1|none~2|",  # missing tilde
            "none~0|+|none~0|none~1|+|none~0|none~1|none~2|",
        ],
    )
    def test_malformed_strings_rejected(self, text):
        with pytest.raises(MalformedArchString):
            parse_arch(text)

    def test_genotype_requires_six_ops(self):
        with pytest.raises(ValueError):
            Genotype(ops=(OpKind.ZEROISE,) * 5)


class TestSampling:
    def test_seeded_sampling_is_deterministic(self):
        a = [sample_uniform(as_generator(42)) for _ in range(5)]
        b = [sample_uniform(as_generator(42)) for _ in range(5)]
        assert a == b

    def test_integer_seed_accepted_directly(self):
        assert sample_uniform(7) == sample_uniform(as_generator(7))

    def test_every_op_reachable_on_every_edge(self):
        gen = as_generator(0)
        seen = [set() for _ in range(NUM_EDGES)]
        for _ in range(2000):
            for edge, op in enumerate(sample_uniform(gen).ops):
                seen[edge].add(op)
        assert all(len(ops) == len(OpKind) for ops in seen)

    def test_as_generator_passes_generators_through(self):
        gen = np.random.default_rng(3)
        assert as_generator(gen) is gen


class TestEnumerate:
    def test_full_enumeration_is_the_whole_space(self):
        space = list(enumerate_all())
        assert len(space) == SPACE_SIZE
        assert len(set(space)) == SPACE_SIZE

    def test_reduced_op_space(self):
        ops = (OpKind.ZEROISE, OpKind.IDENTITY, OpKind.CONV_3X3)
        space = list(enumerate_all(ops=ops))
        assert len(space) == 3 ** 6 == 729
        assert len(set(space)) == 729
        used = set(itertools.chain.from_iterable(g.ops for g in space))
        assert used == set(ops)

    def test_enumeration_order_is_stable(self):
        assert list(enumerate_all()) == list(enumerate_all())


class TestMutate:
    def test_changes_exactly_one_edge(self):
        gen = as_generator(11)
        for _ in range(300):
            parent = sample_uniform(gen)
            child = mutate(parent, gen)
            diffs = [i for i in range(NUM_EDGES) if parent.ops[i] != child.ops[i]]
            assert len(diffs) == 1

    def test_deterministic_given_seed(self):
        parent = sample_uniform(5)
        assert mutate(parent, 123) == mutate(parent, 123)

    def test_all_edges_eventually_mutated(self):
        gen = as_generator(2)
        parent = Genotype.uniform(OpKind.ZEROISE)
        touched = set()
        for _ in range(500):
            child = mutate(parent, gen)
            touched.update(i for i in range(NUM_EDGES) if child.ops[i] != parent.ops[i])
        assert touched == set(range(NUM_EDGES))
