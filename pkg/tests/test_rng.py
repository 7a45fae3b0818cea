"""Counter generator: sequential/bulk equality and substream behavior."""

import numpy as np

from specpredict.rng import SplitMix64, substream_seed, substream_seeds, uniform_block


class TestSplitMix64:
    def test_block_draw_equals_repeated_scalar_draws(self):
        for seed in (0, 1, 42, 2**63, 2**64 - 1):
            singles = SplitMix64(seed)
            block = SplitMix64(seed)
            expected = np.array([singles.random() for _ in range(64)])
            np.testing.assert_array_equal(block.random(64), expected)

    def test_block_draws_continue_the_stream(self):
        a = SplitMix64(7)
        first, rest = a.random(10), a.random(10)
        b = SplitMix64(7)
        both = b.random(20)
        np.testing.assert_array_equal(np.concatenate([first, rest]), both)

    def test_values_in_unit_interval(self):
        u = SplitMix64(99).random(10_000)
        assert u.min() >= 0.0
        assert u.max() < 1.0

    def test_determinism(self):
        assert SplitMix64(5).random(100).tolist() == SplitMix64(5).random(100).tolist()

    def test_seeds_give_different_streams(self):
        assert SplitMix64(1).random(8).tolist() != SplitMix64(2).random(8).tolist()

    def test_mean_and_spread_plausible(self):
        u = SplitMix64(2024).random(200_000)
        assert abs(u.mean() - 0.5) < 0.005
        assert abs(u.var() - 1.0 / 12.0) < 0.002

    def test_zero_size_block(self):
        assert SplitMix64(3).random(0).size == 0


class TestSubstreams:
    def test_matches_scalar_derivation(self):
        seeds = substream_seeds(77, 100)
        for r in (0, 1, 50, 99):
            assert int(seeds[r]) == substream_seed(77, r)

    def test_distinct_within_run(self):
        seeds = substream_seeds(123, 10_000)
        assert len(set(seeds.tolist())) == 10_000

    def test_extending_replicas_preserves_prefix(self):
        short = substream_seeds(9, 10)
        long = substream_seeds(9, 1000)
        np.testing.assert_array_equal(short, long[:10])

    def test_negative_index_rejected(self):
        try:
            substream_seed(1, -1)
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")


class TestUniformBlock:
    def test_rows_match_sequential_streams(self):
        seeds = substream_seeds(55, 8)
        block = uniform_block(seeds, 32)
        for r in range(8):
            np.testing.assert_array_equal(block[r], SplitMix64(int(seeds[r])).random(32))

    def test_offset_skips_draws(self):
        seeds = substream_seeds(55, 4)
        shifted = uniform_block(seeds, 16, offset=3)
        full = uniform_block(seeds, 19)
        np.testing.assert_array_equal(shifted, full[:, 3:])
