import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hdcam import encoder as enc_mod
from hdcam.cost import CostLedger
from hdcam.encoder import (
    EncodingConfig,
    ItemMemory,
    LevelMemory,
    build_item_memory,
    build_level_memory,
    encode_ngram,
    encode_record,
    quantize,
)
from hdcam.errors import ConfigError, DimensionError, GenerationError, TooManyLevelsError
from hdcam.hvcore import (
    AccumulatorHV,
    BipolarHV,
    Rng,
    bind,
    bundle_add,
    hamming,
    permute_shift,
    random_hv,
)


class TestItemMemory:
    def test_quasi_orthogonality_band(self, rng):
        im = build_item_memory(26, 2048, rng)
        hvs = list(im.symbols.values())
        lo, hi = 1024 - 4 * math.sqrt(2048), 1024 + 4 * math.sqrt(2048)
        for i in range(26):
            for j in range(i + 1, 26):
                assert lo <= hamming(hvs[i], hvs[j]) <= hi

    def test_single_symbol(self, rng):
        assert len(build_item_memory(1, 128, rng)) == 1

    def test_zero_symbols(self, rng):
        with pytest.raises(ValueError):
            build_item_memory(0, 128, rng)

    def test_generation_error_after_retry(self, rng, monkeypatch):
        calls = []
        monkeypatch.setattr(
            enc_mod, "_pairwise_quasi_orthogonal", lambda hvs, dim: calls.append(1) and False
        )
        with pytest.raises(GenerationError):
            build_item_memory(3, 128, rng)
        assert len(calls) == 2


class TestLevelMemory:
    def test_two_levels_half_distance(self, rng):
        lm = build_level_memory(2, 2048, rng)
        assert hamming(lm.levels[0], lm.levels[1]) == 1024

    def test_five_levels_proportional(self, rng):
        lm = build_level_memory(5, 2048, rng)
        assert hamming(lm.levels[0], lm.levels[4]) == 1024
        assert hamming(lm.levels[0], lm.levels[2]) == 512

    def test_too_many_levels(self, rng):
        with pytest.raises(TooManyLevelsError):
            build_level_memory(2049, 2048, rng)

    def test_distance_monotone_in_separation(self, rng):
        lm = build_level_memory(9, 1024, rng)
        by_sep = {}
        for i in range(9):
            for j in range(i + 1, 9):
                by_sep.setdefault(j - i, []).append(hamming(lm.levels[i], lm.levels[j]))
        for d in range(2, 9):
            assert min(by_sep[d]) >= max(by_sep[d - 1])

    def test_endpoints_exact_even_when_uneven_blocks(self, rng):
        # 7 levels over 512 dims: 256 flips split into 6 blocks of 42/43
        lm = build_level_memory(7, 512, rng)
        assert hamming(lm.levels[0], lm.levels[6]) == 256


class TestQuantize:
    def setup_method(self):
        levels = [BipolarHV(128, np.zeros(128, dtype=np.uint8)) for _ in range(4)]
        self.lm = LevelMemory(levels, value_min=0.0, value_max=1.0)

    def test_min_maps_to_zero(self):
        assert quantize(0.0, self.lm) == 0

    def test_max_maps_to_top(self):
        assert quantize(1.0, self.lm) == 3

    def test_midpoint(self):
        assert quantize(0.5, self.lm) == 2

    def test_clamping(self):
        assert quantize(-5.0, self.lm) == 0
        assert quantize(5.0, self.lm) == 3

    def test_degenerate_range(self):
        lm = LevelMemory(self.lm.levels, value_min=2.0, value_max=2.0)
        assert quantize(2.0, lm) == 0

    @given(x=st.floats(-1, 2), y=st.floats(-1, 2))
    def test_monotone(self, x, y):
        if x <= y:
            assert quantize(x, self.lm) <= quantize(y, self.lm)


def _toy_memories(n_features, dim, rng, L=4):
    im = build_item_memory(n_features, dim, rng)
    lm = build_level_memory(L, dim, rng)
    return im, lm


class TestEncodeRecord:
    def test_single_feature_equals_bound_vector(self, rng):
        im, lm = _toy_memories(1, 128, rng)
        acc = encode_record([0.6], im, lm)
        expected = bind(im.symbols[0], lm.levels[quantize(0.6, lm)])
        assert np.array_equal(acc.counts, expected.bits.astype(np.int16))
        assert acc.n_bundled == 1

    def test_identical_features_identical_basis(self, rng):
        hv = random_hv(128, rng)
        im = ItemMemory(128, {0: hv, 1: hv})
        lm = build_level_memory(4, 128, rng)
        acc = encode_record([0.3, 0.3], im, lm)
        assert set(np.unique(acc.counts)) <= {0, 2}

    def test_three_feature_brute_force(self, rng):
        im, lm = _toy_memories(3, 256, rng)
        features = [0.1, 0.5, 0.9]
        acc = encode_record(features, im, lm)
        expected = np.zeros(256, dtype=np.int64)
        for pos, x in enumerate(features):
            bound = im.symbols[pos].bits ^ lm.levels[quantize(x, lm)].bits
            expected += bound
        assert np.array_equal(acc.counts, expected.astype(np.int16))
        assert acc.n_bundled == 3

    def test_accumulation_order_irrelevant(self, rng):
        im, lm = _toy_memories(5, 256, rng)
        features = [0.1, 0.3, 0.5, 0.7, 0.9]
        acc = encode_record(features, im, lm)
        shuffled = AccumulatorHV.zeros(256)
        for pos in [3, 0, 4, 1, 2]:
            shuffled = bundle_add(
                shuffled, bind(im.symbols[pos], lm.levels[quantize(features[pos], lm)])
            )
        assert np.array_equal(acc.counts, shuffled.counts)

    def test_arity_mismatch(self, rng):
        im, lm = _toy_memories(3, 128, rng)
        with pytest.raises(DimensionError):
            encode_record([0.1, 0.2], im, lm)

    def test_cost_charges(self, rng):
        im, lm = _toy_memories(4, 128, rng)
        ledger = CostLedger(128)
        encode_record([0.1, 0.2, 0.3, 0.4], im, lm, ledger=ledger)
        assert ledger.count("multiplication") == 4
        assert ledger.count("addition") == 4
        assert ledger.count("permutation") == 0


class TestEncodeNgram:
    def test_n1_plain_bundle(self, rng):
        im = build_item_memory(4, 128, rng)
        cfg = EncodingConfig(scheme="record", n=1, dim=128)
        acc = encode_ngram([0, 1, 2], 1, im, cfg)
        expected = np.zeros(128, dtype=np.int64)
        for s in (0, 1, 2):
            expected += im.symbols[s].bits
        assert np.array_equal(acc.counts, expected.astype(np.int16))

    def test_n1_reversal_invariant(self, rng):
        im = build_item_memory(4, 128, rng)
        cfg = EncodingConfig(scheme="record", n=1, dim=128)
        a = encode_ngram([0, 1, 2], 1, im, cfg)
        b = encode_ngram([2, 1, 0], 1, im, cfg)
        assert np.array_equal(a.counts, b.counts)

    def test_bigram_single_window(self, rng):
        im = build_item_memory(2, 128, rng)
        cfg = EncodingConfig(scheme="ngram", n=2, dim=128)
        acc = encode_ngram([0, 1], 2, im, cfg)
        gram = bind(permute_shift(im.symbols[0], 1), im.symbols[1])
        assert np.array_equal(acc.counts, gram.bits.astype(np.int16))

    def test_trigram_brute_force_shift_mode(self, rng):
        im = build_item_memory(5, 256, rng)
        cfg = EncodingConfig(scheme="ngram", n=3, dim=256)
        seq = [0, 3, 1, 4, 2]
        acc = encode_ngram(seq, 3, im, cfg)
        expected = np.zeros(256, dtype=np.int64)
        for t in range(len(seq) - 2):
            gram = im.symbols[seq[t + 2]].bits.copy()
            gram ^= permute_shift(im.symbols[seq[t + 1]], 1).bits
            gram ^= permute_shift(im.symbols[seq[t]], 2).bits
            expected += gram
        assert np.array_equal(acc.counts, expected.astype(np.int16))

    def test_order_sensitive_for_n2(self, rng):
        im = build_item_memory(4, 256, rng)
        cfg = EncodingConfig(scheme="ngram", n=2, dim=256)
        a = encode_ngram([0, 1, 2, 3], 2, im, cfg)
        b = encode_ngram([3, 2, 1, 0], 2, im, cfg)
        assert not np.array_equal(a.counts, b.counts)

    def test_drop_mode_matches_shift_except_tail(self, rng):
        im = build_item_memory(3, 2048, rng)
        cfg = EncodingConfig(scheme="ngram", n=3, permute_mode="drop", drop_width=8, dim=2048)
        seq = [0, 1, 2]
        acc = encode_ngram(seq, 3, im, cfg, rng=Rng(9))
        # same gram built with matched-displacement wrap-around shifts
        gram = im.symbols[2].bits.copy()
        gram ^= permute_shift(im.symbols[1], 8).bits
        gram ^= permute_shift(im.symbols[0], 16).bits
        diff = np.count_nonzero(acc.counts != gram.astype(np.int16))
        assert diff <= 3 * 8
        assert np.array_equal(acc.counts[: 2048 - 16], gram[: 2048 - 16].astype(np.int16))

    def test_too_short_sequence(self, rng):
        im = build_item_memory(3, 128, rng)
        cfg = EncodingConfig(scheme="ngram", n=3, dim=128)
        with pytest.raises(ValueError):
            encode_ngram([0, 1], 3, im, cfg)

    def test_drop_mode_needs_rng(self, rng):
        im = build_item_memory(3, 128, rng)
        cfg = EncodingConfig(scheme="ngram", n=2, permute_mode="drop", dim=128)
        with pytest.raises(ConfigError):
            encode_ngram([0, 1], 2, im, cfg, rng=None)

    def test_cost_charges_shift_vs_drop(self, rng):
        im = build_item_memory(4, 128, rng)
        seq = [0, 1, 2, 3]
        shift_ledger = CostLedger(128)
        cfg_s = EncodingConfig(scheme="ngram", n=3, dim=128)
        encode_ngram(seq, 3, im, cfg_s, ledger=shift_ledger)
        # 2 windows: 2 binds and 2 single-pass shifts each, one add per window
        assert shift_ledger.count("multiplication") == 4
        assert shift_ledger.count("permutation") == 4
        assert shift_ledger.count("addition") == 2
        drop_ledger = CostLedger(128)
        cfg_d = EncodingConfig(scheme="ngram", n=3, permute_mode="drop", drop_width=8, dim=128)
        encode_ngram(seq, 3, im, cfg_d, rng=Rng(3), ledger=drop_ledger)
        # drop mode applies k passes for the k-step permutation: (1+2) per window
        assert drop_ledger.count("permutation") == 6
        assert drop_ledger.count("multiplication") == 4


class TestEncodingConfig:
    def test_ngram_requires_n2(self):
        with pytest.raises(ConfigError):
            EncodingConfig(scheme="ngram", n=1)

    def test_unknown_scheme(self):
        with pytest.raises(ConfigError):
            EncodingConfig(scheme="fourier")

    def test_bad_drop_width(self):
        with pytest.raises(ConfigError):
            EncodingConfig(drop_width=4)

    def test_bad_permute_mode(self):
        with pytest.raises(ConfigError):
            EncodingConfig(permute_mode="rotate")
