import pytest
from hypothesis import given
from hypothesis import strategies as st

from hdcam.cost import OP_KINDS, CostLedger, CostTable, OpCost, ratios_vs_cmos, report, tally
from hdcam.errors import ConfigError


class TestDefaults:
    def test_reference_constants(self):
        t = CostTable()
        assert t.ops["addition"] == OpCost(0.462, 41.08, 385, 61.9, 883.9)
        assert t.ops["permutation"] == OpCost(15.36, 0.752, 193, 4.66, 415.66)
        assert t.ops["multiplication"] == OpCost(1.548, 569.0, 385, 3.235, 828.47)
        assert t.ops["search"] == OpCost(0.985, 14.65, 1922, 29.65, 4139.7)
        assert t.mem_read_energy_nj == 0.411
        assert t.cmos_cycle_ns == 0.5
        assert t.reference_dim == 2048

    def test_missing_op_rejected(self):
        with pytest.raises(ConfigError):
            CostTable(ops={"addition": OpCost(1, 1, 1, 1, 1)})

    def test_nonpositive_constant_rejected(self):
        with pytest.raises(ValueError):
            OpCost(0.0, 1, 1, 1, 1)


class TestRatios:
    def test_net_energy_ratios(self):
        r = ratios_vs_cmos()
        assert r["addition"]["net_energy_ratio"] == pytest.approx(883.9 / 41.08)
        assert r["addition"]["net_energy_ratio"] == pytest.approx(21.5, rel=0.005)
        assert r["permutation"]["net_energy_ratio"] == pytest.approx(552.74, rel=0.005)
        assert r["multiplication"]["net_energy_ratio"] == pytest.approx(1.45, rel=0.005)
        assert r["search"]["net_energy_ratio"] == pytest.approx(282.57, rel=0.005)

    def test_direct_energy_ratios(self):
        r = ratios_vs_cmos()
        assert r["addition"]["energy_ratio"] == pytest.approx(1.51, rel=0.01)
        assert r["permutation"]["energy_ratio"] == pytest.approx(6.19, rel=0.01)
        assert r["search"]["energy_ratio"] == pytest.approx(2.02, rel=0.01)


class TestTally:
    def test_one_addition_at_reference_dim(self):
        ledger = tally(CostLedger(2048), "addition", 1, dim=2048)
        assert ledger.hydra_energy_pj == pytest.approx(41.08)

    def test_half_width_half_energy(self):
        ledger = tally(CostLedger(1024), "addition", 1)
        assert ledger.hydra_energy_pj == pytest.approx(20.54)

    def test_latency_does_not_scale_with_width(self):
        ledger = tally(CostLedger(1024), "addition", 1)
        assert ledger.hydra_latency_ns == pytest.approx(0.462)

    def test_zero_count_is_identity(self):
        base = CostLedger(2048)
        out = tally(base, "search", 0)
        assert out.counts == base.counts

    def test_original_ledger_untouched(self):
        base = CostLedger(2048)
        tally(base, "search", 3)
        assert base.count("search") == 0

    def test_unknown_op(self):
        with pytest.raises(ConfigError):
            tally(CostLedger(2048), "division", 1)

    def test_dim_mismatch(self):
        with pytest.raises(ConfigError):
            tally(CostLedger(2048), "search", 1, dim=1024)

    def test_unaligned_dim(self):
        with pytest.raises(Exception):
            CostLedger(1000)


class TestScalingInvariant:
    def test_exact_power_of_two_scaling(self):
        counts = {"addition": 13, "permutation": 7, "multiplication": 5, "search": 11}
        big = CostLedger(2048, counts=dict(counts))
        for dim, factor in ((1024, 0.5), (512, 0.25)):
            small = CostLedger(dim, counts=dict(counts))
            assert small.hydra_energy_pj == big.hydra_energy_pj * factor
            assert small.hydra_latency_ns == big.hydra_latency_ns
            assert small.cmos_energy_pj == big.cmos_energy_pj


class TestMerge:
    @given(
        a=st.dictionaries(st.sampled_from(OP_KINDS), st.integers(0, 50)),
        b=st.dictionaries(st.sampled_from(OP_KINDS), st.integers(0, 50)),
        c=st.dictionaries(st.sampled_from(OP_KINDS), st.integers(0, 50)),
    )
    def test_associative_commutative(self, a, b, c):
        la, lb, lc = (CostLedger(2048, counts=dict(d)) for d in (a, b, c))
        assert la.merge(lb).counts == lb.merge(la).counts
        assert la.merge(lb).merge(lc).counts == la.merge(lb.merge(lc)).counts

    def test_dim_mismatch(self):
        with pytest.raises(ConfigError):
            CostLedger(2048).merge(CostLedger(1024))


class TestReport:
    def test_empty_ledger_all_zero(self):
        rep = report(CostLedger(2048))
        assert rep.hydra_energy_pj == 0
        assert rep.cmos_net_energy_pj == 0
        assert rep.hydra_queries_per_s == 0

    def test_one_of_each_sums(self):
        ledger = CostLedger(2048)
        for op in OP_KINDS:
            ledger.charge(op)
        rep = report(ledger)
        assert rep.hydra_energy_pj == pytest.approx(41.08 + 0.752 + 569 + 14.65)

    def test_queries_per_second(self):
        ledger = CostLedger(2048)
        ledger.charge("search", 10)
        rep = report(ledger)
        assert rep.hydra_queries_per_s == pytest.approx(10 / (10 * 0.985e-9))

    def test_text_rendering(self):
        ledger = CostLedger(2048)
        ledger.charge("addition", 2)
        text = report(ledger).to_text()
        assert "addition" in text and "pJ" in text

    def test_as_dict_has_counts(self):
        ledger = CostLedger(2048)
        ledger.charge("permutation", 4)
        d = report(ledger).as_dict()
        assert d["count_permutation"] == 4
