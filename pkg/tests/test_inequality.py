import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from devineq.errors import AllZeroIncomes, InconsistentTotals, NoSectors
from devineq.inequality import (
    Group,
    GroupedDistribution,
    SectorWageTable,
    between_sector_theil,
    capital_share_series,
    decompose,
    gini,
    theil,
    theil_share_form,
)
from devineq.ingest import CountryYearRecord

# direct-evaluation oracle for incomes (1, 3):
#   mu = 2, T = (1/2) * [(1/2) ln(1/2) + (3/2) ln(3/2)]
THEIL_1_3 = 0.5 * (0.5 * math.log(0.5) + 1.5 * math.log(1.5))

positive_incomes = st.lists(
    st.floats(min_value=0.01, max_value=1e6, allow_nan=False), min_size=1, max_size=200
)


class TestTheil:
    def test_equality_is_exactly_zero(self):
        assert theil([3.7, 3.7, 3.7, 3.7]) == 0.0

    def test_single_owner_reaches_log_n(self):
        value = theil([10.0, 0.0, 0.0, 0.0])
        assert abs(value - math.log(4)) <= 1e-12 * math.log(4)

    def test_direct_evaluation_oracle(self):
        assert abs(theil([1.0, 3.0]) - THEIL_1_3) < 1e-15
        assert abs(THEIL_1_3 - 0.130812035941137) < 1e-12

    def test_all_zero_rejected(self):
        with pytest.raises(AllZeroIncomes):
            theil([0.0, 0.0])

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            theil([1.0, -2.0])

    @given(positive_incomes)
    def test_bounds(self, incomes):
        value = theil(incomes)
        assert -1e-12 <= value <= math.log(len(incomes)) + 1e-12

    @given(positive_incomes)
    def test_share_form_is_identical(self, incomes):
        a, b = theil(incomes), theil_share_form(incomes)
        assert abs(a - b) <= 1e-12 * max(abs(a), 1.0)

    @given(positive_incomes, st.floats(min_value=1e-3, max_value=1e3))
    def test_scale_invariance(self, incomes, c):
        base = theil(incomes)
        scaled = theil([c * y for y in incomes])
        assert abs(base - scaled) <= 1e-12 * max(abs(base), 1.0)

    @given(positive_incomes, st.integers(min_value=2, max_value=5))
    def test_replication_invariance(self, incomes, k):
        base = theil(incomes)
        replicated = theil(incomes * k)
        assert abs(base - replicated) <= 1e-12 * max(abs(base), 1.0)


class TestDecomposition:
    def test_identical_groups_no_inequality(self):
        grouped = GroupedDistribution.from_member_incomes([[2.0, 2.0], [2.0, 2.0]])
        result = decompose(grouped)
        assert result.between == 0.0 and result.within == 0.0 and result.total == 0.0

    def test_single_group_is_all_within(self):
        incomes = [1.0, 2.0, 5.0]
        result = decompose(GroupedDistribution.from_member_incomes([incomes]))
        assert result.between == 0.0
        assert abs(result.within - theil(incomes)) < 1e-15
        assert abs(result.total - theil(incomes)) < 1e-15

    def test_two_homogeneous_groups_all_between(self):
        result = decompose(GroupedDistribution.from_member_incomes([[1.0, 1.0], [3.0, 3.0]]))
        flat = theil([1.0, 1.0, 3.0, 3.0])
        assert result.within == 0.0
        assert abs(result.between - flat) < 1e-15
        assert abs(flat - THEIL_1_3) < 1e-15  # replication of (1, 3)

    @settings(max_examples=60)
    @given(
        st.lists(
            st.lists(st.floats(min_value=0.01, max_value=1e4), min_size=1, max_size=30),
            min_size=1,
            max_size=10,
        )
    )
    def test_identity_total_equals_between_plus_within(self, groups):
        grouped = GroupedDistribution.from_member_incomes(groups)
        result = decompose(grouped)
        direct = theil(np.concatenate([np.asarray(g) for g in groups]))
        assert abs(result.between + result.within - direct) <= 1e-12 * max(direct, 1.0)
        assert result.between >= -1e-12 and result.within >= -1e-12

    def test_summary_only_groups_report_between_only(self):
        grouped = GroupedDistribution(
            groups=(Group(count=2, total=10.0), Group(count=3, total=5.0))
        )
        result = decompose(grouped)
        assert result.within is None and result.per_group is None and result.total is None
        assert result.between > 0

    def test_inconsistent_totals_detected(self):
        with pytest.raises(InconsistentTotals):
            GroupedDistribution(
                groups=(Group(count=2, total=99.0, incomes=np.array([1.0, 2.0])),)
            )


class TestBetweenSectorTheil:
    def test_single_sector_is_zero(self):
        table = SectorWageTable(sectors=("a",), employment=[10.0], avg_wage=[5.0])
        assert between_sector_theil(table) == 0.0

    def test_direct_evaluation_oracle(self):
        table = SectorWageTable(
            sectors=("a", "b"), employment=[10.0, 10.0], avg_wage=[1.0, 3.0]
        )
        assert abs(between_sector_theil(table) - THEIL_1_3) < 1e-15

    def test_raising_low_wage_decreases_dispersion(self):
        values = []
        for low in (1.0, 1.4, 1.8):
            table = SectorWageTable(
                sectors=("lo", "hi"), employment=[10.0, 10.0], avg_wage=[low, 3.0]
            )
            values.append(between_sector_theil(table))
        assert values[0] > values[1] > values[2] >= 0

    def test_zero_employment_sectors_excluded(self):
        table = SectorWageTable(
            sectors=("a", "b", "c"), employment=[10.0, 0.0, 10.0], avg_wage=[1.0, 99.0, 3.0]
        )
        assert table.sectors == ("a", "c")
        assert abs(between_sector_theil(table) - THEIL_1_3) < 1e-15

    def test_no_sectors(self):
        with pytest.raises(NoSectors):
            SectorWageTable(sectors=("a",), employment=[0.0], avg_wage=[1.0])

    def test_merging_equal_wage_sectors_is_neutral(self):
        split = SectorWageTable(
            sectors=("a", "b", "c"), employment=[5.0, 5.0, 10.0], avg_wage=[1.0, 1.0, 3.0]
        )
        merged = SectorWageTable(
            sectors=("ab", "c"), employment=[10.0, 10.0], avg_wage=[1.0, 3.0]
        )
        assert abs(between_sector_theil(split) - between_sector_theil(merged)) < 1e-14

    @given(
        st.lists(st.floats(min_value=1.0, max_value=1e4), min_size=1, max_size=40),
        st.floats(min_value=1e-2, max_value=1e2),
    )
    def test_scale_invariance(self, wages, c):
        employment = [7.0] * len(wages)
        base = between_sector_theil(
            SectorWageTable(sectors=tuple(map(str, range(len(wages)))),
                            employment=employment, avg_wage=wages)
        )
        scaled = between_sector_theil(
            SectorWageTable(sectors=tuple(map(str, range(len(wages)))),
                            employment=employment, avg_wage=[c * w for w in wages])
        )
        assert abs(base - scaled) <= 1e-12 * max(base, 1.0)
        assert base >= -1e-15


class TestGini:
    def test_equality_zero(self):
        assert gini([4.0, 4.0, 4.0]) == 0.0

    def test_two_point_oracle(self):
        assert abs(gini([0.0, 1.0]) - 0.5) < 1e-15

    def test_double_sum_oracle(self):
        rng = np.random.default_rng(2)
        y = rng.lognormal(size=37)
        n, mu = y.size, y.mean()
        double_sum = sum(abs(a - b) for a in y for b in y) / (2 * n * n * mu)
        assert abs(gini(y) - double_sum) < 1e-12

    @given(positive_incomes)
    def test_bounds(self, incomes):
        value = gini(incomes)
        assert -1e-12 <= value < 1.0

    @given(positive_incomes, st.floats(min_value=1e-3, max_value=1e3))
    def test_scale_invariance(self, incomes, c):
        assert abs(gini(incomes) - gini([c * y for y in incomes])) <= 1e-12

    @given(positive_incomes, st.integers(min_value=2, max_value=4))
    def test_replication_invariance(self, incomes, k):
        assert abs(gini(incomes) - gini(incomes * k)) <= 1e-9

    def test_outlier_sample_reports_both_measures(self):
        rng = np.random.default_rng(0)
        sample = rng.lognormal(size=1000)
        spiked = np.append(sample, sample.sum() * 3)
        for measure in (theil, gini):
            assert np.isfinite(measure(sample)) and np.isfinite(measure(spiked))


class TestCapitalShare:
    def _record(self, labor):
        return CountryYearRecord(
            country_id="usa", year=2000, gdp_pc=30000.0, population=2.8e8,
            labor_share=labor, capital_share=1.0 - labor,
        )

    def test_complement(self):
        rows = capital_share_series([self._record(0.65)])
        assert rows == [("usa", 2000, 0.35)]

    def test_full_labor_share(self):
        assert capital_share_series([self._record(1.0)])[0][2] == 0.0

    def test_developed_band_representable(self):
        rows = capital_share_series([self._record(0.68), self._record(0.655)])
        assert all(0.30 <= share <= 0.35 for _, _, share in rows)
