import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nemx.devices import DeviceSet, DeviceUtility
from nemx.errors import InvalidParameterError
from nemx.scheduler import optimal_schedule
from nemx.tariff import CustomerTariffs, TariffParams, TouTariff
from nemx.welfare import (
    CostModel,
    Scenario,
    ScenarioSet,
    customer_surplus,
    env_benefit,
    social_welfare,
    utility_surplus,
)

from oracles import grid_surplus_single


def scen(r=2.0, price=0.05, hour=0, weight=1.0):
    return Scenario(0, r, price, hour, weight)


class TestScenarioSet:
    def test_equal_weights(self):
        s = ScenarioSet.equal_weights([(0.0, 0.04, h) for h in range(24)])
        assert len(s) == 24
        assert all(x.weight == pytest.approx(1 / 24) for x in s)

    def test_bad_weights(self):
        with pytest.raises(InvalidParameterError):
            ScenarioSet([Scenario(0, 1.0, 0.04, 0, 0.4), Scenario(1, 1.0, 0.04, 1, 0.4)])

    @pytest.mark.parametrize("kw", [dict(r=-1.0), dict(hour=24), dict(weight=0.0), dict(price=float("nan"))])
    def test_bad_scenario(self, kw):
        with pytest.raises(InvalidParameterError):
            scen(**kw)

    def test_empty(self):
        with pytest.raises(InvalidParameterError):
            ScenarioSet([])


class TestCustomerSurplus:
    def test_gamma_zero_is_consumer(self, one_device, tariff_42):
        expected = optimal_schedule(one_device, tariff_42, 0.0).surplus
        assert customer_surplus(one_device, tariff_42, scen(), 0.0) == expected

    def test_gamma_one_is_prosumer(self, one_device, tariff_42):
        expected = optimal_schedule(one_device, tariff_42, 2.0).surplus
        assert customer_surplus(one_device, tariff_42, scen(), 1.0) == expected

    def test_half_against_grid_oracle(self, one_device, tariff_42):
        dev = one_device[0]
        expected = 0.5 * grid_surplus_single(dev, tariff_42, 2.0)[0] + 0.5 * grid_surplus_single(dev, tariff_42, 0.0)[0]
        assert customer_surplus(one_device, tariff_42, scen(), 0.5) == pytest.approx(expected, abs=1e-6)
        assert expected == pytest.approx(0.5 * 1.04 + 0.5 * 0.36, abs=1e-6)

    def test_gamma_range(self, one_device, tariff_42):
        with pytest.raises(InvalidParameterError):
            customer_surplus(one_device, tariff_42, scen(), 1.5)


class TestUtilitySurplus:
    def test_wholesale_retail_breaks_even(self, one_device):
        p = TariffParams(0.05, 0.02, 0.0)
        assert utility_surplus(one_device, p, CostModel(0.0), scen(price=0.05), 0.0) == pytest.approx(0.0, abs=1e-15)

    def test_fixed_charge_covers_fixed_cost(self, one_device):
        p = TariffParams(0.05, 0.02, 0.12)
        assert utility_surplus(one_device, p, CostModel(0.12), scen(price=0.05), 0.0) == pytest.approx(0.0, abs=1e-15)

    def test_hand_value(self, one_device, tariff_42):
        # prosumer net -0.4 pays -0.08; consumer net 1.2 pays 0.48
        got = utility_surplus(one_device, tariff_42, CostModel(0.1), scen(price=0.05), 0.5)
        y = 0.5 * -0.4 + 0.5 * 1.2
        assert got == pytest.approx(0.5 * -0.08 + 0.5 * 0.48 - (0.05 * y + 0.1), abs=1e-12)


class TestEnvBenefit:
    def test_examples(self):
        assert env_benefit(CostModel(env_price=0.035), scen(r=2.0)) == pytest.approx(0.07)
        assert env_benefit(CostModel(env_price=0.035), scen(r=0.0)) == 0.0
        assert env_benefit(CostModel(env_price=0.0), scen(r=5.0)) == 0.0


class TestSocialWelfare:
    def test_single_scenario_gamma_zero(self, one_device, tariff_42):
        cost = CostModel(0.1, env_price=0.035)
        s = ScenarioSet([scen()])
        wb = social_welfare(one_device, tariff_42, cost, s, 0.0)
        assert wb.env_benefit == 0.0
        expected = optimal_schedule(one_device, tariff_42, 0.0).surplus + utility_surplus(one_device, tariff_42, cost, s[0], 0.0)
        assert wb.welfare == pytest.approx(expected, abs=1e-12)

    def test_two_scenarios_average(self, one_device, tariff_42):
        cost = CostModel(0.1, env_price=0.035)
        a, b = Scenario(0, 0.5, 0.04, 0, 0.5), Scenario(1, 1.8, 0.06, 1, 0.5)
        both = social_welfare(one_device, tariff_42, cost, ScenarioSet([a, b]), 0.3).welfare
        single = [
            social_welfare(one_device, tariff_42, cost, ScenarioSet([Scenario(0, x.r, x.wholesale_price, x.hour, 1.0)]), 0.3).welfare
            for x in (a, b)
        ]
        assert both == pytest.approx(sum(single) / 2, abs=1e-12)

    def test_three_scenarios_hand_sum(self, one_device, tariff_42):
        dev = one_device[0]
        cost = CostModel(0.05, smc_adder=0.03, env_price=0.035)
        rows = [(0.4, 0.03), (1.4, 0.05), (2.5, 0.08)]
        s = ScenarioSet.equal_weights([(r, p, 0) for r, p in rows])
        gamma = 0.25
        wb = social_welfare(one_device, tariff_42, cost, s, gamma)
        s_c, d_c = grid_surplus_single(dev, tariff_42, 0.0)
        total = 0.0
        for r, price in rows:
            s_p, d_p = grid_surplus_single(dev, tariff_42, r)
            rate = tariff_42.retail_rate if d_p >= r else tariff_42.sell_rate
            pay_p, pay_c = rate * (d_p - r), tariff_42.retail_rate * d_c
            cs = gamma * s_p + (1 - gamma) * s_c
            y = gamma * (d_p - r) + (1 - gamma) * d_c
            us = gamma * pay_p + (1 - gamma) * pay_c - price * y - 0.05
            total += (cs + us + gamma * 0.035 * r) / 3
        assert wb.welfare == pytest.approx(total, abs=2e-4)

    @settings(max_examples=60, deadline=None)
    @given(
        st.floats(0.05, 0.6), st.floats(0.0, 1.0), st.floats(0.0, 1.0),
        st.lists(st.tuples(st.floats(0.0, 4.0), st.floats(0.0, 0.2), st.integers(0, 23)), min_size=1, max_size=6),
    )
    def test_vectorized_matches_scalar(self, retail, frac, gamma, rows):
        devices = DeviceSet([DeviceUtility(1.0, 0.5, 2.0), DeviceUtility(0.3, 0.2, 1.5)])
        tou = TouTariff.peak_window(TariffParams(retail, frac * retail, 0.01),
                                    TariffParams(1.5 * retail, frac * retail, 0.01), 16, 21)
        tariff = CustomerTariffs(tou, TouTariff.flat(TariffParams(retail, frac * retail, 0.0)))
        cost = CostModel(0.02, env_price=0.035)
        scens = ScenarioSet.equal_weights(rows)
        wb = social_welfare(devices, tariff, cost, scens, gamma)
        cs = math.fsum(x.weight * customer_surplus(devices, tariff, x, gamma) for x in scens)
        us = math.fsum(x.weight * utility_surplus(devices, tariff, cost, x, gamma) for x in scens)
        env = math.fsum(x.weight * gamma * env_benefit(cost, x) for x in scens)
        assert wb.customer_surplus == pytest.approx(cs, abs=1e-9)
        assert wb.utility_surplus == pytest.approx(us, abs=1e-9)
        assert wb.env_benefit == pytest.approx(env, abs=1e-12)
        assert wb.welfare == pytest.approx(wb.customer_surplus + wb.utility_surplus + wb.env_benefit, abs=1e-12)

    def test_details_bill_saving(self, one_device, tariff_42):
        wb = social_welfare(one_device, tariff_42, CostModel(), ScenarioSet([scen(r=2.0)]), 0.5)
        d = wb.details[0]
        assert d.bill_saving == pytest.approx(0.48 - (-0.08))

    def test_without_details(self, one_device, tariff_42):
        wb = social_welfare(one_device, tariff_42, CostModel(), ScenarioSet([scen()]), 0.5, with_details=False)
        assert wb.details == ()
