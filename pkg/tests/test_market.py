"""
Tests del reparto de clientes, costos por agente y balance monetario.
"""

import numpy as np
import pytest

from p2p_pricing.market import (
    BATTERY_OPERATOR,
    SERVICE_PROVIDER,
    UTILITY_GRID,
    allocate_demand,
    allocate_surplus,
    consumer_cost,
    customer_account,
    operation_cost,
    prosumer_cost,
    provider_cost,
    reward,
    route_customers,
    settle_cashflows,
    ug_cost,
)
from p2p_pricing.schemas import (
    BatteryConfig,
    PriceAction,
    ProviderConfig,
    StepAllocation,
    WeightConfig,
)

from conftest import make_customer

B_P, B_S = 0.3, 0.6


# === REPARTO ===

class TestAllocateDemand:
    def test_battery_cheaper_takes_available(self):
        assert allocate_demand(2.0, PriceAction(0.4, 0.4), 1.5, B_P) == pytest.approx((1.5, 0.5))

    def test_retail_cheaper_goes_to_provider(self):
        assert allocate_demand(2.0, PriceAction(0.2, 0.4), 1.5, B_P) == pytest.approx((0.0, 2.0))

    def test_no_demand(self):
        assert allocate_demand(0.0, PriceAction(0.4, 0.4), 1.5, B_P) == (0.0, 0.0)

    def test_tie_routes_to_provider(self):
        assert allocate_demand(1.0, PriceAction(0.3, 0.4), 1.5, B_P) == pytest.approx((0.0, 1.0))

    @pytest.mark.parametrize("net", [0.1, 0.7, 1.5, 2.2, 9.0])
    def test_conserves_energy(self, net):
        d_b, d_sp = allocate_demand(net, PriceAction(0.8, 0.2), 1.5, B_P)
        assert d_b + d_sp == pytest.approx(net, abs=1e-15)
        assert d_b >= 0 and d_sp >= 0

    def test_monotone_across_threshold(self):
        low, _ = allocate_demand(2.0, PriceAction(0.2, 0.4), 1.5, B_P)
        high, _ = allocate_demand(2.0, PriceAction(0.4, 0.4), 1.5, B_P)
        assert high >= low


class TestAllocateSurplus:
    def test_battery_pays_more(self):
        assert allocate_surplus(3.0, PriceAction(0.4, 0.4), 1.5, B_S) == pytest.approx((1.5, 1.5))

    def test_provider_pays_more(self):
        assert allocate_surplus(3.0, PriceAction(0.4, 1.0), 1.5, B_S) == pytest.approx((0.0, 3.0))

    def test_no_surplus(self):
        assert allocate_surplus(0.0, PriceAction(0.4, 0.4), 1.5, B_S) == (0.0, 0.0)

    def test_tie_routes_to_provider(self):
        assert allocate_surplus(1.0, PriceAction(0.4, 0.6), 1.5, B_S) == pytest.approx((0.0, 1.0))


class TestRouteCustomers:
    def test_contention_in_ascending_id(self):
        customers = [make_customer(1, [1.0]), make_customer(0, [1.0])]
        allocations = route_customers(customers, 0, PriceAction(0.4, 0.4), BatteryConfig(), 0.0, 1.5)
        assert allocations[0].d_b == pytest.approx(1.0)
        assert allocations[1].d_b == pytest.approx(0.5)
        assert allocations[1].d_sp == pytest.approx(0.5)

    def test_surplus_and_demand_are_exclusive(self):
        customers = [
            make_customer(0, [2.0], [5.0]),
            make_customer(1, [4.0], [1.0]),
            make_customer(2, [2.0]),
        ]
        allocations = route_customers(customers, 0, PriceAction(0.4, 0.4), BatteryConfig(), 1.5, 1.5)
        assert allocations[0].net_demand == 0.0
        assert allocations[0].surplus == pytest.approx(3.0)
        assert allocations[1].surplus == 0.0
        assert allocations[1].net_demand == pytest.approx(3.0)
        total_b = sum(a.d_b for a in allocations.values())
        assert total_b <= 1.5 + 1e-12


# === COSTOS ===

class TestCustomerCosts:
    def test_consumer_cost_mixed(self):
        assert consumer_cost(StepAllocation(d_sp=0.5, d_b=1.5), PriceAction(0.4, 0.4), B_P) == pytest.approx(0.65)

    def test_consumer_cost_zero(self):
        assert consumer_cost(StepAllocation(), PriceAction(0.4, 0.4), B_P) == 0.0

    def test_consumer_cost_retail_only(self):
        assert consumer_cost(StepAllocation(d_sp=2.0), PriceAction(0.2, 0.4), B_P) == pytest.approx(0.40)

    def test_prosumer_selling(self):
        alloc = StepAllocation(w_b=1.5, w_sp=1.5)
        assert prosumer_cost(alloc, PriceAction(0.4, 0.4), B_P, B_S) == pytest.approx(-1.5)

    def test_prosumer_zero(self):
        assert prosumer_cost(StepAllocation(), PriceAction(0.4, 0.4), B_P, B_S) == 0.0

    def test_prosumer_shortage(self):
        assert prosumer_cost(StepAllocation(d_sp=1.0), PriceAction(0.4, 0.4), B_P, B_S) == pytest.approx(0.4)


class TestProviderCosts:
    sigma = ProviderConfig(sigma=0.15)

    @pytest.mark.parametrize("demand,expected", [(10.0, 1.5), (0.0, 0.0), (3.5, 0.525)])
    def test_ug_cost(self, demand, expected):
        assert ug_cost(demand, self.sigma) == pytest.approx(expected)

    def test_provider_cost(self):
        assert provider_cost(10.0, 3.0, PriceAction(0.4, 0.2), self.sigma) == pytest.approx(-1.9)

    def test_provider_cost_empty(self):
        assert provider_cost(0.0, 0.0, PriceAction(0.4, 0.2), self.sigma) == 0.0

    def test_provider_cost_demand_only(self):
        assert provider_cost(10.0, 0.0, PriceAction(0.2, 0.2), self.sigma) == pytest.approx(-0.5)

    def test_operation_cost(self):
        rho = operation_cost(-1.9, 0.65, -1.5, WeightConfig(alpha=0.3, beta=0.3))
        assert rho == pytest.approx(-1.015)

    def test_operation_cost_provider_only(self):
        assert operation_cost(-1.9, 0.65, -1.5, WeightConfig(alpha=0.0, beta=0.0)) == pytest.approx(-1.9)

    def test_operation_cost_zero(self):
        assert operation_cost(0.0, 0.0, 0.0, WeightConfig()) == 0.0

    @pytest.mark.parametrize("k", [-2.0, 0.5, 3.0, 10.0])
    def test_operation_cost_is_linear(self, k):
        weights = WeightConfig(alpha=0.3, beta=0.3)
        base = operation_cost(-1.9, 0.65, -1.5, weights)
        scaled = operation_cost(k * -1.9, k * 0.65, k * -1.5, weights)
        assert scaled == pytest.approx(k * base, abs=1e-12)

    @pytest.mark.parametrize("alpha,beta", [(0.5, 0.5), (0.3, 0.7), (1.0, 0.0)])
    def test_provider_ignored_when_customers_take_all_weight(self, alpha, beta):
        weights = WeightConfig(alpha=alpha, beta=beta)
        costs = [operation_cost(psi, 0.65, -1.5, weights) for psi in (-1.9, 0.0, 4.2)]
        assert costs == pytest.approx([costs[0]] * 3, abs=1e-12)

    @pytest.mark.parametrize("rho,expected", [(-1.015, 1.015), (0.0, 0.0), (2.5, -2.5)])
    def test_reward_is_negated_cost(self, rho, expected):
        assert reward(rho) == pytest.approx(expected)


# === FLUJOS DE CAJA ===

class TestSettleCashflows:
    provider = ProviderConfig(sigma=0.15)

    def test_single_consumer(self):
        flows = settle_cashflows({0: StepAllocation(d_sp=2.0)}, PriceAction(0.4, 0.4), BatteryConfig(), self.provider)
        assert flows[customer_account(0)] == pytest.approx(-0.8)
        assert flows[SERVICE_PROVIDER] == pytest.approx(0.5)
        assert flows[UTILITY_GRID] == pytest.approx(0.3)
        assert flows[BATTERY_OPERATOR] == 0.0
        assert sum(flows.values()) == pytest.approx(0.0, abs=1e-12)

    def test_no_transactions(self):
        flows = settle_cashflows({0: StepAllocation()}, PriceAction(0.4, 0.4), BatteryConfig(), self.provider)
        assert all(v == 0.0 for v in flows.values())

    def test_single_prosumer_charging(self):
        flows = settle_cashflows({0: StepAllocation(w_b=1.5)}, PriceAction(0.4, 0.4), BatteryConfig(), self.provider)
        assert flows[customer_account(0)] == pytest.approx(0.9)
        assert flows[BATTERY_OPERATOR] == pytest.approx(-0.9)
        assert sum(flows.values()) == pytest.approx(0.0, abs=1e-12)

    def test_random_allocations_conserve_money(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            allocations = {
                i: StepAllocation(*rng.uniform(0, 3, size=4)) for i in range(6)
            }
            action = PriceAction(*rng.choice([0.2, 0.4, 0.6, 0.8, 1.0], size=2))
            flows = settle_cashflows(allocations, action, BatteryConfig(), self.provider)
            assert abs(sum(flows.values())) <= 1e-9
