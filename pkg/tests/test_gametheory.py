import math
import random

import pytest

from bgnd.evaluate import exact_social_cost
from bgnd.gametheory import (
    _g,
    game_constants,
    gamma_root,
    potential_expected,
    potential_realized,
    round_budget,
    smoothness_params,
    verify_smoothness_inequality,
)
from bgnd.model import Agent, Explicit, InfeasibleError, Instance, Resource

from .conftest import explicit_instance, quad, random_strategy
from .oracles import enum_individual_cost, enum_potential

PHI = (1 + math.sqrt(5)) / 2


def single_edge_instance(n_agents, p=1.0):
    res = (Resource("e", quad()), Resource("z", quad()))
    types = (Explicit(({"e"},)), Explicit(({"z"},)))
    agents = tuple(Agent(types, (p, 1 - p)) for _ in range(n_agents))
    return Instance(res, agents)


class TestGamma:
    def test_golden_ratio(self):
        assert gamma_root(2.0) == pytest.approx(PHI, abs=1e-9)

    @pytest.mark.parametrize("a", [1.05, 1.2, 1.5, 1.9, 1.99])
    def test_below_two(self, a):
        assert gamma_root(a) < 2

    @pytest.mark.parametrize("a", [2.0, 2.3, 2.7, 2.99])
    def test_below_three(self, a):
        assert gamma_root(a) < 3

    @pytest.mark.parametrize("a", [1.1, 1.5, 2.0, 3.0, 4.0, 6.0])
    def test_residual_and_uniqueness(self, a):
        g = gamma_root(a)
        assert abs((g + 1) ** (a - 1) - g**a) <= 1e-10
        # sign of (x+1)^(a-1) - x^a changes exactly once on a fine grid
        xs = [k / 100 for k in range(1, 2000)]
        signs = [(x + 1) ** (a - 1) - x**a > 0 for x in xs]
        assert sum(s != t for s, t in zip(signs, signs[1:])) == 1

    def test_domain(self):
        with pytest.raises(ValueError):
            gamma_root(1.0)


class TestSmoothness:
    def test_quadratic_values(self):
        sm = smoothness_params(2.0)
        assert sm.gamma == pytest.approx(PHI)
        assert sm.mu == pytest.approx(1 / (2 * PHI), abs=1e-9)
        assert sm.mu == pytest.approx(0.3090, abs=1e-4)
        assert sm.lam == pytest.approx(1.809, abs=1e-3)
        assert sm.lam == pytest.approx((PHI + 1) - sm.mu * PHI**2)
        assert sm.lam / (1 - sm.mu) == pytest.approx(2.618, abs=1e-3)

    def test_ratio_matches_grid_maximum(self):
        sm = smoothness_params(2.0)
        best = max(_g(k / 1000, sm.mu, 2.0) for k in range(1, 20000))
        assert best == pytest.approx(sm.lam, abs=1e-6)

    @pytest.mark.parametrize("a", [1.1, 1.5, 2.0, 2.5, 3.0, 4.0])
    @pytest.mark.parametrize("rho", [1.0, 2.0])
    @pytest.mark.parametrize("eta", [1.0, 2.0])
    def test_g_maximized_at_x0(self, a, rho, eta):
        sm = smoothness_params(a, rho, eta, 1.0)
        x0 = sm.scale * sm.gamma
        # golden-section search for the maximum of g on (0, 50 * x0)
        lo, hi = 1e-9, 50 * x0
        inv = (math.sqrt(5) - 1) / 2
        for _ in range(200):
            c, d = hi - inv * (hi - lo), lo + inv * (hi - lo)
            if _g(c, sm.mu, a) > _g(d, sm.mu, a):
                hi = d
            else:
                lo = c
        assert 0.5 * (lo + hi) == pytest.approx(x0, rel=1e-6)
        assert _g(0.5 * (lo + hi), sm.mu, a) == pytest.approx(sm.lam, rel=1e-9)

    @pytest.mark.parametrize("a", [1.1, 1.5, 2.0, 2.5, 3.0, 4.0])
    @pytest.mark.parametrize("rho", [1.0, 2.0])
    @pytest.mark.parametrize("eta", [1.0, 2.0])
    def test_mu_condition(self, a, rho, eta):
        sm = smoothness_params(a, rho, eta, 1.0)
        assert sm.scale * sm.mu < 1 - 1 / a

    @pytest.mark.parametrize("a", [1.1, 1.5, 2.0, 2.5, 3.0, 4.0])
    def test_grid(self, a):
        sm = smoothness_params(a)
        alphas = [x for x in (1.0, 1.1, 1.5, 2.0, 2.5, 3.0, 4.0) if x <= a]
        assert verify_smoothness_inequality(sm.lam, sm.mu, alphas)

    def test_boundary_cases(self):
        sm = smoothness_params(2.5)
        assert sm.lam >= 1  # x = 0, y = 1
        assert sm.mu > 0  # y = 0

    def test_grid_rejects_bad_pair(self):
        assert not verify_smoothness_inequality(0.5, 0.1, [2.0])

    def test_domain(self):
        with pytest.raises(ValueError):
            smoothness_params(2.0, rho=0.5)


class TestPotential:
    def test_zero(self):
        inst = single_edge_instance(1)
        assert potential_expected(inst, ((frozenset(), frozenset()),)) == 0.0

    def test_load_two(self):
        inst = single_edge_instance(2)
        a = (frozenset("e"), frozenset("e"))
        assert potential_realized(inst, (0, 0), a) == pytest.approx(3.0)

    def test_load_three_k_bound(self):
        inst = single_edge_instance(3)
        a = (frozenset("e"),) * 3
        phi = potential_realized(inst, (0, 0, 0), a)
        assert phi == pytest.approx(6.0)
        assert phi <= 9 <= 2 * phi

    def test_infeasible(self):
        inst = single_edge_instance(1)
        with pytest.raises(InfeasibleError):
            potential_realized(inst, (0,), (frozenset("z"),))

    def test_half_probability(self):
        inst = single_edge_instance(1, p=0.5)
        s = ((frozenset("e"), frozenset("z")),)
        # one use of e with prob .5 and one use of z with prob .5
        assert potential_expected(inst, s) == pytest.approx(1.0)
        res = (Resource("e", quad()),)
        inst = Instance(res, (Agent((Explicit(({"e"},)), Explicit(({"e"},))), (0.5, 0.5)),))
        assert potential_expected(inst, ((frozenset("e"), frozenset("e")),)) == pytest.approx(1.0)

    def test_point_mass_equals_realized(self):
        inst = single_edge_instance(3, p=1.0)
        s = ((frozenset("e"), frozenset("z")),) * 3
        assert potential_expected(inst, s) == pytest.approx(potential_realized(inst, (0, 0, 0), (frozenset("e"),) * 3))

    @pytest.mark.parametrize("seed", range(20))
    def test_matches_enumeration(self, seed):
        rng = random.Random(seed)
        inst = explicit_instance(rng.randint(1, 4), 3, 4, rng, alphas=(rng.choice([1.5, 2.0, 3.0]),))
        s = random_strategy(inst, rng)
        assert potential_expected(inst, s) == pytest.approx(enum_potential(inst, s), abs=1e-9)

    @pytest.mark.parametrize("seed", range(20))
    def test_identity_and_k_bound(self, seed):
        rng = random.Random(1000 + seed)
        alpha = rng.choice([1.5, 2.0, 2.5, 3.0])
        inst = explicit_instance(rng.randint(1, 4), 3, 5, rng, alphas=(alpha, 1.0))
        s = random_strategy(inst, rng)
        i = rng.randrange(inst.n_agents)
        dev = random_strategy(inst, rng)
        s2 = s[:i] + (dev[i],) + s[i + 1:]
        d_phi = enum_potential(inst, s) - enum_potential(inst, s2)
        d_c = enum_individual_cost(inst, i, s) - enum_individual_cost(inst, i, s2)
        assert abs(d_phi - d_c) <= 1e-9
        phi, c = potential_expected(inst, s), exact_social_cost(inst, s)
        assert phi <= c + 1e-9 and c <= math.ceil(inst.alpha_max) * phi + 1e-9


class TestConstants:
    def test_quadratic_bound(self):
        inst = single_edge_instance(2)
        gc = game_constants(inst)
        assert gc.K == 2
        assert gc.bound == pytest.approx(10.47, abs=0.01)
        assert gc.Q == pytest.approx(2 * 2 / (1 - gc.smoothness.mu))
        assert gc.R == math.ceil(gc.Q * math.log(2 * 2))

    def test_budget_floor(self):
        assert round_budget(0.1, 2, 1, 2.0) == 1

    def test_as_dict_keys(self):
        d = game_constants(single_edge_instance(1), rho=2.0).as_dict()
        assert set(d) >= {"rho", "eta_low", "eta_high", "lambda", "mu", "K", "Q", "R", "bound"}
        assert d["rho"] == 2.0
