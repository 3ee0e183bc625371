#include <doctest.h>

#include <cmath>

#include "test_helpers.h"
#include <map>

#include "ted/error.h"
#include "ted/oracle.h"

using namespace ted;
using namespace ted::testing;

namespace {

// zero lead, Bernoulli(1/2) demand on {0,1}, h=1
Instance bernoulli_instance(double p) {
	Parameterization param;
	param.p = p;
	param.demand.cycle_length = 1;
	param.demand.mu = {0.5};
	param.demand.sigma = {0.5};
	param.demand.pmfs = {Pmf{{0.5, 0.5}}};
	param.leadtime = deterministic_leadtime(0, 1);
	SpaceBounds b;
	b.p_min = 1.0;
	b.p_max = std::max(p, 2.0);
	b.mu_min = 0.25;
	b.mu_max = 1.0;
	b.k_max = 1;
	b.l_max = 1;
	return Instance(param, compute_limits(b));
}

}  // namespace

TEST_CASE("exact expansion has stochastic rows and the right corner cost") {
	const Instance inst = bernoulli_instance(9.0);
	const TruncatedInstance trunc = enumerate_transitions(inst);
	const int64_t n_actions = trunc.domain.n_actions;
	for (int64_t s = 0; s < trunc.domain.n_states(); s++) {
		for (int64_t a = 0; a < n_actions; a++) {
			const auto& row = trunc.transitions[s * n_actions + a];
			CHECK(row.size() <= 2);  // two demand outcomes, zero lead
			double total = 0.0;
			for (const auto& [nxt, pr] : row) total += pr;
			CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
		}
	}
	// empty shelf, no order: every unit of demand is lost
	const int64_t corner = trunc.domain.index(0, 0, 0) * n_actions + 0;
	CHECK(trunc.expected_cost[corner] == doctest::Approx(9.0 * 0.5));
}

TEST_CASE("bernoulli newsvendor solves to order-up-to-one at half cost") {
	const Instance inst = bernoulli_instance(9.0);
	const TruncatedInstance trunc = enumerate_transitions(inst);
	const DpResult dp = dp_average_cost(trunc);
	CHECK(dp.gain == doctest::Approx(0.5).epsilon(1e-7));
	// greedy policy orders up to one unit
	for (int64_t s = 0; s < trunc.domain.n_states(); s++) {
		int64_t oh, x, phase;
		trunc.domain.decode(s, oh, x, phase);
		CHECK(dp.policy[s] == std::max<int64_t>(0, 1 - oh));
	}
}

TEST_CASE("deterministic demand with instant supply is free") {
	const Instance inst = make_instance(9.0, {3.0}, {0.0}, 0);
	const DpResult dp = dp_average_cost(enumerate_transitions(inst));
	CHECK(dp.gain == doctest::Approx(0.0).epsilon(1e-7));
}

namespace {

// Cesaro average cost from the empty start state; well-defined for every
// stationary policy, including multichain ones the value iteration rejects
double start_state_average(const TruncatedInstance& trunc,
                           const std::vector<int64_t>& policy, int64_t horizon) {
	const auto& dom = trunc.domain;
	std::vector<double> dist(dom.n_states(), 0.0), next(dom.n_states(), 0.0);
	dist[dom.index(0, 0, 0)] = 1.0;
	double tail_cost = 0.0;
	const int64_t tail_start = horizon / 2;
	for (int64_t t = 0; t < horizon; t++) {
		std::fill(next.begin(), next.end(), 0.0);
		double period_cost = 0.0;
		for (int64_t s = 0; s < dom.n_states(); s++) {
			if (dist[s] == 0.0) continue;
			const int64_t row = s * dom.n_actions + policy[s];
			period_cost += dist[s] * trunc.expected_cost[row];
			for (const auto& [nxt, pr] : trunc.transitions[row])
				next[nxt] += dist[s] * pr;
		}
		dist.swap(next);
		if (t >= tail_start) tail_cost += period_cost;
	}
	return tail_cost / static_cast<double>(horizon - tail_start);
}

}  // namespace

TEST_CASE("the gain matches exhaustive policy enumeration on a tiny chain") {
	// symmetric penalty: p = h = 1 on Bernoulli demand; the newsvendor
	// bound alone would allow only the zero order, so widen the action set
	const Instance inst = bernoulli_instance(1.0);
	TruncatedDomain dom = default_domain(inst);
	dom.oh_cap = 4;  // 5 states, 2 actions: 32 stationary policies
	dom.n_actions = 2;
	const TruncatedInstance trunc = enumerate_transitions(inst, dom);
	const DpResult dp = dp_average_cost(trunc);

	double best = std::numeric_limits<double>::infinity();
	const int64_t n = dom.n_states();
	for (int64_t mask = 0; mask < (1 << n); mask++) {
		std::vector<int64_t> policy(n);
		for (int64_t s = 0; s < n; s++) policy[s] = (mask >> s) & 1;
		best = std::min(best, start_state_average(trunc, policy, 20000));
	}
	CHECK(dp.gain == doctest::Approx(best).epsilon(1e-4));
	// and the greedy policy itself evaluates to the optimal gain
	CHECK(policy_average_cost(trunc, dp.policy) == doctest::Approx(dp.gain).epsilon(1e-7));
}

TEST_CASE("the gain is independent of the anchor state") {
	const Instance inst = make_instance(7.0, {2.0, 3.0}, {1.0, 1.5}, 1);
	const TruncatedInstance trunc = enumerate_transitions(inst);
	const DpResult a = dp_average_cost(trunc, 1e-9, 1000000, 0);
	const DpResult b =
	    dp_average_cost(trunc, 1e-9, 1000000, trunc.domain.n_states() / 2);
	CHECK(a.gain == doctest::Approx(b.gain).epsilon(1e-8));
}

TEST_CASE("enumeration agrees with the simulator in distribution") {
	// lead-2 dynamics: the pipeline slot must behave exactly like the
	// simulator's scheduled orders
	LeadTimeSpec lt;
	lt.crossover = false;
	lt.probs = {0.3, 0.3, 0.4};
	const Instance inst = make_instance_with_lead(5.0, {2.0}, {1.0}, lt);
	const TruncatedInstance trunc = enumerate_transitions(inst);
	const int64_t start = trunc.domain.index(1, 2, 0);
	const int64_t action = 2;

	// empirical next-state distribution from the simulator
	std::map<int64_t, double> empirical;
	RngStream rng(99);
	const int64_t n = 400000;
	double cost_sum = 0.0;
	for (int64_t i = 0; i < n; i++) {
		State s = trunc.to_state(start);
		const PeriodOutcome out = inst.transition(s, action, rng);
		empirical[trunc.from_state(out.next)] += 1.0 / static_cast<double>(n);
		cost_sum += out.cost;
	}
	const auto& row = trunc.transitions[start * trunc.domain.n_actions + action];
	double l1 = 0.0;
	double covered = 0.0;
	for (const auto& [idx, pr] : row) {
		l1 += std::abs(pr - empirical[idx]);
		covered += empirical[idx];
	}
	l1 += 1.0 - covered;  // mass the table does not predict at all
	CHECK(l1 < 0.01);
	CHECK(cost_sum / n ==
	      doctest::Approx(trunc.expected_cost[start * trunc.domain.n_actions + action])
	          .epsilon(0.02));
}

TEST_CASE("distance to itself is zero and the metric is symmetric") {
	const Instance a = make_instance(9.0, {3.0}, {1.5}, 1);
	const Instance b = make_instance(9.0, {4.0}, {2.0}, 1);
	const TruncatedDomain dom = shared_domain(a, b);
	CHECK(param_distance(a, a, dom) == doctest::Approx(0.0));
	CHECK(param_distance(a, b, dom) ==
	      doctest::Approx(param_distance(b, a, dom)).epsilon(1e-12));
	CHECK(param_distance(a, b, dom) > 0.0);
}

TEST_CASE("a pure penalty change moves the distance by dp times the mean") {
	// zero lead: transitions are unchanged, so d_P is the largest change in
	// expected shortage cost, attained with nothing on hand and no order
	const Instance a = make_instance(9.0, {3.0}, {1.5}, 0);
	const Instance b = make_instance(14.0, {3.0}, {1.5}, 0);
	const TruncatedDomain dom = shared_domain(a, b);
	const double expected = 5.0 * a.params().demand.pmfs[0].mean();
	CHECK(param_distance(a, b, dom) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("a perfect estimate makes both bound sides vanish") {
	const Instance inst = make_instance(9.0, {3.0}, {1.5}, 1);
	const TruncatedDomain dom = default_domain(inst);
	const DpResult dp = dp_average_cost(enumerate_transitions(inst), 1e-8);
	const BoundCheckResult bc = bound_check(inst, {&inst}, dp.policy, dom, 16);
	CHECK(bc.lhs == doctest::Approx(0.0));
	CHECK(bc.rhs == doctest::Approx(0.0));
	CHECK(bc.holds);
}

TEST_CASE("a single-period horizon weights the distance by one") {
	const Instance truth = make_instance(9.0, {3.0}, {1.5}, 0);
	const Instance wrong = make_instance(9.0, {4.0}, {2.0}, 0);
	const TruncatedDomain dom = shared_domain(truth, wrong);
	const DpResult dp = dp_average_cost(enumerate_transitions(truth, dom), 1e-8);
	const BoundCheckResult bc = bound_check(truth, {&wrong}, dp.policy, dom, 1);
	CHECK(bc.rhs == doctest::Approx(param_distance(truth, wrong, dom)).epsilon(1e-12));
	CHECK(bc.lhs <= bc.rhs + 1e-9);
	CHECK(bc.holds);
}

TEST_CASE("the estimation-error bound holds on random pairs") {
	SpaceBounds toy;
	toy.p_min = 2.0;
	toy.p_max = 15.0;
	toy.mu_min = 1.0;
	toy.mu_max = 4.0;
	toy.k_max = 2;
	toy.l_max = 1;
	const EngineLimits limits = compute_limits(toy);
	RngStream rng(31337);
	for (int64_t trial = 0; trial < 10; trial++) {
		const Parameterization truth = sample_parameterization(toy, rng);
		Parameterization est = truth;
		std::vector<double> mu(truth.demand.cycle_length), sigma(mu.size());
		for (size_t j = 0; j < mu.size(); j++) {
			mu[j] = rng.next_real(toy.mu_min, toy.mu_max);
			sigma[j] = rng.next_real(sigma_min(mu[j]) + 1e-6, 2.0 * mu[j]);
		}
		est.demand = make_demand_spec(std::move(mu), std::move(sigma), toy.epsilon);
		const Instance t_inst(truth, limits), e_inst(est, limits);
		const TruncatedDomain dom = shared_domain(t_inst, e_inst);
		const DpResult dp = dp_average_cost(enumerate_transitions(t_inst, dom), 1e-7,
		                                    200000);
		const BoundCheckResult bc = bound_check(t_inst, {&e_inst}, dp.policy, dom, 24);
		CHECK(bc.holds);
	}
}

TEST_CASE("oversized state spaces are refused") {
	const Instance inst = bernoulli_instance(9.0);
	TruncatedDomain dom = default_domain(inst);
	dom.oh_cap = 2000000;
	CHECK_THROWS_AS(enumerate_transitions(inst, dom), Error);
	LeadTimeSpec lt;
	lt.crossover = true;
	lt.probs = {0.0, 0.0, 0.0, 1.0};
	const Instance long_lead = make_instance_with_lead(9.0, {2.0}, {1.0}, lt);
	CHECK_THROWS_AS(default_domain(long_lead), Error);
}
