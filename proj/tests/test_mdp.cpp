#include <doctest.h>

#include <cmath>

#include "test_helpers.h"
#include "ted/error.h"
#include "ted/mdp.h"

using namespace ted;
using namespace ted::testing;

TEST_CASE("period cost and profit formulas") {
	CHECK(period_cost(7, 7, 1.0, 9.0) == doctest::Approx(0.0));
	CHECK(period_cost(10, 4, 1.0, 9.0) == doctest::Approx(6.0));
	CHECK(period_cost(3, 8, 1.0, 39.0) == doctest::Approx(195.0));
	CHECK(period_profit(7, 10, 1.0, 5.0) == doctest::Approx(35.0));
	CHECK(period_profit(10, 4, 1.0, 5.0) == doctest::Approx(14.0));
	CHECK(period_profit(0, 3, 1.0, 5.0) == doctest::Approx(0.0));
}

TEST_CASE("formulas match brute-force evaluation on a grid") {
	const double h = 1.0, p = 7.0;
	for (int64_t av = 0; av <= 20; av++) {
		for (int64_t d = 0; d <= 20; d++) {
			const double over = av > d ? static_cast<double>(av - d) : 0.0;
			const double under = d > av ? static_cast<double>(d - av) : 0.0;
			CHECK(period_cost(av, d, h, p) == doctest::Approx(h * over + p * under));
			const double sold = std::min(av, d);
			CHECK(period_profit(av, d, h, p) == doctest::Approx(p * sold - h * over));
		}
	}
}

TEST_CASE("single-period newsvendor action bound") {
	const Instance pois = make_instance(9.0, {5.0}, {std::sqrt(5.0)}, 0);
	CHECK(pois.m_p() == 8);
	const Instance det = make_instance(9.0, {4.0}, {0.0}, 0);
	CHECK(det.m_p() == 4);
	const Instance median = make_instance(1.0, {5.0}, {std::sqrt(5.0)}, 0);
	CHECK(median.m_p() == 5);
}

TEST_CASE("cumulative newsvendor inventory bound") {
	CHECK(make_instance(9.0, {5.0}, {std::sqrt(5.0)}, 0).i_max() == 8);
	CHECK(make_instance(9.0, {4.0}, {0.0}, 1).i_max() == 8);
	CHECK(make_instance(9.0, {5.0}, {std::sqrt(5.0)}, 2).i_max() == 20);
}

TEST_CASE("initial state is empty at phase zero") {
	const Instance inst = make_instance(9.0, {5.0}, {std::sqrt(5.0)}, 1);
	const State s = inst.initial_state();
	CHECK(s.on_hand == 0);
	CHECK(s.outstanding.empty());
	CHECK(s.phase == 0);
	CHECK(s.inventory_position() == 0);
}

TEST_CASE("transition charges lost sales and pays revenue") {
	// deterministic demand of 5 against two units on hand
	const Instance inst = make_instance(9.0, {5.0}, {0.0}, 0);
	State s = inst.initial_state();
	s.on_hand = 2;
	RngStream rng(1);
	const PeriodOutcome out = inst.transition(s, 0, rng);
	CHECK(out.next.on_hand == 0);
	CHECK(out.cost == doctest::Approx(27.0));     // 9 * (5 - 2)
	CHECK(out.profit == doctest::Approx(18.0));   // 9 * 2
	CHECK(out.observation.censored);
	CHECK(out.observation.sale == 2);
}

TEST_CASE("transition keeps leftovers and reports uncensored sales") {
	const Instance inst = make_instance(9.0, {1.0}, {0.0}, 0);
	State s = inst.initial_state();
	s.on_hand = 4;
	RngStream rng(1);
	const PeriodOutcome out = inst.transition(s, 0, rng);
	CHECK(out.next.on_hand == 3);
	CHECK(out.cost == doctest::Approx(3.0));
	CHECK_FALSE(out.observation.censored);
	CHECK(out.observation.demand_observed);
}

TEST_CASE("scheduled orders arrive one period at a time") {
	LeadTimeSpec lt;
	lt.crossover = true;
	lt.probs = {0.0, 0.5, 0.0, 0.5};
	const Instance inst = make_instance_with_lead(9.0, {1.0}, {0.0}, lt);
	State s = inst.initial_state();
	s.outstanding = {Order{1, 3, 1}, Order{2, 5, 3}};
	RngStream rng(1);
	const PeriodOutcome out = inst.transition(s, 0, rng);
	// only the first order lands at the next review
	REQUIRE(out.next.outstanding.size() == 1);
	CHECK(out.next.outstanding[0].qty == 5);
	CHECK(out.next.outstanding[0].remaining == 2);
	// the period's unit of demand is lost (nothing was on hand), the
	// arriving order is already part of the next review's stock
	CHECK(out.next.on_hand == 3);
	CHECK(out.cost == doctest::Approx(9.0));
	REQUIRE(out.observation.arrival_leads.size() == 1);
	CHECK(out.observation.arrival_leads[0] == 2);  // age after one more period
}

TEST_CASE("stock and pipeline are conserved on random paths") {
	const SpaceBounds bounds;
	const EngineLimits limits = compute_limits(bounds);
	RngStream rng(424242);
	for (int64_t trial = 0; trial < 50; trial++) {
		const Instance inst(sample_parameterization(bounds, rng), limits);
		State s = inst.initial_state();
		for (int64_t t = 0; t < 200; t++) {
			const int64_t a = rng.next_int(0, inst.m_p());
			RngStream step_rng(rng.next_u64());
			const PeriodOutcome out = inst.transition(s, a, step_rng);
			// infer immediate delivery and arrivals from the books
			const bool immediate = !out.observation.arrival_leads.empty() &&
			                       out.observation.arrival_leads.front() == 0;
			const int64_t q0 = immediate ? a : 0;
			const int64_t placed = (a > 0 && !immediate) ? a : 0;
			const int64_t arrived = s.pipeline_total() + placed -
			                        out.next.pipeline_total();
			CHECK(arrived >= 0);
			CHECK(out.next.on_hand ==
			      s.on_hand + q0 - out.observation.sale + arrived);
			CHECK(out.cost >= 0.0);
			for (const auto& o : out.next.outstanding) {
				CHECK(o.age >= 1);
				CHECK(o.age <= bounds.l_max);
				CHECK(o.remaining >= 1);
			}
			s = out.next;
		}
	}
}

TEST_CASE("sequential mode never reorders arrivals") {
	LeadTimeSpec lt;
	lt.crossover = false;
	lt.probs = {0.2, 0.2, 0.2, 0.2, 0.2};
	const Instance inst = make_instance_with_lead(9.0, {3.0}, {2.0}, lt);
	RngStream rng(17);
	State s = inst.initial_state();
	StepOutcome out;
	for (int64_t t = 0; t < 100000; t++) {
		inst.step(s, t % 3 == 0 ? 2 : 0, rng, out);
		// outstanding orders must be arrival-ordered by age: an older order
		// (larger age) never waits longer than a younger one
		for (size_t i = 0; i + 1 < s.outstanding.size(); i++) {
			CHECK(s.outstanding[i].age > s.outstanding[i + 1].age);
			CHECK(s.outstanding[i].remaining <= s.outstanding[i + 1].remaining);
		}
	}
}

TEST_CASE("crossover lead times reproduce the configured distribution") {
	LeadTimeSpec lt;
	lt.crossover = true;
	lt.probs = {0.1, 0.3, 0.0, 0.4, 0.2};
	const Instance inst = make_instance_with_lead(9.0, {3.0}, {2.0}, lt);
	RngStream rng(23);
	State s = inst.initial_state();
	std::vector<int64_t> counts(lt.probs.size(), 0);
	std::vector<int64_t> leads;
	StepOutcome out;
	int64_t total = 0;
	for (int64_t t = 0; t < 100000; t++) {
		leads.clear();
		inst.step(s, 1, rng, out, &leads);
		for (int64_t lead : leads) {
			counts[lead]++;
			total++;
		}
	}
	double l1 = 0.0;
	for (size_t j = 0; j < counts.size(); j++)
		l1 += std::abs(static_cast<double>(counts[j]) / total - lt.probs[j]);
	CHECK(l1 < 0.02);
}

TEST_CASE("actions beyond the engine bound are contract violations") {
	const Instance inst = make_instance(9.0, {5.0}, {std::sqrt(5.0)}, 0);
	RngStream rng(3);
	CHECK_THROWS_AS(inst.transition(inst.initial_state(), inst.action_top() + 1, rng),
	                Error);
	CHECK_THROWS_AS(inst.transition(inst.initial_state(), -1, rng), Error);
}
