#pragma once

#include <cstdint>
#include <vector>

#include "ted/params.h"
#include "ted/pmf.h"
#include "ted/rng.h"

namespace ted {

// An order in flight. remaining counts periods until arrival as seen from the
// current decision point; in the sequential (non-crossing) regime it already
// includes any first-in-first-out delay applied at placement.
struct Order {
	int64_t age = 0;
	int64_t qty = 0;
	int64_t remaining = 0;
};

// Decision-point state: arrivals due this period have already been folded
// into on_hand, outstanding orders all have age in [1, l_max].
struct State {
	int64_t on_hand = 0;
	std::vector<Order> outstanding;
	int64_t phase = 0;

	int64_t pipeline_total() const;
	int64_t inventory_position() const { return on_hand + pipeline_total(); }
};

// What the decision maker gets to see after one period.
struct Observation {
	int64_t sale = 0;
	bool censored = false;        // stockout: true demand >= sale
	bool demand_observed = false; // false when no stock was available at all
	std::vector<int64_t> arrival_leads;  // realized lead per order received
	int64_t phase = 0;            // phase of the period the demand hit
};

struct PeriodOutcome {
	State next;
	double cost = 0.0;
	double profit = 0.0;
	Observation observation;
};

// Allocation-free per-period result for simulation hot paths; arrivals are
// only reported when a lead buffer is supplied.
struct StepOutcome {
	double cost = 0.0;
	double profit = 0.0;
	int64_t sale = 0;
	bool censored = false;
	bool demand_observed = false;
	int64_t obs_phase = 0;
};

double period_cost(int64_t available, int64_t demand, double h, double p);
double period_profit(int64_t available, int64_t demand, double h, double p);

// Smallest m with P(D <= m) >= p/(p+h) for the phase with the largest such
// fractile: the single-period newsvendor bound on sensible order sizes.
int64_t action_bound(const Parameterization& p);

// Newsvendor fractile of cumulative demand over mean-lead-time + 1 periods,
// convolved phase by phase and maximized over the starting phase; bounds the
// inventory position any sensible policy maintains.
int64_t base_stock_bound(const Parameterization& p);

// One sampled MDP instance: the parameterization plus cached samplers and
// bounds. Immutable after construction, safe for concurrent use.
class Instance {
public:
	Instance(Parameterization params, EngineLimits limits);

	const Parameterization& params() const { return params_; }
	const EngineLimits& limits() const { return limits_; }
	int64_t m_p() const { return m_p_; }
	int64_t i_max() const { return i_max_; }
	int64_t cycle_length() const { return params_.demand.cycle_length; }
	// all actions 0..action_top() are accepted by the simulator
	int64_t action_top() const;

	State initial_state() const;

	// Consumes exactly two uniforms per call (lead, then demand) so common
	// random numbers stay aligned across policies and candidate actions.
	PeriodOutcome transition(const State& s, int64_t action, RngStream& rng) const;

	// In-place variant of transition; realized lead times of this period's
	// arrivals are appended to arrival_leads when given.
	void step(State& s, int64_t action, RngStream& rng, StepOutcome& out,
	          std::vector<int64_t>* arrival_leads = nullptr) const;

private:
	Parameterization params_;
	EngineLimits limits_;
	std::vector<PmfSampler> demand_samplers_;
	PmfSampler lead_sampler_;
	int64_t m_p_ = 0;
	int64_t i_max_ = 0;
};

}  // namespace ted
