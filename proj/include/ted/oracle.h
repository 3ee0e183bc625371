#pragma once

#include <cstdint>
#include <vector>

#include "ted/mdp.h"
#include "ted/params.h"
#include "ted/policies.h"

namespace ted {

// Explicit state grid (on-hand, next-period pipeline slot, phase) shared by
// exact computations. Supports lead-time support within {0, 1, 2}; the
// pipeline slot carries at most one order, which such instances guarantee.
struct TruncatedDomain {
	int64_t oh_cap = 0;      // on-hand clipped above this, with a diagnostic
	int64_t x_cap = 0;       // 0 when no lead of 2 can occur
	int64_t n_actions = 0;
	int64_t cycle = 1;

	int64_t n_states() const { return (oh_cap + 1) * (x_cap + 1) * cycle; }
	int64_t index(int64_t oh, int64_t x, int64_t phase) const;
	void decode(int64_t idx, int64_t& oh, int64_t& x, int64_t& phase) const;
};

// derives the natural domain of an instance: oh_cap = I_max + D_max
TruncatedDomain default_domain(const Instance& inst);
// shared domain sized for a pair of instances (d_P needs one grid for both)
TruncatedDomain shared_domain(const Instance& a, const Instance& b);

struct TruncatedInstance {
	TruncatedDomain domain;
	// transitions[s * n_actions + a]: sparse next-state distribution
	std::vector<std::vector<std::pair<int32_t, double>>> transitions;
	std::vector<double> expected_cost;  // s * n_actions + a
	int64_t clipped_transitions = 0;    // arrivals clipped at oh_cap

	// simulator state for a grid index (pipeline slot becomes one order)
	State to_state(int64_t idx) const;
	// grid index for a simulator state, on-hand clamped to the cap
	int64_t from_state(const State& s) const;
};

// Exact expansion of the period dynamics over demand and lead outcomes.
// Throws when the lead-time support exceeds 2 or the state count 10^6.
TruncatedInstance enumerate_transitions(const Instance& inst, const TruncatedDomain& dom);
TruncatedInstance enumerate_transitions(const Instance& inst);

struct DpResult {
	double gain = 0.0;                 // optimal average cost per period
	std::vector<int64_t> policy;       // greedy action per state
	int64_t iterations = 0;
	double span = 0.0;
};

// Relative value iteration (with an aperiodicity transform, so cyclic-demand
// chains converge) until span(h_{k+1} - h_k) < tol. The gain does not depend
// on the reference state used to anchor the differential values.
DpResult dp_average_cost(const TruncatedInstance& trunc, double tol = 1e-9,
                         int64_t max_iterations = 1000000, int64_t reference_state = 0);

// Long-run average cost of a fixed policy on the truncated chain.
double policy_average_cost(const TruncatedInstance& trunc,
                           const std::vector<int64_t>& policy, double tol = 1e-9,
                           int64_t max_iterations = 1000000);

// Largest one-step discrepancy between two parameterizations on a shared
// domain: max over (s,a) of |dC| + C_max * L1(df).
double param_distance(const Instance& a, const Instance& b, const TruncatedDomain& dom);

// Wraps a truncated-domain policy table for use on the simulator.
class TablePolicy : public Policy {
public:
	TablePolicy(TruncatedDomain dom, std::vector<int64_t> actions);
	std::string name() const override { return "dp_table"; }
	int64_t act(const State& s, const Instance& inst) const override;

private:
	TruncatedDomain dom_;
	std::vector<int64_t> actions_;
};

struct BoundCheckResult {
	double lhs = 0.0;   // |mean per-period cost under estimates - under truth|
	double rhs = 0.0;   // horizon-weighted sum of parameterization distances
	bool holds = false;
};

// Checks the estimation-error cost bound for a fixed policy: the system runs
// period t under estimates[t] (the last entry persists when the list is
// shorter than the horizon), against the same system under the truth
// throughout. Expectations are exact via the transition tables.
BoundCheckResult bound_check(const Instance& truth,
                             const std::vector<const Instance*>& estimates,
                             const std::vector<int64_t>& policy,
                             const TruncatedDomain& dom, int64_t horizon,
                             double slack = 1e-9);

}  // namespace ted
