#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "ted/estimate.h"
#include "ted/mdp.h"
#include "ted/nn.h"
#include "ted/params.h"
#include "ted/policies.h"

namespace ted {

enum class Objective { cost, profit };

struct EvalConfig {
	int64_t runs = 200;
	int64_t horizon = 2000;   // periods per run after warm-up
	int64_t warmup = 100;     // discarded periods
	uint64_t seed = 1;
	Objective objective = Objective::cost;
	int64_t threads = 0;      // 0 = hardware concurrency

	void validate() const;
};

struct EvalResult {
	double mean = 0.0;
	double ci_half = 0.0;     // 95% normal-approximation half-width
	int64_t runs = 0;
	int64_t horizon = 0;
	bool ci_within_1pct = false;
};

// Mean per-period objective across seeded runs; run r always consumes the
// same draws per period index, so evaluations with equal (seed, runs,
// horizon) share common random numbers across policies.
EvalResult evaluate_policy(const Policy& policy, const Instance& inst,
                           const EvalConfig& cfg);

double relative_cost_gap(double cost_policy, double cost_benchmark);
double relative_profit_gap(double profit_policy, double profit_benchmark);

enum class BenchmarkKind { bsp, cbsp };

struct BenchmarkResult {
	std::shared_ptr<Policy> policy;
	std::vector<int64_t> levels;  // per phase
	int64_t cap = -1;             // only for the capped variant
	EvalResult eval;              // under the search configuration
};

// Simulation-based search with shared random streams: per-phase base-stock
// levels by cyclic coordinate descent over [0, I_max]; the capped variant
// additionally scans the order cap over [1, m_p].
BenchmarkResult optimize_benchmark(const Instance& inst, BenchmarkKind kind,
                                   const EvalConfig& cfg);

struct TedConfig {
	int64_t runs = 200;
	uint64_t seed = 1;
	bool demand_known = false;
	bool leadtime_known = true;
	std::vector<int64_t> horizons = {200, 500, 1000, 2000};

	void validate() const;
};

struct TedPoint {
	int64_t horizon = 0;
	double mean_cost = 0.0;
	double cost_ci = 0.0;
	double mean_profit = 0.0;
	double profit_ci = 0.0;
};

// Deployment loop: per period the estimator assembles the current estimate
// (fallback before any data), the network acts on it, the truth drives the
// transition, and the observation updates the estimator. No warm-up discard;
// one point per requested horizon, measured on the same trajectories.
std::vector<TedPoint> run_ted(const Instance& truth, const Network& net,
                              const SpaceBounds& bounds, const EngineLimits& limits,
                              const TedConfig& cfg);

// One simulated trajectory as CSV rows:
// t,phase,OH,pipeline-by-age,action,demand_or_sale,censored,cost,profit
// (pipeline-by-age is colon-separated, ages 1..l_max of the instance).
void export_trajectory(const Instance& inst, const Policy& policy, int64_t periods,
                       uint64_t seed, std::ostream& out);

// Full-factorial benchmark instance lists. Case 1: iid demand, deterministic
// lead times (320). Case 2: cyclic demand, deterministic lead times (243).
// Case 3: stochastic lead times with and without crossover (240).
std::vector<Parameterization> build_testbed(int64_t case_id);

// bounds the testbeds are defined on (the engine's default space)
SpaceBounds testbed_bounds();

}  // namespace ted
