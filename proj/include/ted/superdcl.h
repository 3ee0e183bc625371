#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ted/mdp.h"
#include "ted/nn.h"
#include "ted/params.h"
#include "ted/policies.h"

namespace ted {

struct DclConfig {
	int64_t iterations = 5;          // policy-iteration rounds
	int64_t samples = 5000000;       // labeled samples per round
	int64_t workers = 8;             // parallel collectors; part of determinism
	int64_t samples_per_param = 100; // consecutive states per sampled instance
	int64_t warmup = 100;            // periods simulated before labeling starts
	int64_t rollouts = 500;          // simulations per candidate action
	int64_t horizon = 21;            // rollout depth in periods
	int64_t promising = 16;          // candidate actions searched per state

	void validate() const;
};

struct CollectResult {
	Dataset data;
	std::vector<int64_t> param_ids;  // sampled-instance id per row
};

// Promising candidates of policy_i in s, capped at max_count.
std::vector<int64_t> promising_actions(const Policy& policy, const State& s,
                                       const Instance& inst, int64_t max_count);

// Mean cumulative cost of taking `action` and then following `policy` for a
// total of `horizon` periods, averaged over `rollouts` independent runs whose
// random streams derive from rollout_seed.
double rollout_estimate(const Instance& inst, const State& s, int64_t action,
                        const Policy& policy, int64_t rollouts, int64_t horizon,
                        uint64_t rollout_seed);

// Evaluates every candidate with common random numbers (stream m is reused
// across candidates) and returns the cost-minimizing action, ties toward the
// smaller action. cost_out, when given, receives per-candidate means.
int64_t rollout_label(const Instance& inst, const State& s,
                      const std::vector<int64_t>& candidates, const Policy& policy,
                      int64_t rollouts, int64_t horizon, uint64_t rollout_seed,
                      std::vector<double>* cost_out = nullptr);

// One round of sample collection across workers; deterministic in
// (seed, workers). Produces workers * ceil(samples/workers/R) * R rows.
// A nonempty `fixed` list replaces the probable-space sampler: blocks draw
// their parameterization from it round-robin, which turns the engine into
// per-instance policy iteration (a singleton list is a singleton space).
CollectResult collect_samples(const Policy& policy, const DclConfig& cfg,
                              const SpaceBounds& bounds, const EngineLimits& limits,
                              uint64_t seed,
                              const std::vector<Parameterization>& fixed = {});

struct IterationStats {
	int64_t iteration = 0;
	int64_t dataset_size = 0;
	int64_t parameterizations = 0;
	TrainStats train;
	double collect_seconds = 0.0;
	double train_seconds = 0.0;
};

struct SuperDclResult {
	std::vector<Network> networks;       // one per iteration
	std::vector<IterationStats> stats;
};

// Called after each finished iteration, e.g. to persist the network.
using IterationSink = std::function<void(int64_t iteration, const Network&,
                                         const IterationStats&)>;

// Iterative collect-and-distill: round 0 collects under the initial policy,
// later rounds under the latest network; every round trains a classifier
// from scratch. `resume` skips completed rounds by reusing their networks;
// `fixed` is forwarded to collection (per-instance training).
SuperDclResult superdcl_train(const DclConfig& cfg, const SpaceBounds& bounds,
                              const TrainConfig& train_cfg, uint64_t seed,
                              std::vector<Network> resume = {},
                              const IterationSink& sink = {},
                              const std::vector<Parameterization>& fixed = {});

}  // namespace ted
