#include "ted/superdcl.h"

#include <algorithm>
#include <chrono>
#include <mutex>
#include <thread>

#include "ted/error.h"

namespace ted {

namespace {

constexpr uint64_t kCollectTag = 0x636f6c6cULL;
constexpr uint64_t kTrainTag = 0x747261696eULL;
constexpr uint64_t kRolloutTag = 0x726f6c6cULL;

double seconds_since(std::chrono::steady_clock::time_point t0) {
	return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

void DclConfig::validate() const {
	if (iterations < 1) throw Error("dcl config: iterations must be positive");
	if (samples < 1) throw Error("dcl config: samples must be positive");
	if (workers < 1) throw Error("dcl config: workers must be positive");
	if (samples_per_param < 1) throw Error("dcl config: samples_per_param must be positive");
	if (warmup < 0) throw Error("dcl config: warmup must be nonnegative");
	if (rollouts < 1) throw Error("dcl config: rollouts must be positive");
	if (horizon < 1) throw Error("dcl config: horizon must be positive");
	if (promising < 1) throw Error("dcl config: promising must be positive");
}

std::vector<int64_t> promising_actions(const Policy& policy, const State& s,
                                       const Instance& inst, int64_t max_count) {
	if (max_count < 1) throw Error("promising_actions: need at least one candidate");
	return policy.promising(s, inst, max_count);
}

int64_t rollout_label(const Instance& inst, const State& s,
                      const std::vector<int64_t>& candidates, const Policy& policy,
                      int64_t rollouts, int64_t horizon, uint64_t rollout_seed,
                      std::vector<double>* cost_out) {
	const auto n_cand = static_cast<int64_t>(candidates.size());
	if (n_cand == 0) throw Error("rollout_label: empty candidate set");
	const int64_t rows = n_cand * rollouts;

	// stream m is identical for every candidate: common random numbers
	std::vector<RngStream> rngs;
	rngs.reserve(rows);
	for (int64_t c = 0; c < n_cand; c++)
		for (int64_t m = 0; m < rollouts; m++)
			rngs.emplace_back(derive_seed(rollout_seed, static_cast<uint64_t>(m)));

	std::vector<State> states(rows, s);
	std::vector<double> totals(rows, 0.0);
	StepOutcome step;

	for (int64_t c = 0; c < n_cand; c++) {
		for (int64_t m = 0; m < rollouts; m++) {
			const int64_t row = c * rollouts + m;
			inst.step(states[row], candidates[c], rngs[row], step);
			totals[row] += step.cost;
		}
	}
	std::vector<int64_t> acts;
	for (int64_t t = 1; t < horizon; t++) {
		policy.act_batch(states, inst, acts);
		for (int64_t row = 0; row < rows; row++) {
			inst.step(states[row], acts[row], rngs[row], step);
			totals[row] += step.cost;
		}
	}

	int64_t best = 0;
	double best_cost = std::numeric_limits<double>::infinity();
	std::vector<double> means(n_cand);
	for (int64_t c = 0; c < n_cand; c++) {
		double sum = 0.0;
		for (int64_t m = 0; m < rollouts; m++) sum += totals[c * rollouts + m];
		means[c] = sum / static_cast<double>(rollouts);
		if (means[c] < best_cost) {  // strict: candidates ascend, ties stay small
			best_cost = means[c];
			best = c;
		}
	}
	if (cost_out) *cost_out = std::move(means);
	return candidates[best];
}

double rollout_estimate(const Instance& inst, const State& s, int64_t action,
                        const Policy& policy, int64_t rollouts, int64_t horizon,
                        uint64_t rollout_seed) {
	std::vector<double> costs;
	rollout_label(inst, s, {action}, policy, rollouts, horizon, rollout_seed, &costs);
	return costs[0];
}

CollectResult collect_samples(const Policy& policy, const DclConfig& cfg,
                              const SpaceBounds& bounds, const EngineLimits& limits,
                              uint64_t seed,
                              const std::vector<Parameterization>& fixed) {
	cfg.validate();
	bounds.validate();
	if (cfg.promising > limits.m + 1)
		throw Error("collect: promising-action cap exceeds the action space");

	const int64_t blocks_per_worker =
	    (cfg.samples + cfg.workers * cfg.samples_per_param - 1) /
	    (cfg.workers * cfg.samples_per_param);
	const int64_t total_blocks = cfg.workers * blocks_per_worker;
	const int64_t total = total_blocks * cfg.samples_per_param;
	const int64_t n_features = feature_length(bounds);

	CollectResult result;
	result.data.X.resize(total, n_features);
	result.data.y.assign(total, 0);
	result.data.n_classes = limits.m + 1;
	result.param_ids.assign(total, 0);

	auto run_worker = [&](int64_t worker) {
		std::vector<double> row(n_features);
		for (int64_t j = 0; j < blocks_per_worker; j++) {
			const int64_t block = worker * blocks_per_worker + j;
			RngStream block_rng(derive_seed(seed, kCollectTag, static_cast<uint64_t>(block)));
			const Parameterization param =
			    fixed.empty() ? sample_parameterization(bounds, block_rng)
			                  : fixed[block % fixed.size()];
			const Instance inst(param, limits);
			State s = inst.initial_state();
			StepOutcome step;
			for (int64_t l = 0; l < cfg.warmup; l++)
				inst.step(s, policy.act(s, inst), block_rng, step);
			for (int64_t k = 0; k < cfg.samples_per_param; k++) {
				const auto candidates = promising_actions(policy, s, inst, cfg.promising);
				const uint64_t rollout_seed =
				    derive_seed(seed, kRolloutTag, static_cast<uint64_t>(block),
				                static_cast<uint64_t>(k));
				const int64_t label = rollout_label(inst, s, candidates, policy,
				                                    cfg.rollouts, cfg.horizon, rollout_seed);
				const int64_t slot = block * cfg.samples_per_param + k;
				featurize_into(s, param, bounds, row.data());
				for (int64_t f = 0; f < n_features; f++) result.data.X(slot, f) = row[f];
				result.data.y[slot] = label;
				result.param_ids[slot] = block;
				inst.step(s, label, block_rng, step);  // system advances by the label
			}
		}
	};

	if (cfg.workers == 1) {
		run_worker(0);
	} else {
		std::vector<std::thread> pool;
		pool.reserve(cfg.workers);
		std::exception_ptr first_error;
		std::mutex error_mutex;
		for (int64_t w = 0; w < cfg.workers; w++) {
			pool.emplace_back([&, w] {
				try {
					run_worker(w);
				} catch (...) {
					const std::lock_guard<std::mutex> lock(error_mutex);
					if (!first_error) first_error = std::current_exception();
				}
			});
		}
		for (auto& t : pool) t.join();
		if (first_error) std::rethrow_exception(first_error);
	}
	return result;
}

SuperDclResult superdcl_train(const DclConfig& cfg, const SpaceBounds& bounds,
                              const TrainConfig& train_cfg, uint64_t seed,
                              std::vector<Network> resume, const IterationSink& sink,
                              const std::vector<Parameterization>& fixed) {
	cfg.validate();
	train_cfg.validate();
	const EngineLimits limits = compute_limits(bounds);

	SuperDclResult out;
	out.networks = std::move(resume);
	if (static_cast<int64_t>(out.networks.size()) > cfg.iterations)
		out.networks.resize(cfg.iterations);

	for (auto i = static_cast<int64_t>(out.networks.size()); i < cfg.iterations; i++) {
		std::unique_ptr<Policy> policy;
		if (i == 0) {
			policy = std::make_unique<InitialPolicy>();
		} else {
			auto net = std::make_shared<Network>(out.networks[i - 1]);
			policy = std::make_unique<NeuralPolicy>(std::move(net), bounds);
		}

		IterationStats stats;
		stats.iteration = i;
		auto t0 = std::chrono::steady_clock::now();
		CollectResult collected = collect_samples(
		    *policy, cfg, bounds, limits, derive_seed(seed, kCollectTag, i), fixed);
		stats.collect_seconds = seconds_since(t0);
		stats.dataset_size = collected.data.size();
		stats.parameterizations =
		    collected.param_ids.empty() ? 0 : collected.param_ids.back() + 1;

		TrainConfig iter_cfg = train_cfg;
		iter_cfg.seed = derive_seed(seed, kTrainTag, i);
		t0 = std::chrono::steady_clock::now();
		Network net = train_classifier(collected.data, iter_cfg, &stats.train);
		stats.train_seconds = seconds_since(t0);

		out.networks.push_back(std::move(net));
		out.stats.push_back(stats);
		if (sink) sink(i, out.networks.back(), stats);
	}
	return out;
}

}  // namespace ted
