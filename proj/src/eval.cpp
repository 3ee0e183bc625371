#include "ted/eval.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>
#include <ostream>
#include <thread>

#include "ted/error.h"

namespace ted {

namespace {

// one stream tag for evaluation and deployment runs: a TED run with every
// component declared known then reproduces direct evaluation exactly
constexpr uint64_t kEvalTag = 0x6576616cULL;

int64_t resolve_threads(int64_t requested) {
	if (requested > 0) return requested;
	const auto hw = static_cast<int64_t>(std::thread::hardware_concurrency());
	return std::max<int64_t>(1, hw);
}

// contiguous run ranges across a small pool; worker errors propagate
void run_chunks(const std::function<void(int64_t, int64_t)>& chunk, int64_t threads,
                int64_t runs) {
	const int64_t n_threads = std::min(threads, runs);
	if (n_threads <= 1) {
		chunk(0, runs);
		return;
	}
	std::vector<std::thread> pool;
	std::exception_ptr first_error;
	std::mutex error_mutex;
	const int64_t per = (runs + n_threads - 1) / n_threads;
	for (int64_t t = 0; t < n_threads; t++) {
		const int64_t lo = t * per;
		const int64_t hi = std::min(runs, lo + per);
		if (lo >= hi) continue;
		pool.emplace_back([&, lo, hi] {
			try {
				chunk(lo, hi);
			} catch (...) {
				const std::lock_guard<std::mutex> lock(error_mutex);
				if (!first_error) first_error = std::current_exception();
			}
		});
	}
	for (auto& th : pool) th.join();
	if (first_error) std::rethrow_exception(first_error);
}

EvalResult summarize(const std::vector<double>& run_means, int64_t horizon) {
	EvalResult r;
	r.runs = static_cast<int64_t>(run_means.size());
	r.horizon = horizon;
	double sum = 0.0;
	for (double m : run_means) sum += m;
	r.mean = sum / static_cast<double>(r.runs);
	if (r.runs >= 2) {
		double ss = 0.0;
		for (double m : run_means) ss += (m - r.mean) * (m - r.mean);
		const double sd = std::sqrt(ss / static_cast<double>(r.runs - 1));
		r.ci_half = 1.96 * sd / std::sqrt(static_cast<double>(r.runs));
	}
	r.ci_within_1pct = r.runs >= 2 && r.ci_half < 0.01 * std::abs(r.mean);
	return r;
}

}  // namespace

void EvalConfig::validate() const {
	if (runs < 1) throw Error("eval config: runs must be positive");
	if (horizon < 1) throw Error("eval config: horizon must be positive");
	if (warmup < 0) throw Error("eval config: warmup must be nonnegative");
}

EvalResult evaluate_policy(const Policy& policy, const Instance& inst,
                           const EvalConfig& cfg) {
	cfg.validate();
	std::vector<double> run_means(cfg.runs, 0.0);

	// runs advance in lockstep so the policy can act on the whole batch;
	// each run owns its stream, making the result independent of chunking
	auto simulate_chunk = [&](int64_t lo, int64_t hi) {
		const int64_t n = hi - lo;
		std::vector<State> states(n, inst.initial_state());
		std::vector<RngStream> rngs;
		rngs.reserve(n);
		for (int64_t r = lo; r < hi; r++)
			rngs.emplace_back(derive_seed(cfg.seed, kEvalTag, static_cast<uint64_t>(r)));
		std::vector<double> acc(n, 0.0);
		std::vector<int64_t> acts;
		StepOutcome out;
		for (int64_t t = 0; t < cfg.warmup + cfg.horizon; t++) {
			policy.act_batch(states, inst, acts);
			for (int64_t i = 0; i < n; i++) {
				inst.step(states[i], acts[i], rngs[i], out);
				if (t >= cfg.warmup)
					acc[i] += cfg.objective == Objective::cost ? out.cost : out.profit;
			}
		}
		for (int64_t i = 0; i < n; i++)
			run_means[lo + i] = acc[i] / static_cast<double>(cfg.horizon);
	};

	run_chunks(simulate_chunk, resolve_threads(cfg.threads), cfg.runs);
	return summarize(run_means, cfg.horizon);
}

double relative_cost_gap(double cost_policy, double cost_benchmark) {
	if (!(cost_benchmark > 0.0)) throw Error("relative_cost_gap: nonpositive baseline");
	return (cost_policy - cost_benchmark) / cost_benchmark;
}

double relative_profit_gap(double profit_policy, double profit_benchmark) {
	if (!(profit_benchmark > 0.0)) throw Error("relative_profit_gap: nonpositive baseline");
	return (profit_benchmark - profit_policy) / profit_benchmark;
}

namespace {

// full scan of one base-stock coordinate, ties toward the smaller level
bool improve_coordinate(const Instance& inst, const EvalConfig& cfg, int64_t cap,
                        std::vector<int64_t>& levels, int64_t phase, double& best_cost) {
	const int64_t original = levels[phase];
	int64_t best_level = original;
	for (int64_t s = 0; s <= inst.i_max(); s++) {
		levels[phase] = s;
		double cost;
		if (cap < 0) {
			cost = evaluate_policy(BaseStockPolicy(levels), inst, cfg).mean;
		} else {
			cost = evaluate_policy(CappedBaseStockPolicy(levels, cap), inst, cfg).mean;
		}
		if (cost < best_cost || (cost == best_cost && s < best_level)) {
			best_cost = cost;
			best_level = s;
		}
	}
	levels[phase] = best_level;
	return best_level != original;
}

double descend(const Instance& inst, const EvalConfig& cfg, int64_t cap,
               std::vector<int64_t>& levels) {
	double best;
	if (cap < 0) {
		best = evaluate_policy(BaseStockPolicy(levels), inst, cfg).mean;
	} else {
		best = evaluate_policy(CappedBaseStockPolicy(levels, cap), inst, cfg).mean;
	}
	const int64_t cycle = inst.cycle_length();
	for (int64_t sweep = 0; sweep < 50; sweep++) {
		bool improved = false;
		for (int64_t phase = 0; phase < cycle; phase++)
			improved |= improve_coordinate(inst, cfg, cap, levels, phase, best);
		if (!improved) break;
	}
	return best;
}

}  // namespace

BenchmarkResult optimize_benchmark(const Instance& inst, BenchmarkKind kind,
                                   const EvalConfig& cfg) {
	cfg.validate();
	if (cfg.objective != Objective::cost)
		throw Error("optimize_benchmark: benchmarks are tuned on cost");

	BenchmarkResult result;
	std::vector<int64_t> levels(inst.cycle_length(), inst.i_max());
	const double bsp_cost = descend(inst, cfg, -1, levels);

	if (kind == BenchmarkKind::bsp) {
		result.levels = levels;
		result.policy = std::make_shared<BaseStockPolicy>(levels);
		result.eval = evaluate_policy(*result.policy, inst, cfg);
		return result;
	}

	// capped variant: nested scan over the order cap, warm-starting each
	// inner search from the plain base-stock solution
	double best_cost = std::numeric_limits<double>::infinity();
	std::vector<int64_t> best_levels = levels;
	int64_t best_cap = inst.m_p();
	for (int64_t cap = 1; cap <= inst.m_p(); cap++) {
		std::vector<int64_t> trial = levels;
		const double cost = descend(inst, cfg, cap, trial);
		if (cost < best_cost) {
			best_cost = cost;
			best_levels = trial;
			best_cap = cap;
		}
	}
	(void)bsp_cost;
	result.levels = best_levels;
	result.cap = best_cap;
	result.policy = std::make_shared<CappedBaseStockPolicy>(best_levels, best_cap);
	result.eval = evaluate_policy(*result.policy, inst, cfg);
	return result;
}

void TedConfig::validate() const {
	if (runs < 1) throw Error("ted config: runs must be positive");
	if (horizons.empty()) throw Error("ted config: need at least one horizon");
	for (size_t i = 0; i < horizons.size(); i++) {
		if (horizons[i] < 1) throw Error("ted config: horizons must be positive");
		if (i > 0 && horizons[i] <= horizons[i - 1])
			throw Error("ted config: horizons must be strictly increasing");
	}
}

std::vector<TedPoint> run_ted(const Instance& truth, const Network& net,
                              const SpaceBounds& bounds, const EngineLimits& limits,
                              const TedConfig& cfg) {
	cfg.validate();
	if (net.input_dim() != feature_length(bounds))
		throw Error("run_ted: network input does not match the bounds featurization");
	const int64_t t_max = cfg.horizons.back();
	const auto n_checkpoints = static_cast<int64_t>(cfg.horizons.size());

	std::vector<std::vector<double>> cost_means(n_checkpoints,
	                                            std::vector<double>(cfg.runs, 0.0));
	std::vector<std::vector<double>> profit_means = cost_means;

	auto simulate_chunk = [&](int64_t lo, int64_t hi) {
		const int64_t n = hi - lo;
		std::vector<State> states(n, truth.initial_state());
		std::vector<RngStream> rngs;
		std::vector<EstimatorState> estimators;
		rngs.reserve(n);
		estimators.reserve(n);
		for (int64_t r = lo; r < hi; r++) {
			rngs.emplace_back(derive_seed(cfg.seed, kEvalTag, static_cast<uint64_t>(r)));
			estimators.emplace_back(truth.params(), cfg.demand_known, cfg.leadtime_known,
			                        bounds, limits);
		}
		std::vector<double> cost_acc(n, 0.0), profit_acc(n, 0.0);
		Eigen::MatrixXd feats(n, feature_length(bounds));
		std::vector<double> feat_row(feature_length(bounds));
		std::vector<int64_t> caps(n, 0);
		StepOutcome out;
		Observation obs;
		for (int64_t t = 0; t < t_max; t++) {
			for (int64_t i = 0; i < n; i++) {
				const Parameterization est = estimators[i].assemble();
				featurize_into(states[i], est, bounds, feat_row.data());
				for (int64_t f = 0; f < feats.cols(); f++) feats(i, f) = feat_row[f];
				caps[i] = std::min(action_bound(est), net.output_dim() - 1);
			}
			const Eigen::MatrixXd logits = net.forward_batch(feats);
			for (int64_t i = 0; i < n; i++) {
				const int64_t a = masked_argmax(logits.row(i), caps[i]);
				obs.arrival_leads.clear();
				truth.step(states[i], a, rngs[i], out, &obs.arrival_leads);
				obs.sale = out.sale;
				obs.censored = out.censored;
				obs.demand_observed = out.demand_observed;
				obs.phase = out.obs_phase;
				estimators[i].update(obs);
				cost_acc[i] += out.cost;
				profit_acc[i] += out.profit;
			}
			for (int64_t c = 0; c < n_checkpoints; c++) {
				if (cfg.horizons[c] == t + 1) {
					for (int64_t i = 0; i < n; i++) {
						cost_means[c][lo + i] = cost_acc[i] / static_cast<double>(t + 1);
						profit_means[c][lo + i] = profit_acc[i] / static_cast<double>(t + 1);
					}
				}
			}
		}
	};

	run_chunks(simulate_chunk, resolve_threads(0), cfg.runs);

	std::vector<TedPoint> points(n_checkpoints);
	for (int64_t c = 0; c < n_checkpoints; c++) {
		const EvalResult cost_r = summarize(cost_means[c], cfg.horizons[c]);
		const EvalResult profit_r = summarize(profit_means[c], cfg.horizons[c]);
		points[c].horizon = cfg.horizons[c];
		points[c].mean_cost = cost_r.mean;
		points[c].cost_ci = cost_r.ci_half;
		points[c].mean_profit = profit_r.mean;
		points[c].profit_ci = profit_r.ci_half;
	}
	return points;
}

void export_trajectory(const Instance& inst, const Policy& policy, int64_t periods,
                       uint64_t seed, std::ostream& out) {
	const int64_t l_max = static_cast<int64_t>(inst.params().leadtime.probs.size()) - 1;
	out << "t,phase,on_hand,pipeline_by_age,action,demand_or_sale,censored,cost,profit\n";
	State s = inst.initial_state();
	RngStream rng(seed);
	StepOutcome step;
	for (int64_t t = 0; t < periods; t++) {
		const int64_t a = policy.act(s, inst);
		out << t << "," << s.phase << "," << s.on_hand << ",";
		for (int64_t age = 1; age <= l_max; age++) {
			int64_t qty = 0;
			for (const auto& o : s.outstanding)
				if (o.age == age) qty += o.qty;
			out << (age > 1 ? ":" : "") << qty;
		}
		inst.step(s, a, rng, step);
		out << "," << a << "," << step.sale << "," << (step.censored ? 1 : 0) << ","
		    << step.cost << "," << step.profit << "\n";
	}
}

namespace {

enum class Family { binom, poisson, negbinom, geometric };

double family_sigma(double mu, Family fam) {
	switch (fam) {
	case Family::binom: {
		const auto n = static_cast<int64_t>(std::llround(mu / 0.2));
		return std::sqrt(mu * (1.0 - mu / static_cast<double>(n)));
	}
	case Family::poisson:
		return std::sqrt(mu);
	case Family::negbinom: {
		const auto r = std::max<int64_t>(
		    static_cast<int64_t>(std::ceil(mu * 0.2 / 0.8)), 2);
		return std::sqrt(mu * (mu + static_cast<double>(r)) / static_cast<double>(r));
	}
	case Family::geometric:
		return std::sqrt(mu * (1.0 + mu));
	}
	throw Error("unknown demand family");
}

const std::vector<Family> kLowCombo = {Family::poisson, Family::binom, Family::poisson,
                                       Family::binom, Family::poisson, Family::binom,
                                       Family::poisson};
const std::vector<Family> kHighCombo = {Family::geometric, Family::negbinom,
                                        Family::geometric, Family::negbinom,
                                        Family::geometric, Family::negbinom,
                                        Family::geometric};
const std::vector<Family> kMixCombo = {Family::poisson, Family::geometric,
                                       Family::negbinom, Family::binom, Family::poisson,
                                       Family::geometric, Family::negbinom};

Parameterization make_instance(double p, const std::vector<double>& mu,
                               const std::vector<Family>& fams, LeadTimeSpec lead,
                               const SpaceBounds& bounds) {
	Parameterization param;
	param.h = 1.0;
	param.p = p;
	std::vector<double> sigma(mu.size());
	for (size_t j = 0; j < mu.size(); j++) sigma[j] = family_sigma(mu[j], fams[j]);
	param.demand = make_demand_spec(mu, sigma, bounds.epsilon);
	param.leadtime = std::move(lead);
	return param;
}

// Case 3 lead-time probability vectors, sequential (l=0) block
const std::vector<std::vector<double>> kCase3Sequential = {
    {0.0, 0.1, 0.18, 0.216, 0.2016, 0.1512, 0.09072, 0.042336, 0.0145152, 0.00326592,
     0.00036288},
    {0.0, 0.0, 0.2, 0.32, 0.288, 0.1536, 0.0384, 0.0, 0.0, 0.0, 0.0},
    {0.0, 0.0, 0.0, 0.0, 0.1, 0.27, 0.378, 0.2268, 0.0252, 0.0, 0.0},
    {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.1, 0.27, 0.378, 0.252},
    {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.2, 0.32, 0.288, 0.1536, 0.0384},
    {0.0, 0.0, 0.0, 0.0, 0.05, 0.095, 0.171, 0.2052, 0.21546, 0.184338, 0.079002},
    {0.0, 0.0, 0.0, 0.0, 0.1, 0.225, 0.3375, 0.253125, 0.0759375, 0.0084375, 0.0},
    {0.05, 0.095, 0.171, 0.2052, 0.21546, 0.184338, 0.079002, 0.0, 0.0, 0.0, 0.0},
    {0.0, 0.0, 0.0, 0.0, 0.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.03125},
    {0.0, 0.0, 0.0, 0.3, 0.49, 0.189, 0.021, 0.0, 0.0, 0.0, 0.0},
};

// Case 3 lead-time probability vectors, crossover (l=1) block
const std::vector<std::vector<double>> kCase3Crossover = {
    {0.0, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1},
    {0.0, 0.0, 0.2, 0.2, 0.2, 0.2, 0.2, 0.0, 0.0, 0.0, 0.0},
    {0.0, 0.0, 0.0, 0.0, 0.1, 0.2, 0.3, 0.3, 0.1, 0.0, 0.0},
    {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.1, 0.2, 0.3, 0.4},
    {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.2, 0.2, 0.2, 0.2, 0.2},
    {0.0, 0.0, 0.0, 0.0, 0.05, 0.05, 0.1, 0.1, 0.15, 0.25, 0.3},
    {0.05, 0.05, 0.1, 0.1, 0.15, 0.25, 0.3, 0.0, 0.0, 0.0, 0.0},
    {0.0, 0.0, 0.0, 0.0, 0.1, 0.15, 0.25, 0.25, 0.15, 0.1, 0.0},
    {0.0, 0.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.5},
    {0.0, 0.0, 0.0, 0.3, 0.4, 0.2, 0.1, 0.0, 0.0, 0.0, 0.0},
};

}  // namespace

SpaceBounds testbed_bounds() { return SpaceBounds{}; }

std::vector<Parameterization> build_testbed(int64_t case_id) {
	const SpaceBounds bounds = testbed_bounds();
	std::vector<Parameterization> out;

	if (case_id == 1) {
		const std::vector<double> mus = {3.0, 5.0, 7.0, 10.0};
		const std::vector<Family> fams = {Family::binom, Family::poisson,
		                                  Family::negbinom, Family::geometric};
		const std::vector<double> ps = {9.0, 39.0, 69.0, 99.0};
		const std::vector<int64_t> leads = {2, 4, 6, 8, 10};
		for (double mu : mus)
			for (Family fam : fams)
				for (double p : ps)
					for (int64_t lead : leads)
						out.push_back(make_instance(
						    p, {mu}, {fam},
						    deterministic_leadtime(lead, bounds.l_max), bounds));
		return out;
	}

	if (case_id == 2) {
		const std::vector<std::vector<std::vector<double>>> mu_sets = {
		    {{2.5, 4.5, 3.0}, {9.0, 11.0, 9.5}, {3.0, 6.0, 10.0}},
		    {{4.0, 2.5, 3.0, 4.5, 3.0},
		     {7.5, 11.5, 10.0, 9.5, 8.5},
		     {11.0, 3.0, 5.0, 8.0, 6.0}},
		    {{3.0, 4.0, 2.0, 3.5, 4.5, 2.5, 4.0},
		     {11.0, 10.0, 9.0, 10.0, 11.0, 8.5, 9.5},
		     {3.0, 5.0, 5.0, 7.0, 7.0, 10.0, 10.0}},
		};
		const std::vector<const std::vector<Family>*> combos = {&kLowCombo, &kHighCombo,
		                                                        &kMixCombo};
		const std::vector<double> ps = {9.0, 39.0, 69.0};
		const std::vector<int64_t> leads = {3, 6, 9};
		for (const auto& k_set : mu_sets)
			for (const auto& mu : k_set)
				for (const auto* combo : combos)
					for (double p : ps)
						for (int64_t lead : leads) {
							std::vector<Family> fams(combo->begin(),
							                         combo->begin() + mu.size());
							out.push_back(make_instance(
							    p, mu, fams,
							    deterministic_leadtime(lead, bounds.l_max), bounds));
						}
		return out;
	}

	if (case_id == 3) {
		const std::vector<std::vector<double>> mu_sets = {
		    {5.0},
		    {8.0, 10.0, 6.0},
		    {11.0, 3.0, 5.0, 8.0, 6.0},
		    {3.0, 5.0, 5.0, 7.0, 7.0, 10.0, 10.0},
		};
		const std::vector<double> ps = {9.0, 39.0, 69.0};
		for (int64_t crossover = 0; crossover <= 1; crossover++) {
			const auto& block = crossover ? kCase3Crossover : kCase3Sequential;
			for (const auto& probs : block)
				for (const auto& mu : mu_sets)
					for (double p : ps) {
						LeadTimeSpec lead;
						lead.crossover = crossover != 0;
						lead.probs = probs;
						std::vector<Family> fams(kMixCombo.begin(),
						                         kMixCombo.begin() + mu.size());
						out.push_back(make_instance(p, mu, fams, lead, bounds));
					}
		}
		return out;
	}

	throw Error("build_testbed: case must be 1, 2 or 3");
}

}  // namespace ted
