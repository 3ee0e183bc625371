#include "ted/estimate.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "ted/error.h"

namespace ted {

namespace {

using u128 = unsigned __int128;

u128 gcd128(u128 a, u128 b) {
	while (b != 0) {
		const u128 t = a % b;
		a = b;
		b = t;
	}
	return a;
}

// Exact survival fraction; degrades to double arithmetic if the reduced
// numerator or denominator outgrows 2^96 (censoring patterns can defeat the
// telescoping cancellation).
struct Survival {
	u128 num = 1, den = 1;
	bool exact = true;
	double approx = 1.0;

	void multiply(uint64_t a, uint64_t b) {  // *= a/b
		approx *= static_cast<double>(a) / static_cast<double>(b);
		if (!exact) return;
		const u128 lim = static_cast<u128>(1) << 96;
		if (num > lim / std::max<uint64_t>(a, 1) || den > lim / b) {
			exact = false;
			return;
		}
		num *= a;
		den *= b;
		const u128 g = gcd128(num, den);
		if (g > 1) {
			num /= g;
			den /= g;
		}
	}

	// F = 1 - num/den evaluated as one exact integer division
	double cdf_value() const {
		if (!exact) return 1.0 - approx;
		return static_cast<double>(den - num) / static_cast<double>(den);
	}
};

}  // namespace

std::vector<double> km_cdf(const std::vector<DemandObs>& obs, int64_t d_max) {
	if (obs.empty()) throw Error("km_cdf: no observations");
	if (d_max < 0) throw Error("km_cdf: negative d_max");

	// deaths (uncensored) and censored counts per observed value
	std::map<int64_t, std::pair<int64_t, int64_t>> groups;
	for (const auto& o : obs) {
		if (o.value < 0) throw Error("km_cdf: negative observation");
		auto& g = groups[std::min(o.value, d_max)];
		(o.censored ? g.second : g.first)++;
	}

	std::vector<double> cdf(d_max + 1, 0.0);
	Survival surv;
	auto it = groups.begin();
	int64_t at_risk = static_cast<int64_t>(obs.size());
	for (int64_t x = 0; x <= d_max; x++) {
		while (it != groups.end() && it->first == x) {
			const auto [deaths, censored] = it->second;
			if (deaths > 0) surv.multiply(at_risk - deaths, at_risk);
			at_risk -= deaths + censored;
			++it;
		}
		cdf[x] = surv.cdf_value();
	}
	cdf[d_max] = 1.0;  // residual survival mass sits at d_max
	return cdf;
}

std::pair<double, double> moments_from_cdf(const std::vector<double>& cdf,
                                           const SpaceBounds& bounds) {
	if (cdf.empty()) throw Error("moments_from_cdf: empty cdf");
	double mean = 0.0, second = 0.0, prev = 0.0;
	for (size_t x = 0; x < cdf.size(); x++) {
		const double mass = cdf[x] - prev;
		prev = cdf[x];
		mean += static_cast<double>(x) * mass;
		second += static_cast<double>(x) * static_cast<double>(x) * mass;
	}
	const double var = std::max(second - mean * mean, 0.0);
	const double mu = std::clamp(mean, bounds.mu_min, bounds.mu_max);
	const double sd = std::clamp(std::sqrt(var), sigma_min(mu), 2.0 * mu);
	return {mu, sd};
}

std::vector<double> leadtime_estimate(const std::vector<int64_t>& counts) {
	int64_t total = 0;
	for (int64_t c : counts) {
		if (c < 0) throw Error("leadtime_estimate: negative count");
		total += c;
	}
	if (total == 0) throw Error("leadtime_estimate: no arrivals recorded");
	std::vector<double> probs(counts.size());
	for (size_t j = 0; j < counts.size(); j++)
		probs[j] = static_cast<double>(counts[j]) / static_cast<double>(total);
	return probs;
}

Parameterization fallback_parameterization(const Parameterization& knowns,
                                           bool demand_known, bool leadtime_known,
                                           const SpaceBounds& bounds) {
	Parameterization out = knowns;
	if (!demand_known) {
		const int64_t cycle = knowns.demand.cycle_length;
		std::vector<double> mu(cycle, bounds.mu_max);
		std::vector<double> sigma(cycle, sigma_min(bounds.mu_max));
		out.demand = make_demand_spec(std::move(mu), std::move(sigma), bounds.epsilon);
	}
	if (!leadtime_known)
		out.leadtime = deterministic_leadtime(bounds.l_max, bounds.l_max);
	return out;
}

EstimatorState::EstimatorState(const Parameterization& truth, bool demand_known,
                               bool leadtime_known, const SpaceBounds& bounds,
                               const EngineLimits& limits)
    : truth_(truth),
      demand_known_(demand_known),
      leadtime_known_(leadtime_known),
      bounds_(bounds),
      limits_(limits),
      demand_logs_(truth.demand.cycle_length),
      lead_counts_(bounds.l_max + 1, 0) {}

void EstimatorState::update(const Observation& obs) {
	if (!demand_known_ && obs.demand_observed)
		demand_logs_[obs.phase].push_back(DemandObs{obs.sale, obs.censored});
	if (!leadtime_known_) {
		for (int64_t lead : obs.arrival_leads) {
			lead_counts_[std::min<int64_t>(lead, bounds_.l_max)]++;
			lead_total_++;
		}
	}
}

Parameterization EstimatorState::assemble() const {
	Parameterization out = truth_;
	if (!demand_known_) {
		const int64_t cycle = truth_.demand.cycle_length;
		std::vector<double> mu(cycle), sigma(cycle);
		for (int64_t j = 0; j < cycle; j++) {
			if (demand_logs_[j].empty()) {
				// no informative sale yet in this phase
				mu[j] = bounds_.mu_max;
				sigma[j] = sigma_min(bounds_.mu_max);
			} else {
				const auto cdf = km_cdf(demand_logs_[j], limits_.d_max);
				std::tie(mu[j], sigma[j]) = moments_from_cdf(cdf, bounds_);
			}
		}
		out.demand = make_demand_spec(std::move(mu), std::move(sigma), bounds_.epsilon);
	}
	if (!leadtime_known_) {
		if (lead_total_ == 0) {
			out.leadtime = deterministic_leadtime(bounds_.l_max, bounds_.l_max);
		} else {
			out.leadtime.probs = leadtime_estimate(lead_counts_);
			out.leadtime.crossover = truth_.leadtime.crossover;
		}
	}
	return out;
}

}  // namespace ted
