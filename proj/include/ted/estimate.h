#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ted/mdp.h"
#include "ted/params.h"

namespace ted {

struct DemandObs {
	int64_t value = 0;   // observed sale
	bool censored = false;
};

// Product-limit CDF over {0..d_max} with the deaths-before-censoring tie
// convention; censored-at-v observations stay at risk at v. Residual survival
// mass beyond the largest uncensored value is assigned to d_max, the
// conservative anti-understocking placement. With no censored entries the
// result equals the empirical CDF bit for bit.
std::vector<double> km_cdf(const std::vector<DemandObs>& obs, int64_t d_max);

// Mean and standard deviation of the pmf implied by a CDF, clamped into the
// probable space so downstream featurization never sees out-of-space values.
std::pair<double, double> moments_from_cdf(const std::vector<double>& cdf,
                                           const SpaceBounds& bounds);

// relative frequencies; throws on an all-zero count vector
std::vector<double> leadtime_estimate(const std::vector<int64_t>& counts);

// Provisional stand-in before any data: unobserved demand phases become
// deterministic mu_max, an unobserved lead time becomes deterministic l_max
// without crossover. Known components pass through.
Parameterization fallback_parameterization(const Parameterization& knowns,
                                           bool demand_known, bool leadtime_known,
                                           const SpaceBounds& bounds);

// Accumulated censored demand and lead-time observations for one trajectory,
// plus the declared-known components of the truth.
class EstimatorState {
public:
	EstimatorState(const Parameterization& truth, bool demand_known,
	               bool leadtime_known, const SpaceBounds& bounds,
	               const EngineLimits& limits);

	// appends the period's sale to its phase log and the realized lead
	// times to the arrival counts; periods with no stock carry no demand
	// information and leave the demand logs untouched
	void update(const Observation& obs);

	// current estimate fed to the policy: estimated components are refit
	// through the two-moment family so the result is a valid parameterization
	Parameterization assemble() const;

	bool demand_known() const { return demand_known_; }
	bool leadtime_known() const { return leadtime_known_; }
	const std::vector<std::vector<DemandObs>>& demand_logs() const { return demand_logs_; }
	const std::vector<int64_t>& lead_counts() const { return lead_counts_; }

private:
	Parameterization truth_;
	bool demand_known_;
	bool leadtime_known_;
	SpaceBounds bounds_;
	EngineLimits limits_;
	std::vector<std::vector<DemandObs>> demand_logs_;  // per phase
	std::vector<int64_t> lead_counts_;                 // per lead value
	int64_t lead_total_ = 0;
};

}  // namespace ted
