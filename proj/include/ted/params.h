#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ted/pmf.h"
#include "ted/rng.h"

namespace ted {

// Bounds of the probable parameter space. Defaults follow the engine's
// standard configuration: h is pinned to 1 and the remaining components are
// sampled within these ranges.
struct SpaceBounds {
	double p_min = 2.0;
	double p_max = 100.0;
	double mu_min = 2.0;
	double mu_max = 12.0;
	int64_t k_max = 7;
	int64_t l_max = 10;
	double epsilon = 1e-4;  // demand tail truncation threshold

	void validate() const;  // throws on malformed bounds
};

// Cyclic demand description: one (mean, std) pair and fitted pmf per phase.
struct DemandSpec {
	int64_t cycle_length = 1;
	std::vector<double> mu;
	std::vector<double> sigma;
	std::vector<Pmf> pmfs;  // truncated, these drive the simulator
};

// Lead time description. probs[j] is the chance an order takes j periods;
// crossover says whether a later order may overtake an earlier one.
struct LeadTimeSpec {
	bool crossover = false;
	std::vector<double> probs;  // size l_max + 1

	bool deterministic() const;
	int64_t min_lead() const;
	int64_t max_lead() const;
	double mean() const;
};

struct Parameterization {
	double h = 1.0;
	double p = 0.0;
	DemandSpec demand;
	LeadTimeSpec leadtime;
};

// Array-size constants shared by every instance of one engine: derived from
// the most dispersed admissible demand (mu_max, 2*mu_max) and the largest
// admissible penalty fractile, so the state/action space is universal.
struct EngineLimits {
	int64_t d_max = 0;     // top of the widest truncated demand support
	int64_t m = 0;         // action-space top (order sizes 0..m)
	int64_t i_max = 0;     // inventory-position bound of the widest instance
};

EngineLimits compute_limits(const SpaceBounds& bounds);

// Fits per-phase pmfs from moments and truncates them at eps.
DemandSpec make_demand_spec(std::vector<double> mu, std::vector<double> sigma, double eps);

LeadTimeSpec deterministic_leadtime(int64_t lead, int64_t l_max);

LeadTimeSpec sample_leadtime(const SpaceBounds& bounds, RngStream& rng);
Parameterization sample_parameterization(const SpaceBounds& bounds, RngStream& rng);

// throws when a field violates the probable-space invariants
void validate_parameterization(const Parameterization& p, const SpaceBounds& bounds);

// One-line text record: h p K mu_0..mu_{K-1} sigma_0..sigma_{K-1} l p_0..p_Lmax.
std::string to_record(const Parameterization& p);
Parameterization from_record(const std::string& line, const SpaceBounds& bounds);

}  // namespace ted
