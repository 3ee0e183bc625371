#pragma once

#include <cstdint>
#include <vector>

#include "ted/rng.h"

namespace ted {

// Probability mass function on {0, 1, .., D_max} with D_max = probs.size()-1.
struct Pmf {
	std::vector<double> probs;

	int64_t d_max() const { return static_cast<int64_t>(probs.size()) - 1; }
	double mean() const;
	double variance() const;
	double std_dev() const;

	// cumulative masses, cdf()[x] = P(X <= x)
	std::vector<double> cdf() const;

	// smallest x with P(X <= x) >= q
	int64_t fractile(double q) const;

	// distribution of the sum of two independent draws
	Pmf convolve(const Pmf& other) const;

	static Pmf point_mass(int64_t value);
	static Pmf zero() { return point_mass(0); }

	// checks nonnegativity and total mass 1 within tol
	bool valid(double tol = 1e-12) const;
};

// Precomputed cdf for repeated inverse-cdf sampling with one uniform draw.
class PmfSampler {
public:
	PmfSampler() = default;
	explicit PmfSampler(const Pmf& pmf);
	int64_t sample(RngStream& rng) const;
	int64_t sample_from_u(double u) const;

private:
	std::vector<double> cdf_;
};

// Minimum feasible standard deviation of an integer-supported distribution
// with mean mu: attained by the two-point law on {floor(mu), ceil(mu)}.
double sigma_min(double mu);

// Fits a discrete distribution on {0,1,..} matching the first two moments.
// Dispersion selects the family: variance below the mean gives a mixture of
// two binomials with common success probability, equality gives Poisson, and
// excess dispersion gives a mixture of two negative binomials with common
// success probability (pure geometric at variance mu^2 + mu). Throws on
// sigma outside [sigma_min(mu), 2*mu].
Pmf fit_two_moment(double mu, double sigma);

// Removes the upper tail with cumulative mass below eps and rescales the
// remaining masses so they sum to one. Relative ratios of surviving masses
// are preserved exactly.
Pmf truncate_renormalize(const Pmf& pmf, double eps);

}  // namespace ted
