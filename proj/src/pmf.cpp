#include "ted/pmf.h"

#include <algorithm>
#include <cmath>

#include "ted/error.h"

namespace ted {

namespace {

constexpr double kTailEps = 1e-15;   // mass left in the untabulated tail
constexpr int64_t kSupportCap = 1 << 20;

Pmf binomial_pmf(int64_t n, double q) {
	if (n == 0 || q >= 1.0 - 1e-14) {
		// success probability one collapses to a point mass at n
		Pmf pm;
		pm.probs.assign(n + 1, 0.0);
		pm.probs[n] = 1.0;
		return pm;
	}
	Pmf pm;
	pm.probs.resize(n + 1);
	double term = std::pow(1.0 - q, static_cast<double>(n));
	const double ratio = q / (1.0 - q);
	for (int64_t x = 0; x <= n; x++) {
		pm.probs[x] = term;
		if (x < n) term *= ratio * static_cast<double>(n - x) / static_cast<double>(x + 1);
	}
	return pm;
}

// failures before the r-th success; r = 0 is a point mass at zero
Pmf neg_binomial_pmf(int64_t r, double q) {
	if (r == 0) return Pmf::point_mass(0);
	Pmf pm;
	double term = std::pow(q, static_cast<double>(r));
	double cum = 0.0;
	for (int64_t x = 0; x < kSupportCap; x++) {
		pm.probs.push_back(term);
		cum += term;
		// the accumulated sum can round to just under one, so a vanishing
		// term is the second stopping signal
		if (1.0 - cum < kTailEps || term < 1e-21) break;
		term *= (1.0 - q) * static_cast<double>(x + r) / static_cast<double>(x + 1);
	}
	return pm;
}

Pmf poisson_pmf(double lambda) {
	Pmf pm;
	double term = std::exp(-lambda);
	double cum = 0.0;
	for (int64_t x = 0; x < kSupportCap; x++) {
		pm.probs.push_back(term);
		cum += term;
		if (x >= static_cast<int64_t>(lambda) &&
		    (1.0 - cum < kTailEps || term < 1e-21))
			break;
		term *= lambda / static_cast<double>(x + 1);
	}
	return pm;
}

Pmf mix(double w, const Pmf& a, const Pmf& b) {
	Pmf pm;
	pm.probs.assign(std::max(a.probs.size(), b.probs.size()), 0.0);
	for (size_t i = 0; i < a.probs.size(); i++) pm.probs[i] += w * a.probs[i];
	for (size_t i = 0; i < b.probs.size(); i++) pm.probs[i] += (1.0 - w) * b.probs[i];
	return pm;
}

// Weight on the shape-k component of a mixture of Bin(k,q)/Bin(k+1,q).
// Solves (a+1) w^2 - 2 (a K1 + 1) w + (a K1^2 + K1) = 0 with K1 = k+1,
// where a = (sigma^2 - mu)/mu^2; the larger root lies in [0, 1].
bool solve_binomial_mixture(double mu, double a, int64_t k, double& w, double& q) {
	if (k < 1) return false;
	const double K1 = static_cast<double>(k) + 1.0;
	const double disc = -static_cast<double>(k) * (a * K1 + 1.0);
	if (disc < -1e-9 || a + 1.0 <= 1e-14) return false;
	w = (a * K1 + 1.0 + std::sqrt(std::max(disc, 0.0))) / (a + 1.0);
	if (w < -1e-9 || w > 1.0 + 1e-9) return false;
	w = std::clamp(w, 0.0, 1.0);
	const double c = K1 - w;
	q = mu / c;
	if (q <= 0.0 || q > 1.0 + 1e-9) return false;
	q = std::min(q, 1.0);
	return true;
}

// Weight on the shape-k component of a mixture of NB(k,q)/NB(k+1,q); the
// shape-0 component is a point mass at zero, covering dispersion beyond the
// pure geometric.
bool solve_nb_mixture(double mu, double a, int64_t k, double& w, double& q) {
	if (k < 0) return false;
	const double K1 = static_cast<double>(k) + 1.0;
	const double disc = K1 * (1.0 - a * static_cast<double>(k));
	if (disc < -1e-9) return false;
	w = (a * K1 - std::sqrt(std::max(disc, 0.0))) / (a + 1.0);
	if (w < -1e-9 || w > 1.0 + 1e-9) return false;
	w = std::clamp(w, 0.0, 1.0);
	const double c = K1 - w;
	const double beta = mu / c;
	q = 1.0 / (1.0 + beta);
	return q > 0.0 && q < 1.0;
}

}  // namespace

double Pmf::mean() const {
	double m = 0.0;
	for (size_t x = 0; x < probs.size(); x++) m += static_cast<double>(x) * probs[x];
	return m;
}

double Pmf::variance() const {
	const double m = mean();
	double s = 0.0;
	for (size_t x = 0; x < probs.size(); x++) {
		const double d = static_cast<double>(x) - m;
		s += d * d * probs[x];
	}
	return s;
}

double Pmf::std_dev() const { return std::sqrt(std::max(variance(), 0.0)); }

std::vector<double> Pmf::cdf() const {
	std::vector<double> c(probs.size());
	double cum = 0.0;
	for (size_t x = 0; x < probs.size(); x++) {
		cum += probs[x];
		c[x] = cum;
	}
	return c;
}

int64_t Pmf::fractile(double q) const {
	double cum = 0.0;
	for (size_t x = 0; x < probs.size(); x++) {
		cum += probs[x];
		if (cum >= q) return static_cast<int64_t>(x);
	}
	return d_max();
}

Pmf Pmf::convolve(const Pmf& other) const {
	Pmf out;
	out.probs.assign(probs.size() + other.probs.size() - 1, 0.0);
	for (size_t i = 0; i < probs.size(); i++) {
		if (probs[i] == 0.0) continue;
		for (size_t j = 0; j < other.probs.size(); j++)
			out.probs[i + j] += probs[i] * other.probs[j];
	}
	return out;
}

Pmf Pmf::point_mass(int64_t value) {
	Pmf pm;
	pm.probs.assign(value + 1, 0.0);
	pm.probs[value] = 1.0;
	return pm;
}

bool Pmf::valid(double tol) const {
	if (probs.empty()) return false;
	double sum = 0.0;
	for (double p : probs) {
		if (!(p >= 0.0) || !std::isfinite(p)) return false;
		sum += p;
	}
	return std::abs(sum - 1.0) <= tol;
}

PmfSampler::PmfSampler(const Pmf& pmf) : cdf_(pmf.cdf()) {}

int64_t PmfSampler::sample_from_u(double u) const {
	auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
	if (it == cdf_.end()) return static_cast<int64_t>(cdf_.size()) - 1;
	return static_cast<int64_t>(it - cdf_.begin());
}

int64_t PmfSampler::sample(RngStream& rng) const { return sample_from_u(rng.next_double()); }

double sigma_min(double mu) {
	const double f = mu - std::floor(mu);
	return std::sqrt(f * (1.0 - f));
}

Pmf fit_two_moment(double mu, double sigma) {
	if (!(mu > 0.0)) throw Error("fit_two_moment: mean must be positive");
	const double smin = sigma_min(mu);
	if (sigma < smin - 1e-9 || sigma > 2.0 * mu + 1e-9)
		throw Error("fit_two_moment: infeasible (mu, sigma) pair");
	sigma = std::clamp(sigma, smin, 2.0 * mu);
	const double var = sigma * sigma;

	if (std::abs(var - mu) <= 1e-9 * std::max(1.0, mu)) return poisson_pmf(mu);

	const double a = (var - mu) / (mu * mu);
	double w, q;
	if (a < 0.0) {
		if (a <= -1.0 + 1e-12) {
			// two-point support {0, 1}
			return mix(1.0 - mu, Pmf::point_mass(0), Pmf::point_mass(1));
		}
		const auto k0 = static_cast<int64_t>(std::floor(-1.0 / a));
		for (int64_t k : {k0, k0 - 1, k0 + 1}) {
			if (solve_binomial_mixture(mu, a, k, w, q))
				return mix(w, binomial_pmf(k, q), binomial_pmf(k + 1, q));
		}
		throw Error("fit_two_moment: binomial mixture solve failed");
	}
	const auto k0 = static_cast<int64_t>(std::floor(1.0 / a));
	for (int64_t k : {k0, k0 - 1, k0 + 1}) {
		if (solve_nb_mixture(mu, a, k, w, q))
			return mix(w, neg_binomial_pmf(k, q), neg_binomial_pmf(k + 1, q));
	}
	throw Error("fit_two_moment: negative binomial mixture solve failed");
}

Pmf truncate_renormalize(const Pmf& pmf, double eps) {
	// smallest x whose upper tail holds mass below eps
	std::vector<double> suffix(pmf.probs.size() + 1, 0.0);
	for (size_t x = pmf.probs.size(); x-- > 0;) suffix[x] = suffix[x + 1] + pmf.probs[x];
	size_t top = pmf.probs.size() - 1;
	for (size_t x = 0; x < pmf.probs.size(); x++) {
		if (suffix[x + 1] < eps) {
			top = x;
			break;
		}
	}
	Pmf out;
	out.probs.assign(pmf.probs.begin(), pmf.probs.begin() + top + 1);
	double kept = 0.0;
	for (double p : out.probs) kept += p;
	for (double& p : out.probs) p /= kept;
	return out;
}

}  // namespace ted
