#include <doctest.h>

#include <cmath>

#include "ted/error.h"
#include "ted/pmf.h"
#include "ted/rng.h"

using namespace ted;

TEST_CASE("sigma_min") {
	CHECK(sigma_min(3.0) == doctest::Approx(0.0));
	CHECK(sigma_min(3.5) == doctest::Approx(0.5));
	CHECK(sigma_min(2.25) == doctest::Approx(std::sqrt(0.1875)));
}

TEST_CASE("equidispersion selects the poisson branch") {
	const Pmf pm = fit_two_moment(5.0, std::sqrt(5.0));
	// compare against directly computed poisson masses
	double term = std::exp(-5.0);
	for (int64_t x = 0; x <= 20; x++) {
		CHECK(pm.probs[x] == doctest::Approx(term).epsilon(1e-10));
		term *= 5.0 / static_cast<double>(x + 1);
	}
	CHECK(pm.mean() == doctest::Approx(5.0).epsilon(1e-9));
	CHECK(pm.variance() == doctest::Approx(5.0).epsilon(1e-8));
}

TEST_CASE("variance mu^2+mu is the pure geometric") {
	// solve (1-q)/q = 10, (1-q)/q^2 = 110 -> q = 1/11
	const Pmf pm = fit_two_moment(10.0, std::sqrt(110.0));
	const double q = 1.0 / 11.0;
	double term = q;
	for (int64_t x = 0; x <= 40; x++) {
		CHECK(pm.probs[x] == doctest::Approx(term).epsilon(1e-9));
		term *= 1.0 - q;
	}
}

TEST_CASE("underdispersed fit is a binomial mixture with exact moments") {
	const Pmf pm = fit_two_moment(4.0, 1.0);
	// brute-force moment summation of the returned pmf
	double mean = 0.0, second = 0.0;
	for (size_t x = 0; x < pm.probs.size(); x++) {
		mean += x * pm.probs[x];
		second += static_cast<double>(x) * x * pm.probs[x];
	}
	CHECK(mean == doctest::Approx(4.0).epsilon(1e-10));
	CHECK(second - mean * mean == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("moment contract holds across the sampled range") {
	RngStream rng(20240811);
	for (int64_t trial = 0; trial < 500; trial++) {
		const double mu = rng.next_real(2.0, 12.0);
		const double sigma = rng.next_real(sigma_min(mu) + 1e-6, 2.0 * mu);
		const Pmf pm = fit_two_moment(mu, sigma);
		REQUIRE(pm.valid());
		CHECK(std::abs(pm.mean() - mu) <= 1e-8);
		CHECK(std::abs(pm.variance() - sigma * sigma) <= 1e-6);
	}
}

TEST_CASE("boundary fits: point mass and two-point support") {
	const Pmf point = fit_two_moment(7.0, 0.0);
	CHECK(point.probs[7] == doctest::Approx(1.0));
	const Pmf two = fit_two_moment(3.5, 0.5);
	CHECK(two.probs[3] == doctest::Approx(0.5));
	CHECK(two.probs[4] == doctest::Approx(0.5));
}

TEST_CASE("infeasible dispersion is rejected") {
	CHECK_THROWS_AS(fit_two_moment(3.5, 0.1), Error);       // below sigma_min
	CHECK_THROWS_AS(fit_two_moment(5.0, 10.5), Error);      // above 2*mu
	CHECK_THROWS_AS(fit_two_moment(0.0, 1.0), Error);
}

TEST_CASE("truncation cuts the thin upper tail") {
	Pmf pm;
	pm.probs = {0.3, 0.2, 0.2, 0.1, 0.1, 0.05, 0.03, 0.015, 0.004999, 1e-6};
	// P(X > 8) = 1e-6 < 1e-4 while P(X > 7) is above the threshold
	const Pmf cut = truncate_renormalize(pm, 1e-4);
	CHECK(cut.d_max() == 8);
	double sum = 0.0;
	for (double q : cut.probs) sum += q;
	CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("truncating a point mass changes nothing") {
	const Pmf pm = Pmf::point_mass(3);
	const Pmf cut = truncate_renormalize(pm, 1e-4);
	CHECK(cut.d_max() == 3);
	CHECK(cut.probs[3] == doctest::Approx(1.0));
}

TEST_CASE("truncation point matches direct tail summation on a geometric") {
	const Pmf geo = fit_two_moment(10.0, std::sqrt(110.0));
	const double eps = 1e-4;
	const Pmf cut = truncate_renormalize(geo, eps);
	// independent oracle: smallest x whose upper tail is below eps
	int64_t expected = geo.d_max();
	for (int64_t x = 0; x <= geo.d_max(); x++) {
		double tail = 0.0;
		for (int64_t y = x + 1; y <= geo.d_max(); y++) tail += geo.probs[y];
		if (tail < eps) {
			expected = x;
			break;
		}
	}
	CHECK(cut.d_max() == expected);
}

TEST_CASE("truncation preserves surviving mass ratios") {
	const Pmf geo = fit_two_moment(8.0, 10.0);
	const Pmf cut = truncate_renormalize(geo, 1e-4);
	for (int64_t x = 1; x <= cut.d_max(); x++) {
		const double before = geo.probs[x] / geo.probs[0];
		const double after = cut.probs[x] / cut.probs[0];
		CHECK(after == doctest::Approx(before).epsilon(1e-14));
	}
}

TEST_CASE("post-truncation mean drift stays within eps * d_max") {
	// d_max of the fitted pmf bounds every removed outcome, so the drift of
	// the renormalized mean is at most the removed mass times that top
	RngStream rng(7);
	for (int64_t trial = 0; trial < 200; trial++) {
		const double mu = rng.next_real(2.0, 12.0);
		const double sigma = rng.next_real(sigma_min(mu) + 1e-6, 2.0 * mu);
		const double eps = 1e-4;
		const Pmf fitted = fit_two_moment(mu, sigma);
		const Pmf cut = truncate_renormalize(fitted, eps);
		CHECK(std::abs(cut.mean() - mu) <=
		      eps * static_cast<double>(fitted.d_max()) + 1e-9);
	}
}

TEST_CASE("fractile is the smallest x reaching the target mass") {
	const Pmf pois5 = fit_two_moment(5.0, std::sqrt(5.0));
	CHECK(pois5.fractile(0.9) == 8);    // P(<=7) ~ 0.8666, P(<=8) ~ 0.9319
	CHECK(pois5.fractile(0.5) == 5);    // P(<=4) ~ 0.4405, P(<=5) ~ 0.6160
	CHECK(Pmf::point_mass(4).fractile(0.999) == 4);
}

TEST_CASE("inverse-cdf sampling reproduces the pmf") {
	const Pmf pm = fit_two_moment(3.0, 2.0);
	const PmfSampler sampler(pm);
	RngStream rng(99);
	std::vector<int64_t> counts(pm.probs.size(), 0);
	const int64_t n = 200000;
	for (int64_t i = 0; i < n; i++) counts[sampler.sample(rng)]++;
	double l1 = 0.0;
	for (size_t x = 0; x < counts.size(); x++)
		l1 += std::abs(static_cast<double>(counts[x]) / n - pm.probs[x]);
	CHECK(l1 < 0.02);
}
