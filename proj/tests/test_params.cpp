#include <doctest.h>

#include <cmath>

#include "ted/error.h"
#include "ted/params.h"

using namespace ted;

namespace {

SpaceBounds reduced_bounds() {
	SpaceBounds b;
	b.p_min = 4.0;
	b.p_max = 19.0;
	b.mu_min = 2.0;
	b.mu_max = 4.0;
	b.k_max = 2;
	b.l_max = 2;
	return b;
}

}  // namespace

TEST_CASE("sampled parameterizations respect every bound") {
	const SpaceBounds bounds;  // default space
	RngStream rng(5);
	for (int64_t trial = 0; trial < 2000; trial++) {
		const Parameterization p = sample_parameterization(bounds, rng);
		CHECK_NOTHROW(validate_parameterization(p, bounds));
	}
}

TEST_CASE("degenerate cycle bound forces K = 1") {
	SpaceBounds bounds = reduced_bounds();
	bounds.k_max = 1;
	RngStream rng(6);
	for (int64_t trial = 0; trial < 200; trial++)
		CHECK(sample_parameterization(bounds, rng).demand.cycle_length == 1);
}

TEST_CASE("cycle lengths are uniform across draws") {
	const SpaceBounds bounds;  // k_max = 7
	RngStream rng(77);
	std::vector<int64_t> counts(bounds.k_max + 1, 0);
	const int64_t n = 100000;
	for (int64_t i = 0; i < n; i++)
		counts[sample_parameterization(bounds, rng).demand.cycle_length]++;
	for (int64_t k = 1; k <= bounds.k_max; k++) {
		const double freq = static_cast<double>(counts[k]) / n;
		CHECK(std::abs(freq - 1.0 / bounds.k_max) < 0.02);
	}
}

TEST_CASE("sampling is reproducible bit for bit") {
	const SpaceBounds bounds;
	RngStream a(123), b(123);
	for (int64_t trial = 0; trial < 50; trial++) {
		const Parameterization pa = sample_parameterization(bounds, a);
		const Parameterization pb = sample_parameterization(bounds, b);
		CHECK(pa.p == pb.p);
		REQUIRE(pa.demand.mu == pb.demand.mu);
		REQUIRE(pa.demand.sigma == pb.demand.sigma);
		REQUIRE(pa.leadtime.probs == pb.leadtime.probs);
		CHECK(pa.leadtime.crossover == pb.leadtime.crossover);
	}
}

TEST_CASE("lead-time samples are valid distributions") {
	const SpaceBounds bounds;
	RngStream rng(9);
	int64_t uniform_windows = 0, stochastic = 0;
	for (int64_t trial = 0; trial < 10000; trial++) {
		const LeadTimeSpec lt = sample_leadtime(bounds, rng);
		double total = 0.0;
		for (double q : lt.probs) {
			REQUIRE(q >= 0.0);
			total += q;
		}
		CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
		if (lt.deterministic()) {
			CHECK_FALSE(lt.crossover);
		} else {
			stochastic++;
			// detect the equal-mass assignment scheme
			const int64_t lo = lt.min_lead(), hi = lt.max_lead();
			bool equal = true;
			for (int64_t j = lo; j <= hi; j++)
				equal &= std::abs(lt.probs[j] - lt.probs[lo]) < 1e-12;
			if (equal) uniform_windows++;
		}
	}
	// one of three equally likely schemes assigns the window uniformly
	const double frac = static_cast<double>(uniform_windows) / stochastic;
	CHECK(frac > 0.25);
	CHECK(frac < 0.45);
}

TEST_CASE("deterministic window yields a point lead time without crossover") {
	SpaceBounds bounds = reduced_bounds();
	bounds.l_max = 0;  // forces lo == hi == 0
	RngStream rng(4);
	const LeadTimeSpec lt = sample_leadtime(bounds, rng);
	CHECK(lt.deterministic());
	CHECK_FALSE(lt.crossover);
	CHECK(lt.probs[0] == doctest::Approx(1.0));
}

TEST_CASE("text records round-trip exactly") {
	const SpaceBounds bounds;
	RngStream rng(31);
	for (int64_t trial = 0; trial < 100; trial++) {
		const Parameterization p = sample_parameterization(bounds, rng);
		const Parameterization q = from_record(to_record(p), bounds);
		CHECK(q.h == p.h);
		CHECK(q.p == p.p);
		REQUIRE(q.demand.mu == p.demand.mu);
		REQUIRE(q.demand.sigma == p.demand.sigma);
		CHECK(q.leadtime.crossover == p.leadtime.crossover);
		REQUIRE(q.leadtime.probs == p.leadtime.probs);
		// refit pmfs are bit-identical because the fit is deterministic
		for (int64_t j = 0; j < p.demand.cycle_length; j++)
			REQUIRE(q.demand.pmfs[j].probs == p.demand.pmfs[j].probs);
	}
}

TEST_CASE("malformed records are rejected") {
	const SpaceBounds bounds;
	CHECK_THROWS_AS(from_record("1.0 5.0", bounds), Error);
	CHECK_THROWS_AS(from_record("", bounds), Error);
	CHECK_THROWS_AS(from_record("1 5 1 3 1 0 bogus", bounds), Error);
}

TEST_CASE("engine limits derive from the widest admissible demand") {
	const SpaceBounds bounds = reduced_bounds();
	const EngineLimits lim = compute_limits(bounds);
	const Pmf widest = truncate_renormalize(fit_two_moment(4.0, 8.0), bounds.epsilon);
	CHECK(lim.d_max == widest.d_max());
	CHECK(lim.m == widest.fractile(19.0 / 20.0));
	CHECK(lim.i_max >= lim.m);
}

TEST_CASE("bounds validation rejects malformed spaces") {
	SpaceBounds b;
	b.p_min = 0.5;
	CHECK_THROWS_AS(b.validate(), Error);
	b = SpaceBounds{};
	b.epsilon = 0.5;
	CHECK_THROWS_AS(b.validate(), Error);
	b = SpaceBounds{};
	b.mu_min = -1.0;
	CHECK_THROWS_AS(b.validate(), Error);
}
