#include "ted/params.h"

#include <algorithm>
#include <cmath>

#include "ted/error.h"
#include "ted/textio.h"

namespace ted {

void SpaceBounds::validate() const {
	if (!(p_min >= 1.0)) throw Error("bounds: p_min must be at least the holding cost");
	if (!(p_max >= p_min)) throw Error("bounds: p_max below p_min");
	if (!(mu_min > 0.0)) throw Error("bounds: mu_min must be positive");
	if (!(mu_max >= mu_min)) throw Error("bounds: mu_max below mu_min");
	if (k_max < 1) throw Error("bounds: k_max must be at least 1");
	if (l_max < 0) throw Error("bounds: l_max must be nonnegative");
	if (!(epsilon > 0.0 && epsilon < 1e-2)) throw Error("bounds: epsilon outside (0, 1e-2)");
}

bool LeadTimeSpec::deterministic() const {
	for (double q : probs)
		if (q > 0.0 && q < 1.0) return false;
	return true;
}

int64_t LeadTimeSpec::min_lead() const {
	for (size_t j = 0; j < probs.size(); j++)
		if (probs[j] > 0.0) return static_cast<int64_t>(j);
	return 0;
}

int64_t LeadTimeSpec::max_lead() const {
	for (size_t j = probs.size(); j-- > 0;)
		if (probs[j] > 0.0) return static_cast<int64_t>(j);
	return 0;
}

double LeadTimeSpec::mean() const {
	double m = 0.0;
	for (size_t j = 0; j < probs.size(); j++) m += static_cast<double>(j) * probs[j];
	return m;
}

EngineLimits compute_limits(const SpaceBounds& bounds) {
	bounds.validate();
	const Pmf widest = truncate_renormalize(
	    fit_two_moment(bounds.mu_max, 2.0 * bounds.mu_max), bounds.epsilon);
	EngineLimits lim;
	lim.d_max = widest.d_max();
	const double frac = bounds.p_max / (bounds.p_max + 1.0);
	lim.m = widest.fractile(frac);
	Pmf over_lead = widest;
	for (int64_t j = 0; j < bounds.l_max; j++) over_lead = over_lead.convolve(widest);
	lim.i_max = over_lead.fractile(frac);
	return lim;
}

DemandSpec make_demand_spec(std::vector<double> mu, std::vector<double> sigma, double eps) {
	if (mu.empty() || mu.size() != sigma.size())
		throw Error("demand spec: mean/std vectors must be nonempty and equal-sized");
	DemandSpec d;
	d.cycle_length = static_cast<int64_t>(mu.size());
	d.mu = std::move(mu);
	d.sigma = std::move(sigma);
	d.pmfs.reserve(d.mu.size());
	for (size_t j = 0; j < d.mu.size(); j++)
		d.pmfs.push_back(truncate_renormalize(fit_two_moment(d.mu[j], d.sigma[j]), eps));
	return d;
}

LeadTimeSpec deterministic_leadtime(int64_t lead, int64_t l_max) {
	if (lead < 0 || lead > l_max) throw Error("lead time outside [0, l_max]");
	LeadTimeSpec lt;
	lt.crossover = false;
	lt.probs.assign(l_max + 1, 0.0);
	lt.probs[lead] = 1.0;
	return lt;
}

LeadTimeSpec sample_leadtime(const SpaceBounds& bounds, RngStream& rng) {
	const int64_t lo = rng.next_int(0, bounds.l_max);
	const int64_t hi = rng.next_int(lo, bounds.l_max);
	if (lo == hi) return deterministic_leadtime(lo, bounds.l_max);

	LeadTimeSpec lt;
	lt.crossover = rng.next_double() < 0.5;
	lt.probs.assign(bounds.l_max + 1, 0.0);
	const int64_t scheme = rng.next_int(3);
	if (scheme == 0) {
		// uniform over the window
		const double u = 1.0 / static_cast<double>(hi - lo + 1);
		for (int64_t j = lo; j <= hi; j++) lt.probs[j] = u;
	} else if (scheme == 1) {
		// two-moment fit at the window midpoint; the window half-width serves
		// as the fit's standard deviation, then the result is restricted to
		// the window and renormalized
		const double mid = 0.5 * static_cast<double>(lo + hi);
		const double hw = 0.5 * static_cast<double>(hi - lo);
		const Pmf fitted = fit_two_moment(mid, hw);
		double kept = 0.0;
		for (int64_t j = lo; j <= hi && j <= fitted.d_max(); j++) kept += fitted.probs[j];
		for (int64_t j = lo; j <= hi && j <= fitted.d_max(); j++)
			lt.probs[j] = fitted.probs[j] / kept;
	} else {
		// random positive masses, normalized
		double total = 0.0;
		for (int64_t j = lo; j <= hi; j++) {
			lt.probs[j] = 1.0 - rng.next_double();  // in (0, 1]
			total += lt.probs[j];
		}
		for (int64_t j = lo; j <= hi; j++) lt.probs[j] /= total;
	}
	return lt;
}

Parameterization sample_parameterization(const SpaceBounds& bounds, RngStream& rng) {
	Parameterization p;
	p.h = 1.0;
	p.p = rng.next_real(bounds.p_min, bounds.p_max);
	const int64_t cycle = rng.next_int(1, bounds.k_max);
	std::vector<double> mu(cycle), sigma(cycle);
	for (int64_t j = 0; j < cycle; j++) {
		mu[j] = rng.next_real(bounds.mu_min, bounds.mu_max);
		// offset above sigma_min keeps the binomial-mixture fit well posed
		sigma[j] = rng.next_real(sigma_min(mu[j]) + 1e-6, 2.0 * mu[j]);
	}
	p.demand = make_demand_spec(std::move(mu), std::move(sigma), bounds.epsilon);
	p.leadtime = sample_leadtime(bounds, rng);
	return p;
}

void validate_parameterization(const Parameterization& p, const SpaceBounds& bounds) {
	if (p.h != 1.0) throw Error("parameterization: holding cost must be 1");
	if (p.p < bounds.p_min - 1e-9 || p.p > bounds.p_max + 1e-9)
		throw Error("parameterization: penalty cost outside bounds");
	const auto& d = p.demand;
	if (d.cycle_length < 1 || d.cycle_length > bounds.k_max)
		throw Error("parameterization: cycle length outside bounds");
	if (static_cast<int64_t>(d.mu.size()) != d.cycle_length ||
	    d.sigma.size() != d.mu.size() || d.pmfs.size() != d.mu.size())
		throw Error("parameterization: demand spec size mismatch");
	for (size_t j = 0; j < d.mu.size(); j++) {
		if (d.mu[j] < bounds.mu_min - 1e-9 || d.mu[j] > bounds.mu_max + 1e-9)
			throw Error("parameterization: demand mean outside bounds");
		if (d.sigma[j] < sigma_min(d.mu[j]) - 1e-9 || d.sigma[j] > 2.0 * d.mu[j] + 1e-9)
			throw Error("parameterization: demand std outside bounds");
		if (!d.pmfs[j].valid()) throw Error("parameterization: invalid demand pmf");
	}
	const auto& lt = p.leadtime;
	if (static_cast<int64_t>(lt.probs.size()) != bounds.l_max + 1)
		throw Error("parameterization: lead time vector size mismatch");
	double total = 0.0;
	for (double q : lt.probs) {
		if (q < 0.0) throw Error("parameterization: negative lead time probability");
		total += q;
	}
	if (std::abs(total - 1.0) > 1e-12)
		throw Error("parameterization: lead time probabilities must sum to 1");
	if (lt.deterministic() && lt.crossover)
		throw Error("parameterization: deterministic lead time cannot cross");
}

std::string to_record(const Parameterization& p) {
	std::string out = format_double(p.h);
	out += ' ';
	out += format_double(p.p);
	out += ' ';
	out += format_int(p.demand.cycle_length);
	for (double m : p.demand.mu) {
		out += ' ';
		out += format_double(m);
	}
	for (double s : p.demand.sigma) {
		out += ' ';
		out += format_double(s);
	}
	out += ' ';
	out += format_int(p.leadtime.crossover ? 1 : 0);
	for (double q : p.leadtime.probs) {
		out += ' ';
		out += format_double(q);
	}
	return out;
}

Parameterization from_record(const std::string& line, const SpaceBounds& bounds) {
	const auto tok = split_ws(line);
	if (tok.size() < 4) throw Error("record: too few fields");
	Parameterization p;
	p.h = parse_double(tok[0]);
	p.p = parse_double(tok[1]);
	const int64_t cycle = parse_int(tok[2]);
	if (cycle < 1) throw Error("record: cycle length must be positive");
	const size_t expect = 3 + 2 * static_cast<size_t>(cycle) + 1 +
	                      static_cast<size_t>(bounds.l_max) + 1;
	if (tok.size() != expect) throw Error("record: field count mismatch");
	std::vector<double> mu(cycle), sigma(cycle);
	size_t i = 3;
	for (int64_t j = 0; j < cycle; j++) mu[j] = parse_double(tok[i++]);
	for (int64_t j = 0; j < cycle; j++) sigma[j] = parse_double(tok[i++]);
	p.demand = make_demand_spec(std::move(mu), std::move(sigma), bounds.epsilon);
	p.leadtime.crossover = parse_int(tok[i++]) != 0;
	p.leadtime.probs.resize(bounds.l_max + 1);
	for (auto& q : p.leadtime.probs) q = parse_double(tok[i++]);
	return p;
}

}  // namespace ted
