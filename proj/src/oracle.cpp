#include "ted/oracle.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "ted/error.h"

namespace ted {

namespace {

constexpr double kAperiodicTau = 0.5;  // lazy-chain transform weight

int64_t max_demand_support(const Parameterization& p) {
	int64_t top = 0;
	for (const auto& pmf : p.demand.pmfs) top = std::max(top, pmf.d_max());
	return top;
}

bool needs_pipeline_slot(const Parameterization& p) {
	return static_cast<int64_t>(p.leadtime.probs.size()) > 2 &&
	       p.leadtime.probs[2] > 0.0;
}

void check_lead_support(const Instance& inst) {
	if (inst.params().leadtime.max_lead() > 2)
		throw Error("oracle: lead-time support beyond 2 is not enumerable here");
}

}  // namespace

int64_t TruncatedDomain::index(int64_t oh, int64_t x, int64_t phase) const {
	return (oh * (x_cap + 1) + x) * cycle + phase;
}

void TruncatedDomain::decode(int64_t idx, int64_t& oh, int64_t& x, int64_t& phase) const {
	phase = idx % cycle;
	idx /= cycle;
	x = idx % (x_cap + 1);
	oh = idx / (x_cap + 1);
}

TruncatedDomain default_domain(const Instance& inst) {
	check_lead_support(inst);
	TruncatedDomain dom;
	dom.n_actions = inst.m_p() + 1;
	dom.oh_cap = inst.i_max() + max_demand_support(inst.params());
	dom.x_cap = needs_pipeline_slot(inst.params()) ? dom.n_actions - 1 : 0;
	dom.cycle = inst.cycle_length();
	return dom;
}

TruncatedDomain shared_domain(const Instance& a, const Instance& b) {
	check_lead_support(a);
	check_lead_support(b);
	if (a.cycle_length() != b.cycle_length())
		throw Error("oracle: shared domain needs matching cycle lengths");
	TruncatedDomain dom;
	dom.n_actions = std::max(a.m_p(), b.m_p()) + 1;
	dom.oh_cap = std::max(a.i_max() + max_demand_support(a.params()),
	                      b.i_max() + max_demand_support(b.params()));
	dom.x_cap = (needs_pipeline_slot(a.params()) || needs_pipeline_slot(b.params()))
	                ? dom.n_actions - 1
	                : 0;
	dom.cycle = a.cycle_length();
	return dom;
}

State TruncatedInstance::to_state(int64_t idx) const {
	int64_t oh, x, phase;
	domain.decode(idx, oh, x, phase);
	State s;
	s.on_hand = oh;
	s.phase = phase;
	if (x > 0) s.outstanding.push_back(Order{1, x, 1});
	return s;
}

int64_t TruncatedInstance::from_state(const State& s) const {
	const int64_t oh = std::min(s.on_hand, domain.oh_cap);
	const int64_t x = std::min(s.pipeline_total(), domain.x_cap);
	return domain.index(oh, x, s.phase % domain.cycle);
}

TruncatedInstance enumerate_transitions(const Instance& inst, const TruncatedDomain& dom) {
	check_lead_support(inst);
	if (dom.n_states() > 1000000) throw Error("oracle: state space exceeds 10^6");
	if (inst.cycle_length() != dom.cycle)
		throw Error("oracle: domain cycle length mismatch");

	const auto& params = inst.params();
	const auto& lead_probs = params.leadtime.probs;
	const int64_t lead_top = std::min<int64_t>(2, params.leadtime.probs.size() - 1);

	TruncatedInstance trunc;
	trunc.domain = dom;
	const int64_t n = dom.n_states();
	trunc.transitions.resize(n * dom.n_actions);
	trunc.expected_cost.assign(n * dom.n_actions, 0.0);

	std::unordered_map<int64_t, double> row;
	for (int64_t idx = 0; idx < n; idx++) {
		int64_t oh, x, phase;
		dom.decode(idx, oh, x, phase);
		const Pmf& demand = params.demand.pmfs[phase];
		const int64_t next_phase = (phase + 1) % dom.cycle;
		for (int64_t a = 0; a < dom.n_actions; a++) {
			row.clear();
			double cost = 0.0;
			for (int64_t lead = 0; lead <= lead_top; lead++) {
				double lp = lead_probs[lead];
				if (lp == 0.0) continue;
				int64_t eff = lead;
				if (!params.leadtime.crossover && x > 0 && a > 0)
					eff = std::max<int64_t>(lead, 1);  // sequential arrivals
				const int64_t q0 = (a > 0 && eff == 0) ? a : 0;
				const int64_t incoming = x + ((a > 0 && eff == 1) ? a : 0);
				const int64_t x_next = (a > 0 && eff == 2) ? a : 0;
				if (x_next > dom.x_cap)
					throw Error("oracle: pipeline slot exceeds the domain cap");
				const int64_t available = oh + q0;
				for (int64_t d = 0; d <= demand.d_max(); d++) {
					const double dp = demand.probs[d];
					if (dp == 0.0) continue;
					const double pr = lp * dp;
					const int64_t end_inv = std::max<int64_t>(available - d, 0);
					int64_t oh_next = end_inv + incoming;
					if (oh_next > dom.oh_cap) {
						oh_next = dom.oh_cap;
						trunc.clipped_transitions++;
					}
					cost += pr * period_cost(available, d, params.h, params.p);
					row[dom.index(oh_next, x_next, next_phase)] += pr;
				}
			}
			auto& sparse = trunc.transitions[idx * dom.n_actions + a];
			sparse.assign(row.begin(), row.end());
			std::sort(sparse.begin(), sparse.end());
			trunc.expected_cost[idx * dom.n_actions + a] = cost;
		}
	}
	return trunc;
}

TruncatedInstance enumerate_transitions(const Instance& inst) {
	return enumerate_transitions(inst, default_domain(inst));
}

namespace {

double sparse_dot(const std::vector<std::pair<int32_t, double>>& row,
                  const std::vector<double>& v) {
	double s = 0.0;
	for (const auto& [idx, pr] : row) s += pr * v[idx];
	return s;
}

struct SweepResult {
	double span = 0.0;
	double mid = 0.0;
};

// one lazy-transformed value-iteration sweep; an empty `fixed` means greedy
SweepResult sweep(const TruncatedInstance& trunc, const std::vector<int64_t>& fixed,
                  std::vector<double>& value, std::vector<double>& next,
                  int64_t reference_state) {
	const int64_t n = trunc.domain.n_states();
	const int64_t n_actions = trunc.domain.n_actions;
	double lo = std::numeric_limits<double>::infinity();
	double hi = -lo;
	for (int64_t s = 0; s < n; s++) {
		double best;
		if (!fixed.empty()) {
			const int64_t a = fixed[s];
			best = trunc.expected_cost[s * n_actions + a] +
			       sparse_dot(trunc.transitions[s * n_actions + a], value);
		} else {
			best = std::numeric_limits<double>::infinity();
			for (int64_t a = 0; a < n_actions; a++) {
				const double q = trunc.expected_cost[s * n_actions + a] +
				                 sparse_dot(trunc.transitions[s * n_actions + a], value);
				if (q < best) best = q;
			}
		}
		next[s] = kAperiodicTau * value[s] + (1.0 - kAperiodicTau) * best;
		const double diff = next[s] - value[s];
		lo = std::min(lo, diff);
		hi = std::max(hi, diff);
	}
	// re-anchor at the reference state so values stay bounded
	const double anchor = next[reference_state];
	for (double& v : next) v -= anchor;
	return {(hi - lo) / (1.0 - kAperiodicTau), 0.5 * (hi + lo) / (1.0 - kAperiodicTau)};
}

}  // namespace

DpResult dp_average_cost(const TruncatedInstance& trunc, double tol,
                         int64_t max_iterations, int64_t reference_state) {
	const int64_t n = trunc.domain.n_states();
	const int64_t n_actions = trunc.domain.n_actions;
	if (reference_state < 0 || reference_state >= n)
		throw Error("dp_average_cost: reference state outside the domain");
	std::vector<double> value(n, 0.0), next(n, 0.0);
	DpResult result;
	for (int64_t it = 0; it < max_iterations; it++) {
		const SweepResult sr = sweep(trunc, {}, value, next, reference_state);
		value.swap(next);
		result.iterations = it + 1;
		result.span = sr.span;
		result.gain = sr.mid;
		if (sr.span < tol) break;
	}
	if (result.span >= tol)
		throw Error("dp_average_cost: no convergence within the iteration cap");

	result.policy.assign(n, 0);
	for (int64_t s = 0; s < n; s++) {
		double best = std::numeric_limits<double>::infinity();
		int64_t best_a = 0;
		for (int64_t a = 0; a < n_actions; a++) {
			const double q = trunc.expected_cost[s * n_actions + a] +
			                 sparse_dot(trunc.transitions[s * n_actions + a], value);
			if (q < best) {  // strict comparison keeps ties on the smaller action
				best = q;
				best_a = a;
			}
		}
		result.policy[s] = best_a;
	}
	return result;
}

double policy_average_cost(const TruncatedInstance& trunc,
                           const std::vector<int64_t>& policy, double tol,
                           int64_t max_iterations) {
	if (static_cast<int64_t>(policy.size()) != trunc.domain.n_states())
		throw Error("policy_average_cost: policy table size mismatch");
	std::vector<double> value(policy.size(), 0.0), next(policy.size(), 0.0);
	double gain = 0.0, span = tol + 1.0;
	for (int64_t it = 0; it < max_iterations && span >= tol; it++) {
		const SweepResult sr = sweep(trunc, policy, value, next, 0);
		value.swap(next);
		span = sr.span;
		gain = sr.mid;
	}
	if (span >= tol)
		throw Error("policy_average_cost: no convergence within the iteration cap");
	return gain;
}

double param_distance(const Instance& a, const Instance& b, const TruncatedDomain& dom) {
	const TruncatedInstance ta = enumerate_transitions(a, dom);
	const TruncatedInstance tb = enumerate_transitions(b, dom);
	double c_max = 0.0;
	for (double c : ta.expected_cost) c_max = std::max(c_max, std::abs(c));
	for (double c : tb.expected_cost) c_max = std::max(c_max, std::abs(c));

	double dist = 0.0;
	const int64_t rows = dom.n_states() * dom.n_actions;
	for (int64_t r = 0; r < rows; r++) {
		const double dc = std::abs(ta.expected_cost[r] - tb.expected_cost[r]);
		const auto& ra = ta.transitions[r];
		const auto& rb = tb.transitions[r];
		double l1 = 0.0;
		size_t i = 0, j = 0;
		while (i < ra.size() || j < rb.size()) {
			if (j >= rb.size() || (i < ra.size() && ra[i].first < rb[j].first)) {
				l1 += std::abs(ra[i++].second);
			} else if (i >= ra.size() || rb[j].first < ra[i].first) {
				l1 += std::abs(rb[j++].second);
			} else {
				l1 += std::abs(ra[i].second - rb[j].second);
				i++;
				j++;
			}
		}
		dist = std::max(dist, dc + c_max * l1);
	}
	return dist;
}

TablePolicy::TablePolicy(TruncatedDomain dom, std::vector<int64_t> actions)
    : dom_(dom), actions_(std::move(actions)) {
	if (static_cast<int64_t>(actions_.size()) != dom_.n_states())
		throw Error("table policy: action table size mismatch");
}

int64_t TablePolicy::act(const State& s, const Instance& inst) const {
	(void)inst;
	const int64_t oh = std::min(s.on_hand, dom_.oh_cap);
	const int64_t x = std::min(s.pipeline_total(), dom_.x_cap);
	return actions_[dom_.index(oh, x, s.phase % dom_.cycle)];
}

BoundCheckResult bound_check(const Instance& truth,
                             const std::vector<const Instance*>& estimates,
                             const std::vector<int64_t>& policy,
                             const TruncatedDomain& dom, int64_t horizon,
                             double slack) {
	if (horizon < 1) throw Error("bound_check: horizon must be positive");
	if (estimates.empty()) throw Error("bound_check: need at least one estimate");

	const TruncatedInstance true_trunc = enumerate_transitions(truth, dom);
	std::map<const Instance*, TruncatedInstance> cache;
	std::map<const Instance*, double> dists;
	for (const Instance* est : estimates) {
		if (!cache.count(est)) {
			cache.emplace(est, enumerate_transitions(*est, dom));
			dists.emplace(est, param_distance(truth, *est, dom));
		}
	}

	const int64_t n = dom.n_states();
	const int64_t s0 = dom.index(0, 0, 0);
	std::vector<double> dist_est(n, 0.0), dist_true(n, 0.0), scratch(n, 0.0);
	dist_est[s0] = 1.0;
	dist_true[s0] = 1.0;

	auto evolve = [&](std::vector<double>& dist, const TruncatedInstance& env,
	                  double& cost_acc) {
		std::fill(scratch.begin(), scratch.end(), 0.0);
		for (int64_t s = 0; s < n; s++) {
			const double mass = dist[s];
			if (mass == 0.0) continue;
			const int64_t row = s * dom.n_actions + policy[s];
			cost_acc += mass * env.expected_cost[row];
			for (const auto& [nxt, pr] : env.transitions[row]) scratch[nxt] += mass * pr;
		}
		dist.swap(scratch);
	};

	BoundCheckResult result;
	double cost_est = 0.0, cost_true = 0.0, rhs = 0.0;
	for (int64_t t = 1; t <= horizon; t++) {
		const Instance* est = estimates[std::min<size_t>(t - 1, estimates.size() - 1)];
		evolve(dist_est, cache.at(est), cost_est);
		evolve(dist_true, true_trunc, cost_true);
		const double weight = 1.0 + 0.5 * static_cast<double>(horizon - t);
		rhs += weight * dists.at(est);
	}
	result.lhs = std::abs(cost_est - cost_true) / static_cast<double>(horizon);
	result.rhs = rhs / static_cast<double>(horizon);
	result.holds = result.lhs <= result.rhs + slack;
	return result;
}

}  // namespace ted
