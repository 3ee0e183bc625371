#include "ted/mdp.h"

#include <algorithm>
#include <cmath>

#include "ted/error.h"

namespace ted {

int64_t State::pipeline_total() const {
	int64_t total = 0;
	for (const auto& o : outstanding) total += o.qty;
	return total;
}

double period_cost(int64_t available, int64_t demand, double h, double p) {
	const int64_t left = available - demand;
	if (left >= 0) return h * static_cast<double>(left);
	return p * static_cast<double>(-left);
}

double period_profit(int64_t available, int64_t demand, double h, double p) {
	const int64_t sales = std::min(demand, available);
	const int64_t left = available - sales;
	return p * static_cast<double>(sales) - h * static_cast<double>(left);
}

int64_t action_bound(const Parameterization& p) {
	const double frac = p.p / (p.p + p.h);
	int64_t m = 0;
	for (const auto& pmf : p.demand.pmfs) m = std::max(m, pmf.fractile(frac));
	return m;
}

int64_t base_stock_bound(const Parameterization& p) {
	const double frac = p.p / (p.p + p.h);
	// round the mean lead up so the bound stays an upper bound
	const auto lead = static_cast<int64_t>(std::ceil(p.leadtime.mean() - 1e-9));
	const int64_t periods = lead + 1;
	const int64_t cycle = p.demand.cycle_length;
	int64_t best = 0;
	for (int64_t start = 0; start < cycle; start++) {
		Pmf conv = p.demand.pmfs[start % cycle];
		for (int64_t t = 1; t < periods; t++)
			conv = conv.convolve(p.demand.pmfs[(start + t) % cycle]);
		best = std::max(best, conv.fractile(frac));
	}
	return best;
}

Instance::Instance(Parameterization params, EngineLimits limits)
    : params_(std::move(params)), limits_(limits) {
	demand_samplers_.reserve(params_.demand.pmfs.size());
	for (const auto& pmf : params_.demand.pmfs) demand_samplers_.emplace_back(pmf);
	lead_sampler_ = PmfSampler(Pmf{params_.leadtime.probs});
	m_p_ = action_bound(params_);
	i_max_ = base_stock_bound(params_);
}

int64_t Instance::action_top() const { return std::max(limits_.m, m_p_); }

State Instance::initial_state() const { return State{0, {}, 0}; }

void Instance::step(State& s, int64_t action, RngStream& rng, StepOutcome& out,
                    std::vector<int64_t>* arrival_leads) const {
	if (action < 0 || action > action_top())
		throw Error("transition: action outside the engine action space");
	if (s.phase < 0 || s.phase >= cycle_length())
		throw Error("transition: phase outside the demand cycle");

	// place the order; the lead uniform is consumed even for a zero order so
	// that draws stay aligned per period index under common random numbers
	const int64_t drawn_lead = lead_sampler_.sample(rng);
	int64_t q0 = 0;
	if (action > 0) {
		int64_t effective = drawn_lead;
		if (!params_.leadtime.crossover) {
			// received in placement sequence: never overtake an open order
			for (const auto& o : s.outstanding)
				effective = std::max(effective, o.remaining);
		}
		if (effective == 0) {
			q0 = action;
			if (arrival_leads) arrival_leads->push_back(0);
		} else {
			s.outstanding.push_back(Order{0, action, effective});
		}
	}

	// demand, sales, and the period's cost/profit
	const int64_t demand = demand_samplers_[s.phase].sample(rng);
	const int64_t available = s.on_hand + q0;
	const int64_t sales = std::min(demand, available);
	const int64_t end_inventory = available - sales;
	out.cost = period_cost(available, demand, params_.h, params_.p);
	out.profit = period_profit(available, demand, params_.h, params_.p);
	out.sale = sales;
	out.censored = demand >= available;
	out.demand_observed = available > 0;
	out.obs_phase = s.phase;

	// age the pipeline and resolve the arrivals due at the next review
	int64_t arrived = 0;
	auto& orders = s.outstanding;
	size_t keep = 0;
	for (size_t i = 0; i < orders.size(); i++) {
		Order o = orders[i];
		o.age++;
		o.remaining--;
		if (o.remaining == 0) {
			arrived += o.qty;
			if (arrival_leads) arrival_leads->push_back(o.age);
		} else {
			orders[keep++] = o;
		}
	}
	orders.resize(keep);
	s.on_hand = end_inventory + arrived;
	s.phase = (s.phase + 1) % cycle_length();
}

PeriodOutcome Instance::transition(const State& s, int64_t action, RngStream& rng) const {
	PeriodOutcome out;
	out.next = s;
	StepOutcome step_out;
	step(out.next, action, rng, step_out, &out.observation.arrival_leads);
	out.cost = step_out.cost;
	out.profit = step_out.profit;
	out.observation.sale = step_out.sale;
	out.observation.censored = step_out.censored;
	out.observation.demand_observed = step_out.demand_observed;
	out.observation.phase = step_out.obs_phase;
	return out;
}

}  // namespace ted
