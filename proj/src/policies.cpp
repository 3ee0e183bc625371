#include "ted/policies.h"

#include <algorithm>

#include "ted/error.h"

namespace ted {

int64_t feature_length(const SpaceBounds& bounds) {
	return 3 + bounds.l_max + (bounds.l_max + 1) + 1 + 2 * bounds.k_max;
}

void featurize_into(const State& s, const Parameterization& est,
                    const SpaceBounds& bounds, double* out) {
	const double inv_mu = 1.0 / bounds.mu_max;
	int64_t i = 0;
	out[i++] = est.leadtime.crossover ? 1.0 : 0.0;
	out[i++] = est.p / bounds.p_max;
	out[i++] = static_cast<double>(s.on_hand) * inv_mu;
	for (int64_t age = 1; age <= bounds.l_max; age++) out[i + age - 1] = 0.0;
	for (const auto& o : s.outstanding) {
		if (o.age < 1 || o.age > bounds.l_max)
			throw Error("featurize: order age outside [1, l_max]");
		out[i + o.age - 1] += static_cast<double>(o.qty) * inv_mu;
	}
	i += bounds.l_max;
	if (static_cast<int64_t>(est.leadtime.probs.size()) != bounds.l_max + 1)
		throw Error("featurize: lead-time vector size mismatch");
	for (int64_t j = 0; j <= bounds.l_max; j++) out[i++] = est.leadtime.probs[j];
	const int64_t cycle = est.demand.cycle_length;
	out[i++] = static_cast<double>(cycle);
	for (int64_t k = 0; k < bounds.k_max; k++) {
		const int64_t ph = (s.phase + k) % cycle;
		out[i++] = est.demand.mu[ph] * inv_mu;
		out[i++] = est.demand.sigma[ph] * inv_mu;
	}
}

Eigen::VectorXd featurize(const State& s, const Parameterization& est,
                          const SpaceBounds& bounds) {
	Eigen::VectorXd f(feature_length(bounds));
	featurize_into(s, est, bounds, f.data());
	return f;
}

int64_t base_stock_act(const State& s, int64_t level, int64_t m_p) {
	const int64_t gap = level - s.inventory_position();
	return std::max<int64_t>(0, std::min(m_p, gap));
}

int64_t capped_base_stock_act(const State& s, int64_t level, int64_t cap, int64_t m_p) {
	return std::min(cap, base_stock_act(s, level, m_p));
}

int64_t initial_policy_act(const State& s, const Instance& inst) {
	return capped_base_stock_act(s, inst.i_max(), inst.m_p(), inst.m_p());
}

int64_t masked_argmax(const Eigen::Ref<const Eigen::RowVectorXd>& logits, int64_t m_p) {
	const int64_t top = std::min<int64_t>(m_p, logits.cols() - 1);
	int64_t best = 0;
	for (int64_t a = 1; a <= top; a++)
		if (logits(a) > logits(best)) best = a;
	return best;
}

int64_t neural_act(const Network& net, const Eigen::VectorXd& features, int64_t m_p) {
	if (features.size() != net.input_dim())
		throw Error("neural_act: feature length does not match the network input");
	return masked_argmax(net.forward(features).transpose(), m_p);
}

void Policy::act_batch(const std::vector<State>& states, const Instance& inst,
                       std::vector<int64_t>& out) const {
	out.resize(states.size());
	for (size_t i = 0; i < states.size(); i++) out[i] = act(states[i], inst);
}

std::vector<int64_t> Policy::promising(const State& s, const Instance& inst,
                                       int64_t max_count) const {
	// window of max_count consecutive actions containing the policy's own
	// choice, shifted to stay inside [0, m_p]
	const int64_t m = inst.m_p();
	const int64_t count = std::min(max_count, m + 1);
	const int64_t center = act(s, inst);
	int64_t lo = center - (count - 1) / 2;
	lo = std::clamp<int64_t>(lo, 0, m - count + 1);
	std::vector<int64_t> actions(count);
	for (int64_t i = 0; i < count; i++) actions[i] = lo + i;
	return actions;
}

BaseStockPolicy::BaseStockPolicy(std::vector<int64_t> levels) : levels_(std::move(levels)) {
	if (levels_.empty()) throw Error("base stock policy: need at least one level");
	for (int64_t lv : levels_)
		if (lv < 0) throw Error("base stock policy: negative level");
}

int64_t BaseStockPolicy::act(const State& s, const Instance& inst) const {
	const int64_t level = levels_[s.phase % levels_.size()];
	return base_stock_act(s, level, inst.m_p());
}

CappedBaseStockPolicy::CappedBaseStockPolicy(std::vector<int64_t> levels, int64_t cap)
    : levels_(std::move(levels)), cap_(cap) {
	if (levels_.empty()) throw Error("capped base stock policy: need at least one level");
	if (cap_ < 0) throw Error("capped base stock policy: negative cap");
}

int64_t CappedBaseStockPolicy::act(const State& s, const Instance& inst) const {
	const int64_t level = levels_[s.phase % levels_.size()];
	return capped_base_stock_act(s, level, cap_, inst.m_p());
}

int64_t InitialPolicy::act(const State& s, const Instance& inst) const {
	return initial_policy_act(s, inst);
}

NeuralPolicy::NeuralPolicy(std::shared_ptr<const Network> net, SpaceBounds bounds)
    : net_(std::move(net)), bounds_(bounds) {
	if (!net_) throw Error("neural policy: missing network");
	if (net_->input_dim() != feature_length(bounds_))
		throw Error("neural policy: network input does not match the bounds featurization");
}

int64_t NeuralPolicy::act(const State& s, const Instance& inst) const {
	return neural_act(*net_, featurize(s, inst.params(), bounds_), inst.m_p());
}

void NeuralPolicy::act_batch(const std::vector<State>& states, const Instance& inst,
                             std::vector<int64_t>& out) const {
	const auto n = static_cast<int64_t>(states.size());
	out.resize(n);
	if (n == 0) return;
	Eigen::MatrixXd feats(n, feature_length(bounds_));
	// row-major staging buffer: featurize writes contiguous doubles
	std::vector<double> row(feature_length(bounds_));
	for (int64_t i = 0; i < n; i++) {
		featurize_into(states[i], inst.params(), bounds_, row.data());
		for (int64_t j = 0; j < feats.cols(); j++) feats(i, j) = row[j];
	}
	const Eigen::MatrixXd logits = net_->forward_batch(feats);
	for (int64_t i = 0; i < n; i++) out[i] = masked_argmax(logits.row(i), inst.m_p());
}

std::vector<int64_t> NeuralPolicy::promising(const State& s, const Instance& inst,
                                             int64_t max_count) const {
	const Eigen::VectorXd logits = net_->forward(featurize(s, inst.params(), bounds_));
	const int64_t top = std::min<int64_t>(inst.m_p(), logits.size() - 1);
	std::vector<int64_t> order(top + 1);
	for (int64_t a = 0; a <= top; a++) order[a] = a;
	std::stable_sort(order.begin(), order.end(), [&](int64_t a, int64_t b) {
		return logits(a) > logits(b);
	});
	order.resize(std::min<int64_t>(max_count, top + 1));
	std::sort(order.begin(), order.end());
	return order;
}

}  // namespace ted
