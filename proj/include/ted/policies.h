#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ted/mdp.h"
#include "ted/nn.h"
#include "ted/params.h"

namespace ted {

// Feature vector length induced by the space bounds:
// [l, p, OH, pipeline-by-age, lead-time probs, K, (mu, sigma) per future period]
int64_t feature_length(const SpaceBounds& bounds);

// Fills out[0..feature_length) for state s under the (estimated)
// parameterization est. Demand statistics are rotated so that entry k
// describes the phase of period t+k, repeated cyclically up to k_max pairs.
// Scaling: p by 1/p_max, inventory quantities and demand moments by
// 1/mu_max; the crossover flag, lead probabilities and K stay raw.
void featurize_into(const State& s, const Parameterization& est,
                    const SpaceBounds& bounds, double* out);

Eigen::VectorXd featurize(const State& s, const Parameterization& est,
                          const SpaceBounds& bounds);

// order-up-to rule: max(0, min(m_p, S - inventory position))
int64_t base_stock_act(const State& s, int64_t level, int64_t m_p);
int64_t capped_base_stock_act(const State& s, int64_t level, int64_t cap, int64_t m_p);

// capped base-stock at the instance's newsvendor bounds, the starting point
// of policy iteration
int64_t initial_policy_act(const State& s, const Instance& inst);

// argmax over logits of feasible actions 0..m_p, ties toward the smaller
// action; logits beyond m_p are ignored
int64_t masked_argmax(const Eigen::Ref<const Eigen::RowVectorXd>& logits, int64_t m_p);

int64_t neural_act(const Network& net, const Eigen::VectorXd& features, int64_t m_p);

// Stationary policy interface used by evaluation and sample collection.
class Policy {
public:
	virtual ~Policy() = default;
	virtual std::string name() const = 0;
	virtual int64_t act(const State& s, const Instance& inst) const = 0;
	// batched variant for lockstep simulation; all states share one instance
	virtual void act_batch(const std::vector<State>& states, const Instance& inst,
	                       std::vector<int64_t>& out) const;
	// candidate set for rollout search: the top max_count actions this policy
	// considers promising in s (window around the chosen action by default)
	virtual std::vector<int64_t> promising(const State& s, const Instance& inst,
	                                       int64_t max_count) const;
};

class BaseStockPolicy : public Policy {
public:
	explicit BaseStockPolicy(std::vector<int64_t> levels);
	std::string name() const override { return "base_stock"; }
	int64_t act(const State& s, const Instance& inst) const override;
	const std::vector<int64_t>& levels() const { return levels_; }

private:
	std::vector<int64_t> levels_;  // per phase
};

class CappedBaseStockPolicy : public Policy {
public:
	CappedBaseStockPolicy(std::vector<int64_t> levels, int64_t cap);
	std::string name() const override { return "capped_base_stock"; }
	int64_t act(const State& s, const Instance& inst) const override;
	const std::vector<int64_t>& levels() const { return levels_; }
	int64_t cap() const { return cap_; }

private:
	std::vector<int64_t> levels_;
	int64_t cap_;
};

// pi_0 of the policy iteration: capped base stock at (I_max, m_p)
class InitialPolicy : public Policy {
public:
	std::string name() const override { return "initial"; }
	int64_t act(const State& s, const Instance& inst) const override;
};

// Trained network fed with the instance's own parameterization.
class NeuralPolicy : public Policy {
public:
	NeuralPolicy(std::shared_ptr<const Network> net, SpaceBounds bounds);
	std::string name() const override { return "neural"; }
	int64_t act(const State& s, const Instance& inst) const override;
	void act_batch(const std::vector<State>& states, const Instance& inst,
	               std::vector<int64_t>& out) const override;
	std::vector<int64_t> promising(const State& s, const Instance& inst,
	                               int64_t max_count) const override;
	const Network& net() const { return *net_; }
	const SpaceBounds& bounds() const { return bounds_; }

private:
	std::shared_ptr<const Network> net_;
	SpaceBounds bounds_;
};

}  // namespace ted
