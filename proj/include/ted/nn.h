#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace ted {

// Labeled classification data; rows of X are feature vectors.
struct Dataset {
	Eigen::MatrixXd X;
	std::vector<int64_t> y;
	int64_t n_classes = 0;

	int64_t size() const { return static_cast<int64_t>(y.size()); }
};

struct TrainConfig {
	std::vector<int64_t> hidden = {256, 128, 128, 128};
	int64_t minibatch = 1024;
	int64_t max_epochs = 100;
	int64_t patience = 15;
	double learning_rate = 1e-3;
	double beta1 = 0.9;
	double beta2 = 0.999;
	double adam_eps = 1e-8;
	double validation_fraction = 0.1;
	uint64_t seed = 0;

	void validate() const;
};

// Feed-forward classifier: rectified-linear hidden layers, identity output.
class Network {
public:
	Network() = default;

	// fan-in scaled uniform initialization, deterministic in the seed
	static Network he_init(const std::vector<int64_t>& dims, uint64_t seed);

	std::vector<int64_t> dims() const;
	int64_t input_dim() const { return weights.empty() ? 0 : weights.front().rows(); }
	int64_t output_dim() const { return weights.empty() ? 0 : weights.back().cols(); }

	Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
	// one sample per row
	Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& X) const;

	std::vector<Eigen::MatrixXd> weights;   // weights[l]: dims[l] x dims[l+1]
	std::vector<Eigen::RowVectorXd> biases;
};

struct TrainStats {
	int64_t epochs_run = 0;
	double best_val_loss = 0.0;
	double train_accuracy = 0.0;
	double val_accuracy = 0.0;
	int64_t train_size = 0;
	int64_t val_size = 0;
};

// Trains a freshly initialized network with softmax cross-entropy and Adam,
// early-stopped on held-out validation loss; returns the best-validation
// snapshot. Deterministic given (dataset, cfg).
Network train_classifier(const Dataset& data, const TrainConfig& cfg,
                         TrainStats* stats = nullptr);

// Mean cross-entropy of the batch and its gradient with respect to every
// weight and bias. Exposed so the analytic gradients can be checked against
// finite differences.
double loss_and_gradients(const Network& net, const Eigen::MatrixXd& X,
                          const std::vector<int64_t>& y,
                          std::vector<Eigen::MatrixXd>& grad_w,
                          std::vector<Eigen::RowVectorXd>& grad_b);

double mean_cross_entropy(const Network& net, const Eigen::MatrixXd& X,
                          const std::vector<int64_t>& y);
double accuracy(const Network& net, const Eigen::MatrixXd& X, const std::vector<int64_t>& y);

// Versioned plain-text weight files; loading reproduces forward outputs
// bit-identically.
void save_weights(const Network& net, const std::string& path);
Network load_weights(const std::string& path);

}  // namespace ted
