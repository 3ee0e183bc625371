#include "ted/nn.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "ted/error.h"
#include "ted/rng.h"
#include "ted/textio.h"

namespace ted {

void TrainConfig::validate() const {
	if (minibatch < 1) throw Error("train config: minibatch must be at least 1");
	if (max_epochs < 1) throw Error("train config: max_epochs must be at least 1");
	if (patience < 1 || patience > max_epochs)
		throw Error("train config: patience must lie in [1, max_epochs]");
	if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
		throw Error("train config: validation fraction outside [0, 1)");
	if (!(learning_rate > 0.0)) throw Error("train config: learning rate must be positive");
}

Network Network::he_init(const std::vector<int64_t>& dims, uint64_t seed) {
	if (dims.size() < 2) throw Error("network: need at least input and output dims");
	Network net;
	RngStream rng(derive_seed(seed, 0x6e657469));
	for (size_t l = 0; l + 1 < dims.size(); l++) {
		const int64_t fan_in = dims[l];
		const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
		Eigen::MatrixXd w(dims[l], dims[l + 1]);
		for (int64_t i = 0; i < w.rows(); i++)
			for (int64_t j = 0; j < w.cols(); j++)
				w(i, j) = rng.next_real(-limit, limit);
		net.weights.push_back(std::move(w));
		net.biases.emplace_back(Eigen::RowVectorXd::Zero(dims[l + 1]));
	}
	return net;
}

std::vector<int64_t> Network::dims() const {
	std::vector<int64_t> d;
	if (weights.empty()) return d;
	d.push_back(weights.front().rows());
	for (const auto& w : weights) d.push_back(w.cols());
	return d;
}

Eigen::MatrixXd Network::forward_batch(const Eigen::MatrixXd& X) const {
	if (weights.empty()) throw Error("network: forward on empty network");
	if (X.cols() != weights.front().rows())
		throw Error("network: input dimension mismatch");
	Eigen::MatrixXd a = X;
	for (size_t l = 0; l < weights.size(); l++) {
		Eigen::MatrixXd z = (a * weights[l]).rowwise() + biases[l];
		if (l + 1 < weights.size()) z = z.cwiseMax(0.0);
		a = std::move(z);
	}
	return a;
}

Eigen::VectorXd Network::forward(const Eigen::VectorXd& x) const {
	return forward_batch(x.transpose()).row(0).transpose();
}

namespace {

// row-wise softmax in place, numerically shifted
void softmax_rows(Eigen::MatrixXd& z) {
	for (int64_t r = 0; r < z.rows(); r++) {
		const double m = z.row(r).maxCoeff();
		z.row(r) = (z.row(r).array() - m).exp();
		z.row(r) /= z.row(r).sum();
	}
}

struct ForwardCache {
	std::vector<Eigen::MatrixXd> pre;   // pre-activation per layer
	std::vector<Eigen::MatrixXd> act;   // act[0] = input
};

Eigen::MatrixXd forward_cached(const Network& net, const Eigen::MatrixXd& X, ForwardCache& c) {
	c.pre.clear();
	c.act.clear();
	c.act.push_back(X);
	for (size_t l = 0; l < net.weights.size(); l++) {
		Eigen::MatrixXd z = (c.act.back() * net.weights[l]).rowwise() + net.biases[l];
		c.pre.push_back(z);
		if (l + 1 < net.weights.size())
			c.act.push_back(z.cwiseMax(0.0));
	}
	return c.pre.back();
}

}  // namespace

double loss_and_gradients(const Network& net, const Eigen::MatrixXd& X,
                          const std::vector<int64_t>& y,
                          std::vector<Eigen::MatrixXd>& grad_w,
                          std::vector<Eigen::RowVectorXd>& grad_b) {
	const auto n = static_cast<int64_t>(y.size());
	if (X.rows() != n || n == 0) throw Error("loss: batch size mismatch");
	ForwardCache cache;
	Eigen::MatrixXd probs = forward_cached(net, X, cache);
	softmax_rows(probs);

	double loss = 0.0;
	for (int64_t r = 0; r < n; r++)
		loss -= std::log(std::max(probs(r, y[r]), 1e-300));
	loss /= static_cast<double>(n);

	grad_w.assign(net.weights.size(), {});
	grad_b.assign(net.weights.size(), {});
	Eigen::MatrixXd delta = probs;
	for (int64_t r = 0; r < n; r++) delta(r, y[r]) -= 1.0;
	delta /= static_cast<double>(n);
	for (size_t l = net.weights.size(); l-- > 0;) {
		grad_w[l].noalias() = cache.act[l].transpose() * delta;
		grad_b[l] = delta.colwise().sum();
		if (l > 0) {
			Eigen::MatrixXd da = delta * net.weights[l].transpose();
			delta = da.cwiseProduct(
			    (cache.pre[l - 1].array() > 0.0).cast<double>().matrix());
		}
	}
	return loss;
}

double mean_cross_entropy(const Network& net, const Eigen::MatrixXd& X,
                          const std::vector<int64_t>& y) {
	Eigen::MatrixXd probs = net.forward_batch(X);
	softmax_rows(probs);
	double loss = 0.0;
	for (int64_t r = 0; r < X.rows(); r++)
		loss -= std::log(std::max(probs(r, y[r]), 1e-300));
	return loss / static_cast<double>(X.rows());
}

double accuracy(const Network& net, const Eigen::MatrixXd& X, const std::vector<int64_t>& y) {
	if (y.empty()) return 0.0;
	Eigen::MatrixXd logits = net.forward_batch(X);
	int64_t hits = 0;
	for (int64_t r = 0; r < logits.rows(); r++) {
		int64_t best = 0;
		for (int64_t c = 1; c < logits.cols(); c++)
			if (logits(r, c) > logits(r, best)) best = c;
		if (best == y[r]) hits++;
	}
	return static_cast<double>(hits) / static_cast<double>(y.size());
}

Network train_classifier(const Dataset& data, const TrainConfig& cfg, TrainStats* stats) {
	cfg.validate();
	const int64_t n = data.size();
	if (n == 0) throw Error("train: empty dataset");
	if (data.n_classes < 1) throw Error("train: dataset lacks class count");
	for (int64_t label : data.y)
		if (label < 0 || label >= data.n_classes) throw Error("train: label out of range");

	std::vector<int64_t> dims;
	dims.push_back(data.X.cols());
	for (int64_t hdim : cfg.hidden) dims.push_back(hdim);
	dims.push_back(data.n_classes);

	// distillation starts from scratch: the network is never warm-started
	Network net = Network::he_init(dims, cfg.seed);

	// deterministic shuffle, tail becomes the validation split
	std::vector<int64_t> order(n);
	std::iota(order.begin(), order.end(), 0);
	RngStream shuffle_rng(derive_seed(cfg.seed, 0x73687566));
	for (int64_t i = n - 1; i > 0; i--)
		std::swap(order[i], order[shuffle_rng.next_int(i + 1)]);
	const auto val_n = static_cast<int64_t>(
	    std::floor(cfg.validation_fraction * static_cast<double>(n)));
	const int64_t train_n = n - val_n;

	Eigen::MatrixXd val_x(val_n, data.X.cols());
	std::vector<int64_t> val_y(val_n);
	for (int64_t i = 0; i < val_n; i++) {
		val_x.row(i) = data.X.row(order[train_n + i]);
		val_y[i] = data.y[order[train_n + i]];
	}
	std::vector<int64_t> train_idx(order.begin(), order.begin() + train_n);

	std::vector<Eigen::MatrixXd> m_w(net.weights.size()), v_w(net.weights.size());
	std::vector<Eigen::RowVectorXd> m_b(net.weights.size()), v_b(net.weights.size());
	for (size_t l = 0; l < net.weights.size(); l++) {
		m_w[l] = Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols());
		v_w[l] = m_w[l];
		m_b[l] = Eigen::RowVectorXd::Zero(net.biases[l].cols());
		v_b[l] = m_b[l];
	}

	Network best = net;
	double best_monitor = std::numeric_limits<double>::infinity();
	int64_t since_best = 0;
	int64_t adam_t = 0;
	int64_t epochs_run = 0;
	std::vector<Eigen::MatrixXd> gw;
	std::vector<Eigen::RowVectorXd> gb;

	for (int64_t epoch = 0; epoch < cfg.max_epochs; epoch++) {
		epochs_run++;
		for (int64_t i = train_n - 1; i > 0; i--)
			std::swap(train_idx[i], train_idx[shuffle_rng.next_int(i + 1)]);
		double epoch_loss = 0.0;
		int64_t batches = 0;
		for (int64_t start = 0; start < train_n; start += cfg.minibatch) {
			const int64_t bsz = std::min(cfg.minibatch, train_n - start);
			Eigen::MatrixXd bx(bsz, data.X.cols());
			std::vector<int64_t> by(bsz);
			for (int64_t i = 0; i < bsz; i++) {
				bx.row(i) = data.X.row(train_idx[start + i]);
				by[i] = data.y[train_idx[start + i]];
			}
			epoch_loss += loss_and_gradients(net, bx, by, gw, gb);
			batches++;
			adam_t++;
			const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(adam_t));
			const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(adam_t));
			for (size_t l = 0; l < net.weights.size(); l++) {
				m_w[l] = cfg.beta1 * m_w[l] + (1.0 - cfg.beta1) * gw[l];
				v_w[l] = cfg.beta2 * v_w[l] + (1.0 - cfg.beta2) * gw[l].cwiseProduct(gw[l]);
				net.weights[l].array() -= cfg.learning_rate * (m_w[l].array() / bc1) /
				    ((v_w[l].array() / bc2).sqrt() + cfg.adam_eps);
				m_b[l] = cfg.beta1 * m_b[l] + (1.0 - cfg.beta1) * gb[l];
				v_b[l] = cfg.beta2 * v_b[l] + (1.0 - cfg.beta2) * gb[l].cwiseProduct(gb[l]);
				net.biases[l].array() -= cfg.learning_rate * (m_b[l].array() / bc1) /
				    ((v_b[l].array() / bc2).sqrt() + cfg.adam_eps);
			}
		}
		// validation loss drives early stopping; with no held-out rows the
		// mean training loss stands in
		const double monitor = val_n > 0 ? mean_cross_entropy(net, val_x, val_y)
		                                 : epoch_loss / static_cast<double>(batches);
		if (monitor < best_monitor) {
			best_monitor = monitor;
			best = net;
			since_best = 0;
		} else if (++since_best >= cfg.patience) {
			break;
		}
	}

	if (stats) {
		stats->epochs_run = epochs_run;
		stats->best_val_loss = best_monitor;
		stats->train_size = train_n;
		stats->val_size = val_n;
		Eigen::MatrixXd train_x(train_n, data.X.cols());
		std::vector<int64_t> train_y(train_n);
		for (int64_t i = 0; i < train_n; i++) {
			train_x.row(i) = data.X.row(order[i]);
			train_y[i] = data.y[order[i]];
		}
		stats->train_accuracy = accuracy(best, train_x, train_y);
		stats->val_accuracy = val_n > 0 ? accuracy(best, val_x, val_y) : 0.0;
	}
	return best;
}

void save_weights(const Network& net, const std::string& path) {
	std::ofstream f(path, std::ios::binary);
	if (!f) throw Error("save_weights: cannot open " + path);
	f << "TEDNET v1\n";
	const auto dims = net.dims();
	for (size_t i = 0; i < dims.size(); i++)
		f << (i ? " " : "") << dims[i];
	f << "\n";
	for (size_t l = 0; l < net.weights.size(); l++) {
		const auto& w = net.weights[l];
		for (int64_t i = 0; i < w.rows(); i++)
			for (int64_t j = 0; j < w.cols(); j++)
				f << (i == 0 && j == 0 ? "" : " ") << format_double(w(i, j));
		f << "\n";
		const auto& b = net.biases[l];
		for (int64_t j = 0; j < b.cols(); j++)
			f << (j == 0 ? "" : " ") << format_double(b(j));
		f << "\n";
	}
	if (!f) throw Error("save_weights: write failed for " + path);
}

Network load_weights(const std::string& path) {
	std::ifstream f(path, std::ios::binary);
	if (!f) throw Error("load_weights: cannot open " + path);
	std::string line;
	if (!std::getline(f, line)) throw Error("load_weights: empty file " + path);
	if (line == "TEDNET v1") {
		// current version
	} else if (line.rfind("TEDNET", 0) == 0) {
		throw Error("load_weights: unsupported version header '" + line + "'");
	} else {
		throw Error("load_weights: not a TEDNET file: " + path);
	}
	if (!std::getline(f, line)) throw Error("load_weights: missing dims line");
	std::vector<int64_t> dims;
	for (auto t : split_ws(line)) dims.push_back(parse_int(t));
	if (dims.size() < 2) throw Error("load_weights: malformed dims line");

	Network net;
	int64_t line_no = 2;
	for (size_t l = 0; l + 1 < dims.size(); l++) {
		if (!std::getline(f, line))
			throw Error("load_weights: truncated at line " + format_int(line_no + 1));
		line_no++;
		auto tok = split_ws(line);
		if (static_cast<int64_t>(tok.size()) != dims[l] * dims[l + 1])
			throw Error("load_weights: wrong weight count at line " + format_int(line_no));
		Eigen::MatrixXd w(dims[l], dims[l + 1]);
		size_t k = 0;
		for (int64_t i = 0; i < w.rows(); i++)
			for (int64_t j = 0; j < w.cols(); j++)
				w(i, j) = parse_double(tok[k++]);
		net.weights.push_back(std::move(w));

		if (!std::getline(f, line))
			throw Error("load_weights: truncated at line " + format_int(line_no + 1));
		line_no++;
		tok = split_ws(line);
		if (static_cast<int64_t>(tok.size()) != dims[l + 1])
			throw Error("load_weights: wrong bias count at line " + format_int(line_no));
		Eigen::RowVectorXd b(dims[l + 1]);
		for (int64_t j = 0; j < b.cols(); j++) b(j) = parse_double(tok[j]);
		net.biases.push_back(std::move(b));
	}
	return net;
}

}  // namespace ted
