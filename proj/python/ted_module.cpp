#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ted/config.h"
#include "ted/error.h"
#include "ted/estimate.h"
#include "ted/eval.h"
#include "ted/oracle.h"
#include "ted/superdcl.h"

namespace py = pybind11;
using namespace ted;

namespace {

Parameterization sample_one(const SpaceBounds& bounds, uint64_t seed) {
	RngStream rng(seed);
	return sample_parameterization(bounds, rng);
}

std::vector<Parameterization> sample_many(const SpaceBounds& bounds, uint64_t seed,
                                          int64_t count) {
	RngStream rng(seed);
	std::vector<Parameterization> out;
	out.reserve(count);
	for (int64_t i = 0; i < count; i++) out.push_back(sample_parameterization(bounds, rng));
	return out;
}

PeriodOutcome transition_seeded(const Instance& inst, const State& s, int64_t action,
                                uint64_t seed) {
	RngStream rng(seed);
	return inst.transition(s, action, rng);
}

std::vector<double> forward_list(const Network& net, const std::vector<double>& x) {
	Eigen::VectorXd v(static_cast<int64_t>(x.size()));
	for (size_t i = 0; i < x.size(); i++) v(static_cast<int64_t>(i)) = x[i];
	const Eigen::VectorXd out = net.forward(v);
	return std::vector<double>(out.data(), out.data() + out.size());
}

int64_t neural_act_list(const Network& net, const std::vector<double>& features,
                        int64_t m_p) {
	Eigen::VectorXd v(static_cast<int64_t>(features.size()));
	for (size_t i = 0; i < features.size(); i++) v(static_cast<int64_t>(i)) = features[i];
	return neural_act(net, v, m_p);
}

std::vector<double> featurize_list(const State& s, const Parameterization& est,
                                   const SpaceBounds& bounds) {
	const Eigen::VectorXd f = featurize(s, est, bounds);
	return std::vector<double>(f.data(), f.data() + f.size());
}

struct PyDp {
	double gain;
	std::vector<int64_t> policy;
	int64_t iterations;
};

PyDp dp_solve(const Instance& inst, double tol) {
	const DpResult r = dp_average_cost(enumerate_transitions(inst), tol);
	return {r.gain, r.policy, r.iterations};
}

double distance(const Instance& a, const Instance& b) {
	return param_distance(a, b, shared_domain(a, b));
}

BoundCheckResult bound_check_pair(const Instance& truth, const Instance& estimate,
                                  int64_t horizon) {
	const TruncatedDomain dom = shared_domain(truth, estimate);
	const DpResult dp = dp_average_cost(enumerate_transitions(truth, dom), 1e-7, 500000);
	return bound_check(truth, {&estimate}, dp.policy, dom, horizon);
}

std::vector<Network> train(const DclConfig& dcl, const SpaceBounds& bounds,
                           const TrainConfig& tc, uint64_t seed) {
	return superdcl_train(dcl, bounds, tc, seed).networks;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
	m.doc() = "training and deployment engine for lost-sales inventory agents";

	py::register_exception<Error>(m, "TedError");

	py::class_<Pmf>(m, "Pmf")
	    .def(py::init<>())
	    .def_readwrite("probs", &Pmf::probs)
	    .def("mean", &Pmf::mean)
	    .def("variance", &Pmf::variance)
	    .def("fractile", &Pmf::fractile)
	    .def("d_max", &Pmf::d_max);

	m.def("sigma_min", &sigma_min, py::arg("mu"));
	m.def("fit_two_moment", &fit_two_moment, py::arg("mu"), py::arg("sigma"));
	m.def("truncate_renormalize", &truncate_renormalize, py::arg("pmf"), py::arg("eps"));

	py::class_<SpaceBounds>(m, "SpaceBounds")
	    .def(py::init<>())
	    .def_readwrite("p_min", &SpaceBounds::p_min)
	    .def_readwrite("p_max", &SpaceBounds::p_max)
	    .def_readwrite("mu_min", &SpaceBounds::mu_min)
	    .def_readwrite("mu_max", &SpaceBounds::mu_max)
	    .def_readwrite("k_max", &SpaceBounds::k_max)
	    .def_readwrite("l_max", &SpaceBounds::l_max)
	    .def_readwrite("epsilon", &SpaceBounds::epsilon)
	    .def("validate", &SpaceBounds::validate);

	py::class_<EngineLimits>(m, "EngineLimits")
	    .def_readonly("d_max", &EngineLimits::d_max)
	    .def_readonly("m", &EngineLimits::m)
	    .def_readonly("i_max", &EngineLimits::i_max);
	m.def("compute_limits", &compute_limits, py::arg("bounds"));

	py::class_<DemandSpec>(m, "DemandSpec")
	    .def_readonly("cycle_length", &DemandSpec::cycle_length)
	    .def_readonly("mu", &DemandSpec::mu)
	    .def_readonly("sigma", &DemandSpec::sigma)
	    .def_readonly("pmfs", &DemandSpec::pmfs);
	py::class_<LeadTimeSpec>(m, "LeadTimeSpec")
	    .def(py::init<>())
	    .def_readwrite("crossover", &LeadTimeSpec::crossover)
	    .def_readwrite("probs", &LeadTimeSpec::probs)
	    .def("deterministic", &LeadTimeSpec::deterministic)
	    .def("mean", &LeadTimeSpec::mean);
	py::class_<Parameterization>(m, "Parameterization")
	    .def(py::init<>())
	    .def_readwrite("h", &Parameterization::h)
	    .def_readwrite("p", &Parameterization::p)
	    .def_readwrite("demand", &Parameterization::demand)
	    .def_readwrite("leadtime", &Parameterization::leadtime);

	m.def("make_demand_spec", &make_demand_spec, py::arg("mu"), py::arg("sigma"),
	      py::arg("eps") = 1e-4);
	m.def("deterministic_leadtime", &deterministic_leadtime, py::arg("lead"),
	      py::arg("l_max"));
	m.def("sample_parameterization", &sample_one, py::arg("bounds"), py::arg("seed"));
	m.def("sample_parameterizations", &sample_many, py::arg("bounds"), py::arg("seed"),
	      py::arg("count"));
	m.def("validate_parameterization", &validate_parameterization, py::arg("p"),
	      py::arg("bounds"));
	m.def("to_record", &to_record, py::arg("p"));
	m.def("from_record", &from_record, py::arg("line"), py::arg("bounds"));

	py::class_<Order>(m, "Order")
	    .def(py::init<>())
	    .def_readwrite("age", &Order::age)
	    .def_readwrite("qty", &Order::qty)
	    .def_readwrite("remaining", &Order::remaining);
	py::class_<State>(m, "State")
	    .def(py::init<>())
	    .def_readwrite("on_hand", &State::on_hand)
	    .def_readwrite("outstanding", &State::outstanding)
	    .def_readwrite("phase", &State::phase)
	    .def("inventory_position", &State::inventory_position);
	py::class_<Observation>(m, "Observation")
	    .def_readonly("sale", &Observation::sale)
	    .def_readonly("censored", &Observation::censored)
	    .def_readonly("demand_observed", &Observation::demand_observed)
	    .def_readonly("arrival_leads", &Observation::arrival_leads)
	    .def_readonly("phase", &Observation::phase);
	py::class_<PeriodOutcome>(m, "PeriodOutcome")
	    .def_readonly("next", &PeriodOutcome::next)
	    .def_readonly("cost", &PeriodOutcome::cost)
	    .def_readonly("profit", &PeriodOutcome::profit)
	    .def_readonly("observation", &PeriodOutcome::observation);

	m.def("period_cost", &period_cost);
	m.def("period_profit", &period_profit);
	m.def("action_bound", &action_bound);
	m.def("base_stock_bound", &base_stock_bound);

	py::class_<Instance>(m, "Instance")
	    .def(py::init<Parameterization, EngineLimits>())
	    .def_property_readonly("params", &Instance::params)
	    .def("m_p", &Instance::m_p)
	    .def("i_max", &Instance::i_max)
	    .def("cycle_length", &Instance::cycle_length)
	    .def("action_top", &Instance::action_top)
	    .def("initial_state", &Instance::initial_state)
	    .def("transition", &transition_seeded, py::arg("state"), py::arg("action"),
	         py::arg("seed"));

	m.def("feature_length", &feature_length);
	m.def("featurize", &featurize_list, py::arg("state"), py::arg("estimate"),
	      py::arg("bounds"));

	py::class_<Network>(m, "Network")
	    .def(py::init<>())
	    .def_static("he_init", &Network::he_init, py::arg("dims"), py::arg("seed"))
	    .def("dims", &Network::dims)
	    .def("input_dim", &Network::input_dim)
	    .def("output_dim", &Network::output_dim)
	    .def("forward", &forward_list, py::arg("x"));
	m.def("save_weights", &save_weights, py::arg("net"), py::arg("path"));
	m.def("load_weights", &load_weights, py::arg("path"));
	m.def("neural_act", &neural_act_list, py::arg("net"), py::arg("features"),
	      py::arg("m_p"));

	py::class_<Policy, std::shared_ptr<Policy>>(m, "Policy")
	    .def("name", &Policy::name)
	    .def("act", &Policy::act, py::arg("state"), py::arg("instance"));
	py::class_<BaseStockPolicy, Policy, std::shared_ptr<BaseStockPolicy>>(
	    m, "BaseStockPolicy")
	    .def(py::init<std::vector<int64_t>>(), py::arg("levels"));
	py::class_<CappedBaseStockPolicy, Policy, std::shared_ptr<CappedBaseStockPolicy>>(
	    m, "CappedBaseStockPolicy")
	    .def(py::init<std::vector<int64_t>, int64_t>(), py::arg("levels"), py::arg("cap"));
	py::class_<InitialPolicy, Policy, std::shared_ptr<InitialPolicy>>(m, "InitialPolicy")
	    .def(py::init<>());
	py::class_<NeuralPolicy, Policy, std::shared_ptr<NeuralPolicy>>(m, "NeuralPolicy")
	    .def(py::init([](const Network& net, const SpaceBounds& bounds) {
		         return NeuralPolicy(std::make_shared<Network>(net), bounds);
	         }),
	         py::arg("net"), py::arg("bounds"));

	py::enum_<Objective>(m, "Objective")
	    .value("cost", Objective::cost)
	    .value("profit", Objective::profit);
	py::class_<EvalConfig>(m, "EvalConfig")
	    .def(py::init<>())
	    .def_readwrite("runs", &EvalConfig::runs)
	    .def_readwrite("horizon", &EvalConfig::horizon)
	    .def_readwrite("warmup", &EvalConfig::warmup)
	    .def_readwrite("seed", &EvalConfig::seed)
	    .def_readwrite("objective", &EvalConfig::objective)
	    .def_readwrite("threads", &EvalConfig::threads);
	py::class_<EvalResult>(m, "EvalResult")
	    .def_readonly("mean", &EvalResult::mean)
	    .def_readonly("ci_half", &EvalResult::ci_half)
	    .def_readonly("runs", &EvalResult::runs)
	    .def_readonly("horizon", &EvalResult::horizon)
	    .def_readonly("ci_within_1pct", &EvalResult::ci_within_1pct);
	m.def("evaluate_policy", &evaluate_policy, py::arg("policy"), py::arg("instance"),
	      py::arg("config"), py::call_guard<py::gil_scoped_release>());
	m.def("relative_cost_gap", &relative_cost_gap);
	m.def("relative_profit_gap", &relative_profit_gap);

	py::enum_<BenchmarkKind>(m, "BenchmarkKind")
	    .value("bsp", BenchmarkKind::bsp)
	    .value("cbsp", BenchmarkKind::cbsp);
	py::class_<BenchmarkResult>(m, "BenchmarkResult")
	    .def_readonly("policy", &BenchmarkResult::policy)
	    .def_readonly("levels", &BenchmarkResult::levels)
	    .def_readonly("cap", &BenchmarkResult::cap)
	    .def_readonly("eval", &BenchmarkResult::eval);
	m.def("optimize_benchmark", &optimize_benchmark, py::arg("instance"), py::arg("kind"),
	      py::arg("config"), py::call_guard<py::gil_scoped_release>());

	py::class_<TedConfig>(m, "TedConfig")
	    .def(py::init<>())
	    .def_readwrite("runs", &TedConfig::runs)
	    .def_readwrite("seed", &TedConfig::seed)
	    .def_readwrite("demand_known", &TedConfig::demand_known)
	    .def_readwrite("leadtime_known", &TedConfig::leadtime_known)
	    .def_readwrite("horizons", &TedConfig::horizons);
	py::class_<TedPoint>(m, "TedPoint")
	    .def_readonly("horizon", &TedPoint::horizon)
	    .def_readonly("mean_cost", &TedPoint::mean_cost)
	    .def_readonly("cost_ci", &TedPoint::cost_ci)
	    .def_readonly("mean_profit", &TedPoint::mean_profit)
	    .def_readonly("profit_ci", &TedPoint::profit_ci);
	m.def("run_ted", &run_ted, py::arg("truth"), py::arg("net"), py::arg("bounds"),
	      py::arg("limits"), py::arg("config"), py::call_guard<py::gil_scoped_release>());

	m.def("build_testbed", &build_testbed, py::arg("case_id"));
	m.def("testbed_bounds", &testbed_bounds);

	py::class_<DemandObs>(m, "DemandObs")
	    .def(py::init<int64_t, bool>(), py::arg("value"), py::arg("censored") = false)
	    .def_readwrite("value", &DemandObs::value)
	    .def_readwrite("censored", &DemandObs::censored);
	m.def("km_cdf", &km_cdf, py::arg("observations"), py::arg("d_max"));
	m.def("moments_from_cdf", &moments_from_cdf, py::arg("cdf"), py::arg("bounds"));
	m.def("leadtime_estimate", &leadtime_estimate, py::arg("counts"));
	m.def("fallback_parameterization", &fallback_parameterization, py::arg("knowns"),
	      py::arg("demand_known"), py::arg("leadtime_known"), py::arg("bounds"));

	py::class_<EstimatorState>(m, "EstimatorState")
	    .def(py::init<const Parameterization&, bool, bool, const SpaceBounds&,
	                  const EngineLimits&>(),
	         py::arg("truth"), py::arg("demand_known"), py::arg("leadtime_known"),
	         py::arg("bounds"), py::arg("limits"))
	    .def("update", &EstimatorState::update, py::arg("observation"))
	    .def("assemble", &EstimatorState::assemble);

	py::class_<DclConfig>(m, "DclConfig")
	    .def(py::init<>())
	    .def_readwrite("iterations", &DclConfig::iterations)
	    .def_readwrite("samples", &DclConfig::samples)
	    .def_readwrite("workers", &DclConfig::workers)
	    .def_readwrite("samples_per_param", &DclConfig::samples_per_param)
	    .def_readwrite("warmup", &DclConfig::warmup)
	    .def_readwrite("rollouts", &DclConfig::rollouts)
	    .def_readwrite("horizon", &DclConfig::horizon)
	    .def_readwrite("promising", &DclConfig::promising);
	py::class_<TrainConfig>(m, "TrainConfig")
	    .def(py::init<>())
	    .def_readwrite("hidden", &TrainConfig::hidden)
	    .def_readwrite("minibatch", &TrainConfig::minibatch)
	    .def_readwrite("max_epochs", &TrainConfig::max_epochs)
	    .def_readwrite("patience", &TrainConfig::patience)
	    .def_readwrite("learning_rate", &TrainConfig::learning_rate)
	    .def_readwrite("validation_fraction", &TrainConfig::validation_fraction)
	    .def_readwrite("seed", &TrainConfig::seed);
	m.def("superdcl_train", &train, py::arg("dcl"), py::arg("bounds"), py::arg("train"),
	      py::arg("seed"), py::call_guard<py::gil_scoped_release>());

	py::class_<PyDp>(m, "DpSolution")
	    .def_readonly("gain", &PyDp::gain)
	    .def_readonly("policy", &PyDp::policy)
	    .def_readonly("iterations", &PyDp::iterations);
	m.def("dp_average_cost", &dp_solve, py::arg("instance"), py::arg("tol") = 1e-9,
	      py::call_guard<py::gil_scoped_release>());
	m.def("param_distance", &distance, py::arg("a"), py::arg("b"));
	py::class_<BoundCheckResult>(m, "BoundCheckResult")
	    .def_readonly("lhs", &BoundCheckResult::lhs)
	    .def_readonly("rhs", &BoundCheckResult::rhs)
	    .def_readonly("holds", &BoundCheckResult::holds);
	m.def("bound_check", &bound_check_pair, py::arg("truth"), py::arg("estimate"),
	      py::arg("horizon"), py::call_guard<py::gil_scoped_release>());
}
