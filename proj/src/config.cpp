#include "ted/config.h"

#include <fstream>
#include <functional>
#include <sstream>

#include "ted/error.h"
#include "ted/textio.h"

namespace ted {

namespace {

std::string trim(std::string_view s) {
	size_t a = 0, b = s.size();
	while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) a++;
	while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) b--;
	return std::string(s.substr(a, b - a));
}

bool parse_bool(const std::string& key, const std::string& v) {
	if (v == "true" || v == "1" || v == "yes") return true;
	if (v == "false" || v == "0" || v == "no") return false;
	throw Error("config: key '" + key + "' expects a boolean, got '" + v + "'");
}

std::vector<int64_t> parse_int_list(const std::string& key, const std::string& v) {
	std::vector<int64_t> out;
	for (auto part : split(v, ',')) {
		const std::string t = trim(part);
		if (t.empty()) throw Error("config: key '" + key + "' has an empty list entry");
		out.push_back(parse_int(t));
	}
	if (out.empty()) throw Error("config: key '" + key + "' expects a nonempty list");
	return out;
}

std::vector<std::string> parse_str_list(const std::string& v) {
	std::vector<std::string> out;
	for (auto part : split(v, ',')) {
		const std::string t = trim(part);
		if (!t.empty()) out.push_back(t);
	}
	return out;
}

Objective parse_objective(const std::string& key, const std::string& v) {
	if (v == "cost") return Objective::cost;
	if (v == "profit") return Objective::profit;
	throw Error("config: key '" + key + "' expects cost or profit, got '" + v + "'");
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
	RunConfig cfg;
	cfg.search.runs = 64;
	cfg.search.horizon = 1000;
	cfg.search.warmup = 100;

	using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;
	static const std::map<std::string, Setter> setters = {
	    {"bounds.p_min", [](RunConfig& c, auto& k, auto& v) { c.bounds.p_min = parse_double(v); }},
	    {"bounds.p_max", [](RunConfig& c, auto& k, auto& v) { c.bounds.p_max = parse_double(v); }},
	    {"bounds.mu_min", [](RunConfig& c, auto& k, auto& v) { c.bounds.mu_min = parse_double(v); }},
	    {"bounds.mu_max", [](RunConfig& c, auto& k, auto& v) { c.bounds.mu_max = parse_double(v); }},
	    {"bounds.k_max", [](RunConfig& c, auto& k, auto& v) { c.bounds.k_max = parse_int(v); }},
	    {"bounds.l_max", [](RunConfig& c, auto& k, auto& v) { c.bounds.l_max = parse_int(v); }},
	    {"bounds.epsilon", [](RunConfig& c, auto& k, auto& v) { c.bounds.epsilon = parse_double(v); }},
	    {"dcl.iterations", [](RunConfig& c, auto& k, auto& v) { c.dcl.iterations = parse_int(v); }},
	    {"dcl.samples", [](RunConfig& c, auto& k, auto& v) { c.dcl.samples = parse_int(v); }},
	    {"dcl.workers", [](RunConfig& c, auto& k, auto& v) { c.dcl.workers = parse_int(v); }},
	    {"dcl.samples_per_param", [](RunConfig& c, auto& k, auto& v) { c.dcl.samples_per_param = parse_int(v); }},
	    {"dcl.warmup", [](RunConfig& c, auto& k, auto& v) { c.dcl.warmup = parse_int(v); }},
	    {"dcl.rollouts", [](RunConfig& c, auto& k, auto& v) { c.dcl.rollouts = parse_int(v); }},
	    {"dcl.horizon", [](RunConfig& c, auto& k, auto& v) { c.dcl.horizon = parse_int(v); }},
	    {"dcl.promising", [](RunConfig& c, auto& k, auto& v) { c.dcl.promising = parse_int(v); }},
	    {"train.hidden", [](RunConfig& c, auto& k, auto& v) { c.train.hidden = parse_int_list(k, v); }},
	    {"train.minibatch", [](RunConfig& c, auto& k, auto& v) { c.train.minibatch = parse_int(v); }},
	    {"train.max_epochs", [](RunConfig& c, auto& k, auto& v) { c.train.max_epochs = parse_int(v); }},
	    {"train.patience", [](RunConfig& c, auto& k, auto& v) { c.train.patience = parse_int(v); }},
	    {"train.learning_rate", [](RunConfig& c, auto& k, auto& v) { c.train.learning_rate = parse_double(v); }},
	    {"train.beta1", [](RunConfig& c, auto& k, auto& v) { c.train.beta1 = parse_double(v); }},
	    {"train.beta2", [](RunConfig& c, auto& k, auto& v) { c.train.beta2 = parse_double(v); }},
	    {"train.adam_eps", [](RunConfig& c, auto& k, auto& v) { c.train.adam_eps = parse_double(v); }},
	    {"train.validation_fraction", [](RunConfig& c, auto& k, auto& v) { c.train.validation_fraction = parse_double(v); }},
	    {"eval.runs", [](RunConfig& c, auto& k, auto& v) { c.eval.runs = parse_int(v); }},
	    {"eval.horizon", [](RunConfig& c, auto& k, auto& v) { c.eval.horizon = parse_int(v); }},
	    {"eval.warmup", [](RunConfig& c, auto& k, auto& v) { c.eval.warmup = parse_int(v); }},
	    {"eval.objective", [](RunConfig& c, auto& k, auto& v) { c.eval.objective = parse_objective(k, v); }},
	    {"eval.threads", [](RunConfig& c, auto& k, auto& v) { c.eval.threads = parse_int(v); }},
	    {"search.runs", [](RunConfig& c, auto& k, auto& v) { c.search.runs = parse_int(v); }},
	    {"search.horizon", [](RunConfig& c, auto& k, auto& v) { c.search.horizon = parse_int(v); }},
	    {"search.warmup", [](RunConfig& c, auto& k, auto& v) { c.search.warmup = parse_int(v); }},
	    {"ted.runs", [](RunConfig& c, auto& k, auto& v) { c.ted.runs = parse_int(v); }},
	    {"ted.horizons", [](RunConfig& c, auto& k, auto& v) { c.ted.horizons = parse_int_list(k, v); }},
	    {"ted.blocks", [](RunConfig& c, auto& k, auto& v) { c.ted_blocks = parse_str_list(v); }},
	    {"run.seed", [](RunConfig& c, auto& k, auto& v) { c.seed = static_cast<uint64_t>(parse_int(v)); c.seed_set = true; }},
	    {"run.out", [](RunConfig& c, auto& k, auto& v) { c.out_dir = v; }},
	    {"run.weights", [](RunConfig& c, auto& k, auto& v) { c.weights = v; }},
	    {"run.testbed", [](RunConfig& c, auto& k, auto& v) { c.testbed = v; }},
	    {"run.instances", [](RunConfig& c, auto& k, auto& v) { c.instance_limit = parse_int(v); }},
	    {"run.stride", [](RunConfig& c, auto& k, auto& v) { c.instance_stride = parse_int(v); }},
	    {"run.policies", [](RunConfig& c, auto& k, auto& v) { c.policies = parse_str_list(v); }},
	    {"oracle.trials", [](RunConfig& c, auto& k, auto& v) { c.oracle_trials = parse_int(v); }},
	    {"oracle.horizon", [](RunConfig& c, auto& k, auto& v) { c.oracle_horizon = parse_int(v); }},
	    {"oracle.flip_dp_sign", [](RunConfig& c, auto& k, auto& v) { c.oracle_flip_dp_sign = parse_bool(k, v); }},
	};

	std::istringstream in(text);
	std::string line;
	int64_t line_no = 0;
	while (std::getline(in, line)) {
		line_no++;
		const size_t hash = line.find('#');
		if (hash != std::string::npos) line.resize(hash);
		const std::string stripped = trim(line);
		if (stripped.empty()) continue;
		const size_t eq = stripped.find('=');
		if (eq == std::string::npos)
			throw Error("config: line " + format_int(line_no) + " is not key=value");
		const std::string key = trim(stripped.substr(0, eq));
		const std::string value = trim(stripped.substr(eq + 1));
		auto it = setters.find(key);
		if (it == setters.end())
			throw Error("config: unknown key '" + key + "' (line " + format_int(line_no) + ")");
		it->second(cfg, key, value);
	}
	return cfg;
}

RunConfig parse_config_file(const std::string& path) {
	std::ifstream f(path, std::ios::binary);
	if (!f) throw Error("config: cannot open " + path);
	std::ostringstream buf;
	buf << f.rdbuf();
	return parse_config_text(buf.str());
}

std::string RunConfig::snapshot() const {
	std::ostringstream out;
	out << "bounds.p_min=" << format_double(bounds.p_min) << "\n";
	out << "bounds.p_max=" << format_double(bounds.p_max) << "\n";
	out << "bounds.mu_min=" << format_double(bounds.mu_min) << "\n";
	out << "bounds.mu_max=" << format_double(bounds.mu_max) << "\n";
	out << "bounds.k_max=" << bounds.k_max << "\n";
	out << "bounds.l_max=" << bounds.l_max << "\n";
	out << "bounds.epsilon=" << format_double(bounds.epsilon) << "\n";
	out << "dcl.iterations=" << dcl.iterations << "\n";
	out << "dcl.samples=" << dcl.samples << "\n";
	out << "dcl.workers=" << dcl.workers << "\n";
	out << "dcl.samples_per_param=" << dcl.samples_per_param << "\n";
	out << "dcl.warmup=" << dcl.warmup << "\n";
	out << "dcl.rollouts=" << dcl.rollouts << "\n";
	out << "dcl.horizon=" << dcl.horizon << "\n";
	out << "dcl.promising=" << dcl.promising << "\n";
	out << "train.hidden=";
	for (size_t i = 0; i < train.hidden.size(); i++)
		out << (i ? "," : "") << train.hidden[i];
	out << "\n";
	out << "train.minibatch=" << train.minibatch << "\n";
	out << "train.max_epochs=" << train.max_epochs << "\n";
	out << "train.patience=" << train.patience << "\n";
	out << "train.learning_rate=" << format_double(train.learning_rate) << "\n";
	out << "train.beta1=" << format_double(train.beta1) << "\n";
	out << "train.beta2=" << format_double(train.beta2) << "\n";
	out << "train.adam_eps=" << format_double(train.adam_eps) << "\n";
	out << "train.validation_fraction=" << format_double(train.validation_fraction) << "\n";
	out << "eval.runs=" << eval.runs << "\n";
	out << "eval.horizon=" << eval.horizon << "\n";
	out << "eval.warmup=" << eval.warmup << "\n";
	out << "eval.objective=" << (eval.objective == Objective::cost ? "cost" : "profit") << "\n";
	out << "eval.threads=" << eval.threads << "\n";
	out << "search.runs=" << search.runs << "\n";
	out << "search.horizon=" << search.horizon << "\n";
	out << "search.warmup=" << search.warmup << "\n";
	out << "ted.runs=" << ted.runs << "\n";
	out << "ted.horizons=";
	for (size_t i = 0; i < ted.horizons.size(); i++)
		out << (i ? "," : "") << ted.horizons[i];
	out << "\n";
	out << "ted.blocks=";
	for (size_t i = 0; i < ted_blocks.size(); i++)
		out << (i ? "," : "") << ted_blocks[i];
	out << "\n";
	out << "run.seed=" << seed << "\n";
	out << "run.out=" << out_dir << "\n";
	out << "run.weights=" << weights << "\n";
	out << "run.testbed=" << testbed << "\n";
	out << "run.instances=" << instance_limit << "\n";
	out << "run.stride=" << instance_stride << "\n";
	out << "run.policies=";
	for (size_t i = 0; i < policies.size(); i++)
		out << (i ? "," : "") << policies[i];
	out << "\n";
	out << "oracle.trials=" << oracle_trials << "\n";
	out << "oracle.horizon=" << oracle_horizon << "\n";
	out << "oracle.flip_dp_sign=" << (oracle_flip_dp_sign ? "true" : "false") << "\n";
	return out.str();
}

}  // namespace ted
