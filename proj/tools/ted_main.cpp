#include <CLI11.hpp>
#include <iostream>

#include "ted/error.h"
#include "ted/runner.h"

namespace {

struct CommonArgs {
	std::string config_path;
	int64_t seed = -1;
	std::string out;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
	cmd->add_option("--config", args.config_path, "key=value configuration file");
	cmd->add_option("--seed", args.seed, "overrides run.seed");
	cmd->add_option("--out", args.out, "overrides run.out");
}

ted::RunConfig resolve(const CommonArgs& args) {
	ted::RunConfig cfg = args.config_path.empty()
	                         ? ted::RunConfig{}
	                         : ted::parse_config_file(args.config_path);
	if (args.seed >= 0) {
		cfg.seed = static_cast<uint64_t>(args.seed);
		cfg.seed_set = true;
	}
	if (!args.out.empty()) cfg.out_dir = args.out;
	return cfg;
}

}  // namespace

int main(int argc, char** argv) {
	CLI::App app{"training and deployment engine for lost-sales inventory agents"};
	app.require_subcommand(1);

	CommonArgs train_args, eval_args, ted_args, oracle_args, testbed_args;
	auto* train = app.add_subcommand("train", "run policy iteration and save networks");
	add_common(train, train_args);
	auto* evaluate = app.add_subcommand("evaluate", "benchmark policies on a testbed");
	add_common(evaluate, eval_args);
	auto* tedrun = app.add_subcommand("ted-run", "deploy with online estimation");
	add_common(tedrun, ted_args);
	auto* oracle = app.add_subcommand("oracle", "exact-model audit of bounds and DP");
	add_common(oracle, oracle_args);
	auto* testbed = app.add_subcommand("testbed", "write the benchmark instance files");
	add_common(testbed, testbed_args);

	CLI11_PARSE(app, argc, argv);

	try {
		if (train->parsed()) return ted::cmd_train(resolve(train_args));
		if (evaluate->parsed()) return ted::cmd_evaluate(resolve(eval_args));
		if (tedrun->parsed()) return ted::cmd_ted_run(resolve(ted_args));
		if (oracle->parsed()) return ted::cmd_oracle(resolve(oracle_args));
		if (testbed->parsed()) return ted::cmd_testbed(resolve(testbed_args));
	} catch (const std::exception& e) {
		std::cerr << e.what() << std::endl;
		return 2;
	}
	return 0;
}
