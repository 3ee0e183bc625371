#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "ted/config.h"
#include "ted/error.h"
#include "ted/runner.h"

using namespace ted;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
	std::ifstream f(p, std::ios::binary);
	REQUIRE(f.good());
	return std::string((std::istreambuf_iterator<char>(f)),
	                   std::istreambuf_iterator<char>());
}

fs::path fresh_dir(const std::string& name) {
	const fs::path dir = fs::temp_directory_path() / name;
	fs::remove_all(dir);
	return dir;
}

RunConfig tiny_train_config(const std::string& out) {
	RunConfig cfg = parse_config_text(
	    "bounds.p_min = 4\nbounds.p_max = 19\nbounds.mu_min = 2\nbounds.mu_max = 4\n"
	    "bounds.k_max = 1\nbounds.l_max = 1\n"
	    "dcl.iterations = 2\ndcl.samples = 120\ndcl.workers = 2\n"
	    "dcl.samples_per_param = 10\ndcl.warmup = 3\ndcl.rollouts = 3\n"
	    "dcl.horizon = 3\ndcl.promising = 3\n"
	    "train.hidden = 16\ntrain.minibatch = 32\ntrain.max_epochs = 5\n"
	    "train.patience = 3\n"
	    "run.seed = 42\n");
	cfg.out_dir = out;
	return cfg;
}

}  // namespace

TEST_CASE("training writes weight files and is byte-reproducible") {
	const fs::path dir_a = fresh_dir("ted_train_a");
	const fs::path dir_b = fresh_dir("ted_train_b");
	REQUIRE(cmd_train(tiny_train_config(dir_a.string())) == 0);
	REQUIRE(cmd_train(tiny_train_config(dir_b.string())) == 0);
	for (int64_t i = 0; i < 2; i++) {
		const auto name = "iter_" + std::to_string(i) + ".net";
		const std::string a = slurp(dir_a / name);
		CHECK(a.rfind("TEDNET v1\n", 0) == 0);
		CHECK(a == slurp(dir_b / name));
	}
	CHECK(slurp(dir_a / "metrics.csv") == slurp(dir_b / "metrics.csv"));
	CHECK(fs::exists(dir_a / "config.snapshot"));
	CHECK(fs::exists(dir_a / "log.txt"));
	fs::remove_all(dir_a);
	fs::remove_all(dir_b);
}

TEST_CASE("training resumes from completed iterations") {
	const fs::path dir_a = fresh_dir("ted_resume_a");
	const fs::path dir_b = fresh_dir("ted_resume_b");
	REQUIRE(cmd_train(tiny_train_config(dir_a.string())) == 0);
	// pre-seed the resume directory with the finished first iteration
	fs::create_directories(dir_b);
	fs::copy_file(dir_a / "iter_0.net", dir_b / "iter_0.net");
	REQUIRE(cmd_train(tiny_train_config(dir_b.string())) == 0);
	CHECK(slurp(dir_a / "iter_1.net") == slurp(dir_b / "iter_1.net"));
	fs::remove_all(dir_a);
	fs::remove_all(dir_b);
}

TEST_CASE("a missing seed is an explicit error") {
	RunConfig cfg = tiny_train_config("unused");
	cfg.seed_set = false;
	CHECK_THROWS_WITH_AS(cmd_train(cfg), doctest::Contains("run.seed"), Error);
}

TEST_CASE("the testbed command writes the three case files") {
	const fs::path dir = fresh_dir("ted_testbed");
	RunConfig cfg;
	cfg.out_dir = dir.string();
	REQUIRE(cmd_testbed(cfg) == 0);
	const std::vector<std::pair<std::string, int64_t>> expect = {
	    {"case1.txt", 320}, {"case2.txt", 243}, {"case3.txt", 240}};
	for (const auto& [name, count] : expect) {
		std::ifstream f(dir / name);
		REQUIRE(f.good());
		int64_t lines = 0;
		std::string line;
		while (std::getline(f, line))
			if (!line.empty()) lines++;
		CHECK(lines == count);
	}
	// records load back through the standard bounds
	const auto loaded = load_testbed((dir / "case3.txt").string(), testbed_bounds(), 1, 0);
	CHECK(loaded.size() == 240);
	fs::remove_all(dir);
}

TEST_CASE("evaluation emits the documented schema and reruns identically") {
	const fs::path train_dir = fresh_dir("ted_eval_train");
	RunConfig train_cfg = tiny_train_config(train_dir.string());
	REQUIRE(cmd_train(train_cfg) == 0);

	// a two-instance record file within the reduced bounds
	const fs::path bed = train_dir / "bed.txt";
	{
		std::ofstream f(bed);
		RngStream rng(8);
		for (int64_t i = 0; i < 2; i++)
			f << to_record(sample_parameterization(train_cfg.bounds, rng)) << "\n";
	}

	auto eval_cfg = [&](const std::string& out) {
		RunConfig cfg = train_cfg;
		cfg.out_dir = out;
		cfg.weights = (train_dir / "iter_1.net").string();
		cfg.testbed = bed.string();
		cfg.policies = {"bsp", "neural"};
		cfg.eval.runs = 8;
		cfg.eval.horizon = 60;
		cfg.eval.warmup = 10;
		cfg.search.runs = 8;
		cfg.search.horizon = 60;
		cfg.search.warmup = 10;
		return cfg;
	};
	const fs::path out_a = fresh_dir("ted_eval_a");
	const fs::path out_b = fresh_dir("ted_eval_b");
	REQUIRE(cmd_evaluate(eval_cfg(out_a.string())) == 0);
	REQUIRE(cmd_evaluate(eval_cfg(out_b.string())) == 0);
	const std::string csv = slurp(out_a / "results.csv");
	CHECK(csv.rfind(
	          "instance,policy,runs,horizon,mean,ci_half,ci_within_1pct,gap_vs_baseline\n",
	          0) == 0);
	CHECK(csv == slurp(out_b / "results.csv"));
	// the baseline policy reports a zero gap against itself
	CHECK(csv.find("0,bsp,8,60") != std::string::npos);
	const auto first_row = csv.substr(csv.find('\n') + 1);
	CHECK(first_row.substr(0, first_row.find('\n')).ends_with(",0"));
	fs::remove_all(train_dir);
	fs::remove_all(out_a);
	fs::remove_all(out_b);
}

TEST_CASE("deployment command honors horizon overrides") {
	const fs::path train_dir = fresh_dir("ted_tedrun_train");
	RunConfig train_cfg = tiny_train_config(train_dir.string());
	REQUIRE(cmd_train(train_cfg) == 0);
	const fs::path bed = train_dir / "bed.txt";
	{
		std::ofstream f(bed);
		RngStream rng(9);
		f << to_record(sample_parameterization(train_cfg.bounds, rng)) << "\n";
	}
	RunConfig cfg = train_cfg;
	const fs::path out = fresh_dir("ted_tedrun_out");
	cfg.out_dir = out.string();
	cfg.weights = (train_dir / "iter_1.net").string();
	cfg.testbed = bed.string();
	cfg.ted.runs = 4;
	cfg.ted.horizons = {30, 60};
	cfg.ted_blocks = {"demand", "both"};
	REQUIRE(cmd_ted_run(cfg) == 0);
	const std::string csv = slurp(out / "ted.csv");
	CHECK(csv.find("0,demand,30,") != std::string::npos);
	CHECK(csv.find("0,demand,60,") != std::string::npos);
	CHECK(csv.find("0,both,60,") != std::string::npos);
	CHECK(csv.find(",2000,") == std::string::npos);  // default horizons overridden
	fs::remove_all(train_dir);
	fs::remove_all(out);
}

TEST_CASE("the oracle audit passes clean and fails when sabotaged") {
	RunConfig cfg;
	cfg.seed = 13;
	cfg.seed_set = true;
	cfg.oracle_trials = 3;
	cfg.oracle_horizon = 12;
	const fs::path out = fresh_dir("ted_oracle_out");
	cfg.out_dir = out.string();
	REQUIRE(cmd_oracle(cfg) == 0);
	const std::string report = slurp(out / "oracle.csv");
	CHECK(report.rfind("trial,lhs,rhs,holds\n", 0) == 0);
	CHECK(report.find(",1\n") != std::string::npos);

	cfg.oracle_flip_dp_sign = true;  // fault injection must flip the exit code
	const fs::path out2 = fresh_dir("ted_oracle_out2");
	cfg.out_dir = out2.string();
	CHECK(cmd_oracle(cfg) != 0);
	fs::remove_all(out);
	fs::remove_all(out2);
}
