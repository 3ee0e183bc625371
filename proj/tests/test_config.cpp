#include <doctest.h>

#include "ted/config.h"
#include "ted/error.h"

using namespace ted;

TEST_CASE("keys land in their sections") {
	const RunConfig cfg = parse_config_text(
	    "# comment line\n"
	    "bounds.l_max = 2\n"
	    "bounds.mu_max = 4.0\n"
	    "dcl.samples = 50000   # trailing comment\n"
	    "train.hidden = 64,32\n"
	    "eval.objective = profit\n"
	    "ted.horizons = 100,200\n"
	    "ted.blocks = demand,both\n"
	    "run.seed = 99\n"
	    "run.policies = neural,bsp\n");
	CHECK(cfg.bounds.l_max == 2);
	CHECK(cfg.bounds.mu_max == 4.0);
	CHECK(cfg.dcl.samples == 50000);
	REQUIRE(cfg.train.hidden == std::vector<int64_t>{64, 32});
	CHECK(cfg.eval.objective == Objective::profit);
	REQUIRE(cfg.ted.horizons == std::vector<int64_t>{100, 200});
	REQUIRE(cfg.ted_blocks == std::vector<std::string>{"demand", "both"});
	CHECK(cfg.seed == 99);
	CHECK(cfg.seed_set);
	REQUIRE(cfg.policies == std::vector<std::string>{"neural", "bsp"});
}

TEST_CASE("unknown keys are named in the error") {
	CHECK_THROWS_WITH_AS(parse_config_text("dcl.sample = 5\n"),
	                     doctest::Contains("dcl.sample"), Error);
	CHECK_THROWS_WITH_AS(parse_config_text("typo\n"), doctest::Contains("key=value"),
	                     Error);
}

TEST_CASE("value types are enforced") {
	CHECK_THROWS_AS(parse_config_text("dcl.samples = soon\n"), Error);
	CHECK_THROWS_AS(parse_config_text("eval.objective = revenue\n"), Error);
	CHECK_THROWS_AS(parse_config_text("oracle.flip_dp_sign = maybe\n"), Error);
}

TEST_CASE("defaults survive an empty config") {
	const RunConfig cfg = parse_config_text("");
	CHECK_FALSE(cfg.seed_set);
	CHECK(cfg.dcl.iterations == 5);
	CHECK(cfg.train.hidden == std::vector<int64_t>{256, 128, 128, 128});
	CHECK(cfg.train.minibatch == 1024);
	CHECK(cfg.train.max_epochs == 100);
	CHECK(cfg.train.patience == 15);
	CHECK(cfg.bounds.k_max == 7);
	CHECK(cfg.bounds.l_max == 10);
	CHECK(cfg.ted.horizons == std::vector<int64_t>{200, 500, 1000, 2000});
}

TEST_CASE("the snapshot reparses to the same configuration") {
	const RunConfig cfg = parse_config_text(
	    "bounds.l_max = 3\nrun.seed = 7\ndcl.workers = 2\neval.runs = 10\n");
	const RunConfig back = parse_config_text(cfg.snapshot());
	CHECK(back.bounds.l_max == 3);
	CHECK(back.seed == 7);
	CHECK(back.dcl.workers == 2);
	CHECK(back.eval.runs == 10);
	CHECK(back.snapshot() == cfg.snapshot());
}
