#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ted/eval.h"
#include "ted/nn.h"
#include "ted/params.h"
#include "ted/superdcl.h"

namespace ted {

// Flat key-value configuration with dotted sections, e.g. `dcl.samples=50000`.
// Unknown keys are errors, not warnings.
struct RunConfig {
	SpaceBounds bounds;
	DclConfig dcl;
	TrainConfig train;
	EvalConfig eval;
	EvalConfig search;    // budget for simulation-based benchmark tuning
	TedConfig ted;
	std::vector<std::string> ted_blocks = {"demand"};  // demand|leadtime|both

	uint64_t seed = 0;
	bool seed_set = false;
	std::string out_dir = "run";
	std::string weights;                // network file for evaluate/ted-run
	std::string testbed = "case1";      // case1|case2|case3 or a record file
	int64_t instance_limit = 0;         // 0 = every instance
	int64_t instance_stride = 1;        // keep every n-th instance
	std::vector<std::string> policies = {"neural", "bsp", "cbsp"};

	int64_t oracle_trials = 100;
	int64_t oracle_horizon = 32;
	bool oracle_flip_dp_sign = false;   // fault-injection hook for the audit

	// effective values of every key, for the run-directory snapshot
	std::string snapshot() const;
};

RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);

}  // namespace ted
