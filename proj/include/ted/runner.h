#pragma once

#include "ted/config.h"

namespace ted {

// CLI command drivers; each returns a process exit code and writes its
// artifacts under cfg.out_dir.
int cmd_train(const RunConfig& cfg);
int cmd_evaluate(const RunConfig& cfg);
int cmd_ted_run(const RunConfig& cfg);
int cmd_oracle(const RunConfig& cfg);
int cmd_testbed(const RunConfig& cfg);

// Testbed selection shared with the commands: case1|case2|case3 or a path to
// a record file, thinned by stride and truncated to limit when nonzero.
std::vector<Parameterization> load_testbed(const std::string& spec,
                                           const SpaceBounds& bounds,
                                           int64_t stride, int64_t limit);

}  // namespace ted
