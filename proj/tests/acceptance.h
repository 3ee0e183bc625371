#pragma once

#include <cstdint>
#include <set>
#include <string>

namespace ted::accept {

struct Selection {
	std::set<int64_t> only;  // empty = run everything
	bool selected(int64_t id) const { return only.empty() || only.count(id) > 0; }
};

Selection parse_selection(const std::string& csv);

// Runs the selected criteria, printing one line per criterion; returns the
// number of failed criteria.
int run_all(const Selection& sel);

}  // namespace ted::accept
