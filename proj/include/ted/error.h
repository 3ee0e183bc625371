#pragma once

#include <stdexcept>
#include <string>

namespace ted {

class Error : public std::runtime_error {
public:
	explicit Error(const std::string& msg) : std::runtime_error("ted: " + msg) {}
};

}  // namespace ted
