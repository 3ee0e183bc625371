#include "ted/textio.h"

#include <charconv>

#include "ted/error.h"

namespace ted {

std::string format_double(double v) {
	char buf[64];
	auto res = std::to_chars(buf, buf + sizeof(buf), v);
	return std::string(buf, res.ptr);
}

std::string format_int(int64_t v) {
	char buf[32];
	auto res = std::to_chars(buf, buf + sizeof(buf), v);
	return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
	double v{};
	auto res = std::from_chars(s.data(), s.data() + s.size(), v);
	if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
		throw Error("malformed number: '" + std::string(s) + "'");
	return v;
}

int64_t parse_int(std::string_view s) {
	int64_t v{};
	auto res = std::from_chars(s.data(), s.data() + s.size(), v);
	if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
		throw Error("malformed integer: '" + std::string(s) + "'");
	return v;
}

std::vector<std::string_view> split_ws(std::string_view line) {
	std::vector<std::string_view> out;
	size_t i = 0;
	while (i < line.size()) {
		while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) i++;
		size_t j = i;
		while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') j++;
		if (j > i) out.push_back(line.substr(i, j - i));
		i = j;
	}
	return out;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
	std::vector<std::string_view> out;
	size_t start = 0;
	for (size_t i = 0; i <= line.size(); i++) {
		if (i == line.size() || line[i] == sep) {
			out.push_back(line.substr(start, i - start));
			start = i + 1;
		}
	}
	return out;
}

}  // namespace ted
