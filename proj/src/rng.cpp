#include "ted/rng.h"

namespace ted {

namespace {

uint64_t splitmix64(uint64_t& x) {
	x += 0x9e3779b97f4a7c15ULL;
	uint64_t z = x;
	z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
	z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
	return z ^ (z >> 31);
}

uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngStream::RngStream(uint64_t seed) {
	uint64_t x = seed;
	for (auto& w : s_) w = splitmix64(x);
	// splitmix64 never yields the all-zero state for four consecutive outputs,
	// but guard anyway.
	if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

uint64_t RngStream::next_u64() {
	const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
	const uint64_t t = s_[1] << 17;
	s_[2] ^= s_[0];
	s_[3] ^= s_[1];
	s_[1] ^= s_[2];
	s_[0] ^= s_[3];
	s_[2] ^= t;
	s_[3] = rotl(s_[3], 45);
	return result;
}

int64_t RngStream::next_int(int64_t n) {
	const auto range = static_cast<uint64_t>(n);
	uint64_t x = next_u64();
	__uint128_t m = static_cast<__uint128_t>(x) * range;
	auto low = static_cast<uint64_t>(m);
	if (low < range) {
		const uint64_t threshold = (0 - range) % range;
		while (low < threshold) {
			x = next_u64();
			m = static_cast<__uint128_t>(x) * range;
			low = static_cast<uint64_t>(m);
		}
	}
	return static_cast<int64_t>(m >> 64);
}

uint64_t derive_seed(uint64_t seed, uint64_t id) {
	uint64_t x = seed ^ (0x2545f4914f6cdd1dULL + id);
	uint64_t a = splitmix64(x);
	x ^= id * 0x9e3779b97f4a7c15ULL;
	return a ^ splitmix64(x);
}

uint64_t derive_seed(uint64_t seed, uint64_t id1, uint64_t id2) {
	return derive_seed(derive_seed(seed, id1), id2);
}

uint64_t derive_seed(uint64_t seed, uint64_t id1, uint64_t id2, uint64_t id3) {
	return derive_seed(derive_seed(seed, id1, id2), id3);
}

}  // namespace ted
