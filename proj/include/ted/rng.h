#pragma once

#include <cstdint>
#include <vector>

namespace ted {

// xoshiro256++ generator, seeded through splitmix64. Self-contained so that
// streams are bit-reproducible across platforms and compilers, which the
// std:: distributions do not guarantee.
class RngStream {
public:
	RngStream() : RngStream(0) {}
	explicit RngStream(uint64_t seed);

	uint64_t next_u64();

	// uniform double in [0, 1), 53 bits of randomness
	double next_double() {
		return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
	}

	// uniform integer in {0, .., n-1} (Lemire's method, n >= 1)
	int64_t next_int(int64_t n);

	// uniform integer in {lo, .., hi}
	int64_t next_int(int64_t lo, int64_t hi) { return lo + next_int(hi - lo + 1); }

	// uniform real in [lo, hi)
	double next_real(double lo, double hi) { return lo + (hi - lo) * next_double(); }

private:
	uint64_t s_[4];
};

// Hash-combines a base seed with stream identifiers so that workers, runs and
// rollouts get decorrelated reproducible streams.
uint64_t derive_seed(uint64_t seed, uint64_t id);
uint64_t derive_seed(uint64_t seed, uint64_t id1, uint64_t id2);
uint64_t derive_seed(uint64_t seed, uint64_t id1, uint64_t id2, uint64_t id3);

}  // namespace ted
