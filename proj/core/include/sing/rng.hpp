#pragma once

#include <cstdint>
#include <random>

namespace sing {

// Identifies one reproducible random stream. Identical (seed, stream) pairs
// replay identical draws; distinct stream ids give statistically independent
// sequences (seeding goes through splitmix64).
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    RngStream substream(std::uint64_t offset) const { return {seed, stream + offset}; }
};

// Engine state for one stream. Normal draws use Box-Muller on top of the
// mt19937_64 output so the sequence does not depend on the standard library's
// unspecified distribution implementations.
class RandomEngine {
  public:
    explicit RandomEngine(const RngStream& s);

    double uniform();  // [0, 1)
    double normal();   // standard normal

  private:
    std::mt19937_64 gen_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace sing
