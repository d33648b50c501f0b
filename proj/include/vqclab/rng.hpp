#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace vqc {

// Stateless key derivation: a stream is named by a root seed and a path of
// counters (iteration, component, shift sign, ...). The same path always
// yields the same generator, independent of evaluation order.
std::uint64_t splitmix64(std::uint64_t x);

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

inline std::mt19937_64 make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    return std::mt19937_64(derive_seed(seed, path));
}

// Stream tags keep unrelated uses of one seed apart.
enum class StreamTag : std::uint64_t {
    cost_sample = 1,
    gradient = 2,
    monitor = 3,
    init = 4,
    verifier = 5,
    haar = 6,
};

inline std::uint64_t tag(StreamTag t) { return static_cast<std::uint64_t>(t); }

}  // namespace vqc
