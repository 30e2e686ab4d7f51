#ifndef JGCF_RNG_HPP
#define JGCF_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace jgcf {

// All randomness in a run flows from one master seed fanned out to named
// sub-streams (split/init/batch/bfs/...), so components draw independently.
inline std::mt19937_64 make_stream(std::uint64_t master_seed, std::string_view name) {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (char c : name) {
        h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
        h *= 1099511628211ull;
    }
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                      static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(h),
                      static_cast<std::uint32_t>(h >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace jgcf

#endif
