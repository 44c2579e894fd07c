#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace platoon {

using Tick = std::int64_t;
using AgentId = std::string;
using TrackId = std::int64_t;
using Embedding = std::vector<double>;

inline constexpr std::string_view kOperatorId = "operator";

// Thrown for inputs outside an operation's precondition.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// splitmix64 finaliser; used to derive independent, reproducible RNG seeds.
constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept
{
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2);
    z ^= b * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// FNV-1a; stable across platforms unlike std::hash.
constexpr std::uint64_t stable_hash(std::string_view s) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace platoon
