#include "devskit/rng.hpp"

#include <cmath>

namespace devskit {
namespace {

// FNV-1a over the path bytes, folded with the run seed and finished with the
// SplitMix64 mixer. Cheap, stable, and spreads nearby seeds well apart.
std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

std::uint64_t Substream::derive_seed(std::uint64_t seed, std::string_view path) {
    return splitmix64(splitmix64(seed) ^ fnv1a(path));
}

Substream::Substream(std::uint64_t seed, std::string_view path)
    : derived_seed_(derive_seed(seed, path)), engine_(derived_seed_) {}

std::uint64_t Substream::next_u64() {
    return engine_();
}

double Substream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Substream::exponential(double mean) {
    // uniform() < 1, so the argument of log stays strictly positive.
    return -mean * std::log(1.0 - uniform());
}

bool Substream::bernoulli(double p) {
    if (p <= 0.0) {
        next_u64(); // keep stream consumption independent of p
        return false;
    }
    if (p >= 1.0) {
        next_u64();
        return true;
    }
    return uniform() < p;
}

std::int64_t Substream::uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    // 128-bit multiply-shift keeps the map unbiased enough for simulation use
    // and, more importantly, fully deterministic.
    const unsigned __int128 wide =
        static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(span);
    return lo + static_cast<std::int64_t>(static_cast<std::uint64_t>(wide >> 64));
}

} // namespace devskit
