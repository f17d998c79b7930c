#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace devskit {

// A deterministic random stream tied to (run seed, component path).
//
// Two design constraints drive this class. First, distinct components of one
// model must draw from independent streams so that adding a draw in one
// component never shifts another's sequence. Second, results must be
// reproducible bit-for-bit across platforms and standard libraries: the
// mt19937_64 engine is exactly specified by the standard, but the standard
// *distributions* are not, so the uniform/exponential/bernoulli transforms
// are implemented here by hand.
class Substream {
public:
    Substream(std::uint64_t seed, std::string_view path);

    // Raw engine output.
    std::uint64_t next_u64();

    // Uniform on [0, 1) with 53 bits of resolution.
    double uniform();

    // Exponential with the given mean (inverse-CDF transform).
    double exponential(double mean);

    // True with probability p (p <= 0 never, p >= 1 always).
    bool bernoulli(double p);

    // Uniform integer on [lo, hi] via rejection-free Lemire-style scaling.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    // The derived engine seed, exposed so an external oracle can reproduce
    // this stream exactly.
    [[nodiscard]] std::uint64_t derived_seed() const { return derived_seed_; }

    static std::uint64_t derive_seed(std::uint64_t seed, std::string_view path);

private:
    std::uint64_t derived_seed_;
    std::mt19937_64 engine_;
};

} // namespace devskit
