#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace capm {

/// Seedable generator with a bit-exact stream on every conforming platform.
///
/// The engine is std::mt19937_64, whose output sequence the standard fixes.
/// Uniforms take the top 53 bits of one draw; normals use the Marsaglia polar
/// method. std::normal_distribution is avoided because its algorithm is
/// implementation-defined. Changing any of this changes every fixture.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Standard normal.
    double normal();

    double normal(double mean, double sd) { return mean + sd * normal(); }

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

}  // namespace capm
