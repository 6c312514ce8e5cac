#pragma once

#include <cmath>

#include "ewgeom/common.hpp"

namespace ewgeom {

// Counter-based stream: the state is derived from (seed, stream, sample), so
// any sample of any named stream can be generated independently of all
// others. Parallel and serial runs therefore agree bit-for-bit.
class RngStream {
  public:
    static RngStream keyed(std::uint64_t seed, std::uint64_t stream, std::uint64_t sample) {
        std::uint64_t s = mix(seed + 0x9E3779B97F4A7C15ull);
        s = mix(s ^ (0xBF58476D1CE4E5B9ull * (stream + 1)));
        s = mix(s ^ (0x94D049BB133111EBull * (sample + 1)));
        return RngStream(s);
    }

    static RngStream keyed(std::uint64_t seed, std::string_view stream_name,
                           std::uint64_t sample) {
        return keyed(seed, fnv1a64(stream_name), sample);
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix(state_);
    }

    // Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double next_gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = 0.0;
        do {
            u1 = next_double();
        } while (u1 <= 0.0);
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        cached_ = r * std::sin(2.0 * kPi * u2);
        have_cached_ = true;
        return r * std::cos(2.0 * kPi * u2);
    }

    // CN(0,1): unit-variance circular complex Gaussian.
    cplx next_complex_gaussian() {
        const double inv_sqrt2 = 1.0 / kSqrt2;
        double re = next_gaussian();
        double im = next_gaussian();
        return cplx{re * inv_sqrt2, im * inv_sqrt2};
    }

  private:
    explicit RngStream(std::uint64_t s) : state_(s) {}

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace ewgeom
