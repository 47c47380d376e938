#ifndef RPDE_RNG_HPP
#define RPDE_RNG_HPP

#include <array>
#include <cstdint>

namespace rpde {

// Counter-based generator (Philox-4x32, 10 rounds).  Every random stream in a
// run is addressed by (seed, stream_id, position), so sample c of worker t is
// the same number no matter how copies are scheduled across threads.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Double-precision inverse of the standard normal CDF (Wichura's PPND16).
// Accurate to ~1e-15 for p in (0,1).
double inverse_normal_cdf(double p);

// One independent substream of the counter-based generator.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_id_(stream_id) {}

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    // uniform on the open interval (0,1); never returns 0 or 1
    double uniform01();

    // standard normal via inverse-CDF (one uniform per variate)
    double normal() { return inverse_normal_cdf(uniform01()); }

    std::uint64_t seed() const {
        return static_cast<std::uint64_t>(key_[0]) | (static_cast<std::uint64_t>(key_[1]) << 32);
    }
    std::uint64_t stream_id() const { return stream_id_; }

  private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_id_;
    std::uint64_t pos_ = 0;        // block counter within the stream
    std::array<std::uint32_t, 4> buf_{};
    int buf_left_ = 0;
};

// Substream ids for one estimator copy.  Layout of the 64-bit stream id:
// high 32 bits = copy index, low 32 bits = role within the copy.
//   0             field coefficients
//   1             outer geometric level
//   2 + j*k + i   inner estimator (point i, replicate j) of a k-point problem
struct CopyStreams {
    std::uint64_t seed;
    std::uint32_t copy;

    RngStream field_stream() const { return RngStream(seed, role_id(0)); }
    RngStream outer_stream() const { return RngStream(seed, role_id(1)); }
    RngStream z_stream(std::uint64_t point, std::uint64_t replicate, std::uint64_t k_points) const;

  private:
    std::uint64_t role_id(std::uint32_t role) const {
        return (static_cast<std::uint64_t>(copy) << 32) | role;
    }
};

}  // namespace rpde

#endif
