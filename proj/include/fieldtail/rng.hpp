#pragma once

#include <array>
#include <cstdint>

namespace fieldtail {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// A stream is fully determined by (key, counter); there is no hidden state.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(const Counter& ctr, const Key& key);
};

/// Sequential view of one Philox stream keyed by a 64-bit seed, with the
/// counter's upper words fixed to a 64-bit stream id.
class PhiloxStream {
public:
    PhiloxStream(std::uint64_t seed, std::uint64_t stream);

    std::uint32_t next_u32();
    /// Uniform on (0, 1) with 53 random bits; never returns 0 or 1.
    double next_uniform();
    double next_normal();

private:
    Philox4x32::Key key_;
    Philox4x32::Counter ctr_;
    Philox4x32::Counter buf_{};
    int used_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace fieldtail
