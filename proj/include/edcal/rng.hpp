// Copyright (c) 2026 edcal contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace edcal {

// Counter-based pseudo-random stream. A stream is fully identified by a
// (seed, stream id) pair: the n-th output is a pure function of
// (seed, stream, n), so streams can be created in any order, consumed in
// parallel and reproduced exactly. Child streams are derived by hashing a
// key into the stream id, which lets the simulation give every
// (replication, patient) its own stream without coordination; with values
// drawn via inverse transform, one variate always costs exactly one
// counter increment, which keeps common-random-number alignment intact
// when parameters change.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream), key_(derive_key(seed, stream)) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    // New independent stream; the child is unaffected by this stream's
    // position and vice versa.
    RngStream substream(std::uint64_t key) const {
        return RngStream(seed_, mix64(stream_ ^ mix64(key + 0x632be59bd9b4e019ULL)));
    }

    std::uint64_t next_u64() { return mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

    // Uniform on the open interval (0,1); never returns 0 or 1, so
    // log/ pow transforms are always finite.
    double next_open01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    bool bernoulli(double p) { return next_open01() < p; }

    static constexpr std::uint64_t mix64(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

  private:
    static constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) {
        return mix64(mix64(seed + 0x9e3779b97f4a7c15ULL) ^ mix64(stream + 0xd1b54a32d192ed03ULL));
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace edcal
