#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "betaplane/spectral_field.hpp"

namespace betaplane {

/// ZNS1 snapshot: little-endian "ZNS1", u32 version, u32 N1, u32 N2,
/// f64 L1, L2, epsilon, mu, t, then N1*N2 (re, im) f64 pairs in
/// enumerate_modes order.
struct Snapshot {
    static constexpr std::uint32_t kVersion = 1;

    SpectralField omega;
    double epsilon = 0.0;
    double mu = 0.0;
    double t = 0.0;
};

void write_snapshot(std::ostream& os, const Snapshot& s);
void write_snapshot(const std::string& path, const Snapshot& s);
/// Throws std::runtime_error on bad magic, unsupported version, or truncation.
Snapshot read_snapshot(std::istream& is);
Snapshot read_snapshot(const std::string& path);

}  // namespace betaplane
