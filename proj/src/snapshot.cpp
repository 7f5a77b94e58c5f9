#include "betaplane/snapshot.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace betaplane {
namespace {

constexpr std::array<char, 4> kMagic{'Z', 'N', 'S', '1'};

void put_u32(std::ostream& os, std::uint32_t v) {
    std::array<unsigned char, 4> b{};
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xffu);
    os.write(reinterpret_cast<const char*>(b.data()), 4);
}

void put_f64(std::ostream& os, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    std::array<unsigned char, 8> b{};
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xffu);
    os.write(reinterpret_cast<const char*>(b.data()), 8);
}

void read_exact(std::istream& is, unsigned char* dst, std::size_t n) {
    is.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is.gcount()) != n) {
        throw std::runtime_error("snapshot: truncated file");
    }
}

std::uint32_t get_u32(std::istream& is) {
    std::array<unsigned char, 4> b{};
    read_exact(is, b.data(), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& is) {
    std::array<unsigned char, 8> b{};
    read_exact(is, b.data(), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(v);
}

}  // namespace

void write_snapshot(std::ostream& os, const Snapshot& s) {
    const Domain& d = s.omega.domain();
    os.write(kMagic.data(), 4);
    put_u32(os, Snapshot::kVersion);
    put_u32(os, static_cast<std::uint32_t>(d.N1));
    put_u32(os, static_cast<std::uint32_t>(d.N2));
    put_f64(os, d.L1);
    put_f64(os, d.L2);
    put_f64(os, s.epsilon);
    put_f64(os, s.mu);
    put_f64(os, s.t);
    for (const auto& c : s.omega.coeffs()) {
        put_f64(os, c.real());
        put_f64(os, c.imag());
    }
    if (!os) throw std::runtime_error("snapshot: write failed");
}

void write_snapshot(const std::string& path, const Snapshot& s) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("snapshot: cannot open " + path + " for writing");
    write_snapshot(os, s);
}

Snapshot read_snapshot(std::istream& is) {
    std::array<char, 4> magic{};
    read_exact(is, reinterpret_cast<unsigned char*>(magic.data()), 4);
    if (magic != kMagic) throw std::runtime_error("snapshot: bad magic");
    const auto version = get_u32(is);
    if (version != Snapshot::kVersion) {
        throw std::runtime_error("snapshot: unsupported version " + std::to_string(version));
    }
    const auto n1 = static_cast<int>(get_u32(is));
    const auto n2 = static_cast<int>(get_u32(is));
    const double l1 = get_f64(is);
    const double l2 = get_f64(is);
    Snapshot s;
    s.epsilon = get_f64(is);
    s.mu = get_f64(is);
    s.t = get_f64(is);
    const Domain d(l1, l2, n1, n2);
    std::vector<Complex> coeffs(d.size());
    for (auto& c : coeffs) {
        const double re = get_f64(is);
        const double im = get_f64(is);
        c = Complex(re, im);
    }
    s.omega = SpectralField(d, std::move(coeffs));
    return s;
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("snapshot: cannot open " + path);
    return read_snapshot(is);
}

}  // namespace betaplane
