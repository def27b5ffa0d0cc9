#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace uclab {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// log2(e) and friends; the whole artifact works in bits.
inline constexpr double kLog2E = 1.4426950408889634073599246810018921;
inline constexpr double kPiSqOver6 = 1.6449340668482264364724151666460252;

inline double log2_safe(double x) { return x > 0.0 ? std::log2(x) : kNegInf; }

// Binary entropy in bits; h(0) = h(1) = 0.
inline double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

// log2(2^a + 2^b) without leaving the log domain.
inline double log2_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    if (a < b) std::swap(a, b);
    return a + std::log2(1.0 + std::exp2(b - a));
}

// Compensated accumulator for long series sums.
class KahanSum {
public:
    void add(double x) {
        double y = x - c_;
        double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

// Number of bits needed to write x in binary (0 -> 0).
inline unsigned bit_width_u64(std::uint64_t x) {
    unsigned n = 0;
    while (x) { ++n; x >>= 1; }
    return n;
}

}  // namespace uclab
