#pragma once

// Low-discrepancy point generation: Sobol' points with Joe-Kuo direction
// numbers, Matousek linear scrambling plus digital shift, and the uniform to
// normal transform.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace asianqmc {

inline constexpr int kSobolBits = 32;

// Primitive polynomial and initial direction numbers for one coordinate.
struct SobolPolynomial {
    int degree = 0;
    std::uint32_t coefficients = 0;  // interior bits a_1..a_{degree-1}
    std::vector<std::uint32_t> initial;  // m_1..m_degree (m_1 for degree 0)
};

// Direction numbers v_{k} (k = 0..31), stored left-aligned in 32-bit words.
class SobolDirections {
public:
    static const SobolDirections& joe_kuo();

    explicit SobolDirections(std::vector<SobolPolynomial> polynomials);

    std::size_t max_dim() const { return table_.size(); }
    const std::array<std::uint32_t, kSobolBits>& column(std::size_t dim) const { return table_[dim]; }

    // Test fixture support: returns a copy with one direction number flipped so
    // the affected coordinate loses its stratification.
    SobolDirections corrupted(std::size_t dim, int bit) const;

private:
    SobolDirections() = default;
    std::vector<std::array<std::uint32_t, kSobolBits>> table_;
};

// n points in dim coordinates, row-major (point i occupies values[i*dim, (i+1)*dim)).
struct PointSet {
    std::size_t dim = 0;
    std::size_t n = 0;
    std::vector<double> values;

    double operator()(std::size_t i, std::size_t j) const { return values[i * dim + j]; }
    std::span<const double> point(std::size_t i) const { return {values.data() + i * dim, dim}; }
};

struct RandomizationSeed {
    std::uint64_t seed = 0;
    std::uint64_t batch_index = 0;
};

// Raw 32-bit digits of the first n Gray-code-ordered Sobol' points.
struct SobolDigits {
    std::size_t dim = 0;
    std::size_t n = 0;
    std::vector<std::uint32_t> bits;  // row-major like PointSet

    std::span<const std::uint32_t> point(std::size_t i) const { return {bits.data() + i * dim, dim}; }
};

SobolDigits generate_sobol_digits(std::size_t dim, std::size_t n,
                                  const SobolDirections& directions = SobolDirections::joe_kuo());

// Base (unrandomized) point set; index 0 is the origin.
PointSet generate_sobol(std::size_t dim, std::size_t n,
                        const SobolDirections& directions = SobolDirections::joe_kuo());

// Random linear digit scramble followed by a digital shift, one independent
// pair per coordinate. The lower-triangular scramble matrix has a unit
// diagonal, so the leading k digits of the output depend only on the leading
// k digits of the input and dyadic stratification is preserved.
class DigitalScramble {
public:
    DigitalScramble(std::size_t dim, RandomizationSeed seed);

    std::size_t dim() const { return shift_.size(); }
    std::uint32_t apply(std::uint32_t digits, std::size_t coordinate) const {
        const auto& t = tables_[coordinate];
        return t[digits & 0xffu] ^ t[256 + ((digits >> 8) & 0xffu)] ^ t[512 + ((digits >> 16) & 0xffu)] ^
               t[768 + (digits >> 24)] ^ shift_[coordinate];
    }

private:
    // Scramble matrix applied byte by byte: entry 256*b + v is the image of
    // byte value v placed at byte b.
    std::vector<std::array<std::uint32_t, 1024>> tables_;
    std::vector<std::uint32_t> shift_;
};

// Maps 32-bit digits to the midpoint of their 2^-32 cell, so the result lies
// strictly inside (0, 1).
inline double digits_to_unit(std::uint32_t digits) {
    return (static_cast<double>(digits) + 0.5) * 0x1p-32;
}

PointSet randomize(const PointSet& points, RandomizationSeed seed);

// Standard normal helpers.
double normal_pdf(double x);
double normal_cdf(double x);

// Inverse of the standard normal distribution function. Throws DomainError
// outside (0, 1).
double inv_normal_cdf(double u);

// Counter-based 64-bit generator (splitmix64). A (key, counter) pair always
// yields the same value, which is what makes batches reproducible regardless
// of how they are scheduled.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t derive_key(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0);

class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}
    std::uint64_t next() { return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }
    std::uint64_t at(std::uint64_t counter) const { return mix64(key_ + 0x9e3779b97f4a7c15ULL * (counter + 1)); }
    // Uniform on (0, 1) with 52-bit resolution; cell midpoints, so never 0 or 1.
    static double to_unit(std::uint64_t bits) { return (static_cast<double>(bits >> 12) + 0.5) * 0x1p-52; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace asianqmc
