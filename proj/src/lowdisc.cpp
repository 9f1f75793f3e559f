#include "asianqmc/lowdisc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "asianqmc/errors.hpp"

namespace asianqmc {

namespace {

struct EmbeddedPolynomial {
    int degree;
    std::uint32_t coefficients;
    std::vector<std::uint32_t> initial;
};

const std::vector<EmbeddedPolynomial>& embedded_table() {
    static const std::vector<EmbeddedPolynomial> table = {
#include "sobol_directions.inc"
    };
    return table;
}

std::array<std::uint32_t, kSobolBits> direction_column(const SobolPolynomial& poly) {
    std::array<std::uint32_t, kSobolBits> v{};
    if (poly.degree == 0) {
        for (int k = 0; k < kSobolBits; ++k) v[k] = 1u << (kSobolBits - 1 - k);
        return v;
    }
    const int s = poly.degree;
    for (int k = 0; k < s && k < kSobolBits; ++k) v[k] = poly.initial[k] << (kSobolBits - 1 - k);
    for (int k = s; k < kSobolBits; ++k) {
        v[k] = v[k - s] ^ (v[k - s] >> s);
        for (int i = 1; i < s; ++i) {
            if ((poly.coefficients >> (s - 1 - i)) & 1u) v[k] ^= v[k - i];
        }
    }
    return v;
}

}  // namespace

SobolDirections::SobolDirections(std::vector<SobolPolynomial> polynomials) {
    table_.reserve(polynomials.size());
    for (const auto& p : polynomials) {
        if (p.degree < 0 || p.initial.size() < static_cast<std::size_t>(std::max(p.degree, 1)))
            throw Error("malformed Sobol' polynomial entry");
        table_.push_back(direction_column(p));
    }
}

const SobolDirections& SobolDirections::joe_kuo() {
    static const SobolDirections directions = [] {
        SobolDirections d;
        const auto& table = embedded_table();
        d.table_.reserve(table.size());
        for (const auto& e : table) d.table_.push_back(direction_column({e.degree, e.coefficients, e.initial}));
        return d;
    }();
    return directions;
}

SobolDirections SobolDirections::corrupted(std::size_t dim, int bit) const {
    SobolDirections copy = *this;
    // Zeroing the leading digit of v_bit makes two consecutive generator
    // columns collinear in the top digits, breaking one-point-per-bin.
    copy.table_.at(dim)[bit] = copy.table_.at(dim)[bit == 0 ? 1 : bit - 1];
    return copy;
}

SobolDigits generate_sobol_digits(std::size_t dim, std::size_t n, const SobolDirections& directions) {
    if (dim == 0 || n == 0) throw Error("generate_sobol: dim and n must be positive");
    if (dim > directions.max_dim())
        throw UnsupportedDimension("Sobol' dimension " + std::to_string(dim) + " exceeds the " +
                                   std::to_string(directions.max_dim()) + " available");
    if (n > (std::size_t{1} << kSobolBits)) throw Error("generate_sobol: n exceeds 2^32");

    SobolDigits out{dim, n, std::vector<std::uint32_t>(dim * n, 0u)};
    std::vector<std::uint32_t> state(dim, 0u);
    for (std::size_t i = 1; i < n; ++i) {
        // Gray-code update: flip the direction number at the lowest zero bit of i-1.
        const int c = std::countr_one(static_cast<std::uint64_t>(i - 1));
        for (std::size_t j = 0; j < dim; ++j) {
            state[j] ^= directions.column(j)[c];
            out.bits[i * dim + j] = state[j];
        }
    }
    return out;
}

PointSet generate_sobol(std::size_t dim, std::size_t n, const SobolDirections& directions) {
    const SobolDigits digits = generate_sobol_digits(dim, n, directions);
    PointSet out{dim, n, std::vector<double>(dim * n)};
    for (std::size_t k = 0; k < digits.bits.size(); ++k) out.values[k] = static_cast<double>(digits.bits[k]) * 0x1p-32;
    return out;
}

DigitalScramble::DigitalScramble(std::size_t dim, RandomizationSeed seed) : tables_(dim), shift_(dim) {
    for (std::size_t j = 0; j < dim; ++j) {
        CounterRng rng(derive_key(seed.seed, seed.batch_index, j));
        // rows[k]: mask of input digits feeding output digit k (digit 0 is the
        // most significant bit).
        std::array<std::uint32_t, kSobolBits> rows{};
        for (int k = 0; k < kSobolBits; ++k) {
            const std::uint32_t own = 1u << (kSobolBits - 1 - k);
            const std::uint32_t above = k == 0 ? 0u : ~((own << 1) - 1u);
            rows[k] = own | (static_cast<std::uint32_t>(rng.next() >> 32) & above);
        }
        std::array<std::uint32_t, kSobolBits> images{};  // image of input bit p
        for (int p = 0; p < kSobolBits; ++p) {
            std::uint32_t img = 0;
            for (int k = 0; k < kSobolBits; ++k) {
                if ((rows[k] >> p) & 1u) img |= 1u << (kSobolBits - 1 - k);
            }
            images[p] = img;
        }
        auto& t = tables_[j];
        for (int b = 0; b < 4; ++b) {
            for (std::uint32_t v = 0; v < 256; ++v) {
                std::uint32_t img = 0;
                for (int i = 0; i < 8; ++i) {
                    if ((v >> i) & 1u) img ^= images[8 * b + i];
                }
                t[256 * b + v] = img;
            }
        }
        shift_[j] = static_cast<std::uint32_t>(rng.next() >> 32);
    }
}

PointSet randomize(const PointSet& points, RandomizationSeed seed) {
    const DigitalScramble scramble(points.dim, seed);
    PointSet out{points.dim, points.n, std::vector<double>(points.values.size())};
    for (std::size_t i = 0; i < points.n; ++i) {
        for (std::size_t j = 0; j < points.dim; ++j) {
            const auto digits = static_cast<std::uint32_t>(std::floor(points(i, j) * 0x1p32));
            out.values[i * points.dim + j] = digits_to_unit(scramble.apply(digits, j));
        }
    }
    return out;
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x * (0.5 * std::numbers::sqrt2)); }

// Wichura's AS 241 (PPND16), relative accuracy about 1e-16.
double inv_normal_cdf(double u) {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("inv_normal_cdf: argument must lie in (0, 1)");
    const double q = u - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((r * 2509.0809287301226727 + 33430.575583588128105) * r + 67265.770927008700853) * r +
                    45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
                 133.14166789178437745) * r + 3.387132872796366608) /
               (((((((r * 5226.495278852545925 + 28729.085735721942674) * r + 39307.89580009271061) * r +
                    21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
                 42.313330701600911252) * r + 1.0);
    }
    double r = std::sqrt(-std::log(q < 0.0 ? u : 1.0 - u));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((r * 7.7454501427834140764e-4 + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
                   1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
                4.6303378461565452959) * r + 1.42343711074968357734) /
              (((((((r * 1.05075007164441684324e-9 + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
                   0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
                2.05319162663775882187) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((r * 2.01033439929228813265e-7 + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
                   0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
                5.4637849111641143699) * r + 6.6579046435011037772) /
              (((((((r * 2.04426310338993978564e-15 + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
                   7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
                0.59983220655588793769) * r + 1.0);
    }
    return q < 0.0 ? -val : val;
}

std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

std::uint64_t derive_key(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    std::uint64_t h = mix64(a + 0x9e3779b97f4a7c15ULL);
    h = mix64(h ^ (b + 0x632be59bd9b4e019ULL));
    return mix64(h ^ (c + 0x85157af5b5e3c1e1ULL));
}

}  // namespace asianqmc
