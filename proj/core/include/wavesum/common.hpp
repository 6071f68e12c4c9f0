#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace wavesum {

// Points in R^d are stored zero-padded to four coordinates so distances do
// not need to know d. Lifted points (y, r) live in R^{d+1} and keep r last.
using Vec4 = std::array<double, 4>;
using Vec5 = std::array<double, 5>;
using cplx = std::complex<double>;

struct Space {
    int d = 3;
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class InvalidArgument : public Error {
public:
    using Error::Error;
};
class UnsupportedDimension : public Error {
public:
    using Error::Error;
};
class SeparationError : public Error {
public:
    SeparationError(const std::string& what, std::size_t a, std::size_t b)
        : Error(what), first(a), second(b) {}
    std::size_t first, second;
};
class QuadratureError : public Error {
public:
    using Error::Error;
};
class FeasibilityError : public Error {
public:
    using Error::Error;
};

void check_space(const Space& s, int lo = 2, int hi = 4);

inline double dist(const Vec4& a, const Vec4& b) {
    double s = 0;
    for (int i = 0; i < 4; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}
inline double dist(const Vec5& a, const Vec5& b) {
    double s = 0;
    for (int i = 0; i < 5; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}
inline double norm(const Vec4& a) { return dist(a, Vec4{}); }
inline double dot(const Vec4& a, const Vec4& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}
inline Vec4 sub(const Vec4& a, const Vec4& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]};
}
inline Vec4 add(const Vec4& a, const Vec4& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}
inline Vec4 scale(const Vec4& a, double s) { return {a[0] * s, a[1] * s, a[2] * s, a[3] * s}; }

// Counter-based random stream: the value drawn for (seed, index, draw) does not
// depend on the order in which indices are visited.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t index)
        : key_(mix64(seed ^ mix64(index * 0xD1B54A32D192ED03ull + 0x632BE59BD9B4E019ull))) {}
    std::uint64_t next() { return mix64(key_ + 0x9E3779B97F4A7C15ull * (++ctr_)); }
    // uniform on [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    double normal() {
        double u1 = uniform(), u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
};

// Surface area of the unit sphere S^{d-1} in R^d.
inline double sphere_area(int d) {
    switch (d) {
    case 2: return 2.0 * M_PI;
    case 3: return 4.0 * M_PI;
    case 4: return 2.0 * M_PI * M_PI;
    default: throw UnsupportedDimension("sphere_area: d must be 2, 3 or 4");
    }
}
// Volume of the unit ball in R^d.
inline double ball_volume(int d) {
    switch (d) {
    case 2: return M_PI;
    case 3: return 4.0 * M_PI / 3.0;
    case 4: return 0.5 * M_PI * M_PI;
    default: throw UnsupportedDimension("ball_volume: d must be 2, 3 or 4");
    }
}

inline bool is_dyadic_power(long long u) { return u >= 1 && (u & (u - 1)) == 0; }

}  // namespace wavesum
