#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace calibra {

using cplx = std::complex<double>;

struct Vec2 {
    double x = 0.0, y = 0.0;
    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm2() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm2()); }
};
inline Vec2 operator*(double s, Vec2 v) { return v * s; }

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
    Vec3 operator+(Vec3 o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(Vec3 o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(Vec3 o) const { return x * o.x + y * o.y + z * o.z; }
};

// Base error for everything this library rejects on purpose.  The message
// carries the offending location/value so callers can report it verbatim.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a construction cannot proceed on the requested strip but a
// smaller strip (or smaller band parameter) may still work.  The assembly
// loop catches these and retries.
struct DomainShrink : Error {
    explicit DomainShrink(const std::string& what) : Error(what) {}
};

inline constexpr double kPi = 3.14159265358979323846;

inline std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(static_cast<size_t>(n));
    if (n == 1) { out[0] = a; return out; }
    for (int i = 0; i < n; ++i)
        out[static_cast<size_t>(i)] = a + (b - a) * double(i) / double(n - 1);
    return out;
}

}  // namespace calibra
