#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace starscat {

using Complex = std::complex<double>;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double c, Vec2 v) { return {c * v.x, c * v.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

// Error taxonomy shared by all modules.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DomainError : Error {
    using Error::Error;
};
struct ParameterError : Error {
    using Error::Error;
};
struct SingularityError : Error {
    using Error::Error;
};
struct OverflowError : Error {
    using Error::Error;
};
struct ToleranceError : Error {
    using Error::Error;
};
struct PlacementError : Error {
    using Error::Error;
};
struct DimensionError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};
struct NumericalFailure : Error {
    using Error::Error;
};

constexpr double kPi = 3.14159265358979323846;

}  // namespace starscat
