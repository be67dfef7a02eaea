#include <doctest.h>

#include <cmath>
#include <vector>

#include "starscat/specfun.hpp"

using namespace starscat;

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i)
        out.push_back(lo * std::pow(hi / lo, i / static_cast<double>(n - 1)));
    return out;
}

}  // namespace

TEST_CASE("wronskian J_m Y_m' - J_m' Y_m = 2/(pi x)") {
    for (double x : log_grid(0.1, 100.0, 25))
        for (int m = -50; m <= 50; m += 5) {
            const double j = eval({m, CylinderKind::BesselJ}, x);
            const double jp = eval_derivative({m, CylinderKind::BesselJ}, x);
            const double y = eval({m, CylinderKind::BesselY}, x);
            const double yp = eval_derivative({m, CylinderKind::BesselY}, x);
            const double w = j * yp - jp * y;
            const double target = 2.0 / (kPi * x);
            CHECK(std::abs(w - target) / target <= 1e-12);
        }
}

TEST_CASE("three-term recurrence") {
    for (double x : log_grid(0.1, 100.0, 25))
        for (int m = -49; m <= 49; m += 7)
            for (CylinderKind kind : {CylinderKind::BesselJ, CylinderKind::BesselY}) {
                if (kind == CylinderKind::BesselY && x < 0.5 && std::abs(m) > 30)
                    continue;  // Y_m grows past double range sensitivity here
                const double lo = eval({m - 1, kind}, x);
                const double hi = eval({m + 1, kind}, x);
                const double mid = eval({m, kind}, x);
                const double scale =
                    std::max({std::abs(lo), std::abs(hi), std::abs(2.0 * m / x * mid), 1.0});
                CHECK(std::abs(lo + hi - 2.0 * m / x * mid) / scale <= 1e-10);
            }
}

TEST_CASE("derivative identity C' = (C_{m-1} - C_{m+1})/2") {
    for (double x : {0.3, 1.7, 12.0, 80.0})
        for (int m : {-7, 0, 1, 5, 20}) {
            const Complex h = eval_complex({m, CylinderKind::Hankel1}, x);
            const Complex hp = eval_derivative_complex({m, CylinderKind::Hankel1}, x);
            const double fd_h = 1e-6 * std::max(1.0, x);
            const Complex fd = (eval_complex({m, CylinderKind::Hankel1}, x + fd_h) -
                                eval_complex({m, CylinderKind::Hankel1}, x - fd_h)) /
                               (2.0 * fd_h);
            CHECK(std::abs(hp - fd) <= 1e-4 * std::abs(h) + 1e-6);
        }
}

TEST_CASE("array evaluators match scalar calls") {
    const double x = 7.3;
    const int mmax = 40;
    std::vector<double> j(mmax + 1), y(mmax + 1);
    std::vector<Complex> h(mmax + 1);
    bessel_j_array(mmax, x, j.data());
    bessel_y_array(mmax, x, y.data());
    hankel1_array(mmax, x, h.data());
    for (int m = 0; m <= mmax; ++m) {
        CHECK(j[m] == doctest::Approx(eval({m, CylinderKind::BesselJ}, x)).epsilon(1e-13));
        CHECK(y[m] == doctest::Approx(eval({m, CylinderKind::BesselY}, x)).epsilon(1e-13));
        CHECK(std::abs(h[m] - Complex(j[m], y[m])) <= 1e-13 * std::abs(h[m]));
    }
}

TEST_CASE("negative order reflection") {
    const double x = 3.1;
    for (int m : {1, 2, 5, 12}) {
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        CHECK(eval({-m, CylinderKind::BesselJ}, x) ==
              doctest::Approx(sign * eval({m, CylinderKind::BesselJ}, x)));
        CHECK(eval({-m, CylinderKind::BesselY}, x) ==
              doctest::Approx(sign * eval({m, CylinderKind::BesselY}, x)));
    }
}

TEST_CASE("field gradients match finite differences") {
    const double kappa = 1.3;
    const double h = 1e-6;
    auto check_grad = [&](auto field, Vec2 r) {
        const FieldSample s = field(r);
        const Complex dx = (field(Vec2{r.x + h, r.y}).value - field(Vec2{r.x - h, r.y}).value) /
                           (2.0 * h);
        const Complex dy = (field(Vec2{r.x, r.y + h}).value - field(Vec2{r.x, r.y - h}).value) /
                           (2.0 * h);
        const double scale = std::max(1.0, std::abs(s.value));
        CHECK(std::abs(s.gradient[0] - dx) <= 1e-8 * scale * 10);
        CHECK(std::abs(s.gradient[1] - dy) <= 1e-8 * scale * 10);
    };
    for (Vec2 r : {Vec2{2.0, 0.5}, Vec2{-1.0, 1.5}, Vec2{0.3, -2.2}}) {
        check_grad([&](Vec2 p) { return plane_wave(kappa, p); }, r);
        for (int m : {-3, 0, 2})
            check_grad([&](Vec2 p) { return outgoing_source(m, kappa, p, Vec2{0.1, -0.2}); }, r);
    }
}

TEST_CASE("plane wave equals its cylinder-harmonic partial sum") {
    const double kappa = 2.0;
    const Vec2 r{0.7, -0.4};
    const double rad = std::hypot(r.x, r.y), th = std::atan2(r.y, r.x);
    Complex sum = 0.0;
    for (int m = -25; m <= 25; ++m) {
        const Complex im = std::pow(Complex(0.0, 1.0), m);
        sum += im * eval({m, CylinderKind::BesselJ}, kappa * rad) *
               std::exp(Complex(0.0, m * th));
    }
    CHECK(std::abs(sum - plane_wave(kappa, r).value) <= 1e-12);
}

TEST_CASE("truncation order and domain errors") {
    CHECK(truncation_order(1.0, 3.0) == 9);
    CHECK(truncation_order(0.5, 3.1) == 5);
    CHECK_THROWS_AS(truncation_order(-1.0, 3.0), ParameterError);
    CHECK_THROWS_AS(eval({0, CylinderKind::BesselJ}, -1.0), DomainError);
    CHECK_THROWS_AS(eval({0, CylinderKind::BesselY}, 0.0), DomainError);
    CHECK_THROWS_AS(eval({0, CylinderKind::Hankel1}, 1.0), ParameterError);
}
