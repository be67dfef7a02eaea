#include <doctest.h>

#include <cmath>

#include "starscat/gpc.hpp"

using namespace starscat;

namespace {

// <P_i, P_j> under the parameter density, dense trapezoid / Gauss-like grid.
double inner(const GpcBasis& basis, int i, int j, bool periodic) {
    const int n = 4096;
    double sum = 0.0;
    if (periodic) {
        for (int k = 0; k < n; ++k) {
            const double z = 2 * kPi * k / n;
            sum += basis.eval(i, z) * basis.eval(j, z) / (2 * kPi) * (2 * kPi / n);
        }
    } else {
        for (int k = 0; k < n; ++k) {
            const double z = -1.0 + 2.0 * (k + 0.5) / n;
            sum += basis.eval(i, z) * basis.eval(j, z) * 0.5 * (2.0 / n);
        }
    }
    return sum;
}

}  // namespace

TEST_CASE("fourier basis orthogonality and normalization") {
    const GpcBasis b = fourier_basis();
    CHECK(b.id() == "fourier");
    for (int i = 0; i <= 8; ++i)
        for (int j = 0; j <= 8; ++j) {
            const double v = inner(b, i, j, true);
            if (i == j)
                CHECK(v == doctest::Approx(b.gamma(i)).epsilon(1e-10));
            else
                CHECK(std::abs(v) <= 1e-10);
        }
    CHECK(b.eval(0, 1.3) == 1.0);
    CHECK(b.eval(1, 1.3) == doctest::Approx(std::sin(1.3)));
    CHECK(b.eval(2, 1.3) == doctest::Approx(std::cos(1.3)));
    CHECK(b.eval(3, 1.3) == doctest::Approx(std::sin(2 * 1.3)));
    CHECK(b.eval(4, 1.3) == doctest::Approx(std::cos(2 * 1.3)));
}

TEST_CASE("legendre basis orthogonality and normalization") {
    const GpcBasis b = legendre_basis();
    CHECK(b.id() == "legendre");
    for (int i = 0; i <= 8; ++i) {
        CHECK(b.gamma(i) == doctest::Approx(1.0 / (2 * i + 1)));
        for (int j = 0; j <= 8; ++j) {
            const double v = inner(b, i, j, false);
            if (i == j)
                CHECK(v == doctest::Approx(b.gamma(i)).epsilon(1e-5));
            else
                CHECK(std::abs(v) <= 1e-6);
        }
    }
    CHECK(b.eval(2, 0.5) == doctest::Approx(0.5 * (3 * 0.25 - 1)));
    CHECK_THROWS_AS(b.eval(-1, 0.0), ParameterError);
}

TEST_CASE("basis matches the shape parameter distribution") {
    CHECK(basis_for(*ellipse_shape(5.0, 1.0)).kind == GpcBasis::Kind::Fourier);
    CHECK(basis_for(*random_octagon(5.0, 4.0)).kind == GpcBasis::Kind::Legendre);
}

TEST_CASE("target labels are m-major, n-minor") {
    const auto labels = target_labels(2, 1);
    REQUIRE(labels.size() == 10);
    CHECK(labels[0] == std::pair{-2, 0});
    CHECK(labels[1] == std::pair{-2, 1});
    CHECK(labels[4] == std::pair{0, 0});
    CHECK(labels[9] == std::pair{2, 1});
}

TEST_CASE("build_targets matches target_functional discretization") {
    const ShapePtr shape = random_octagon(5.0, 4.0);
    const RulePtr rule = make_rule(polygon_grid(shape, 5, 4));
    const GpcBasis basis = legendre_basis();
    const double kappa = 0.7;
    const int mu = 3, N = 2;
    const auto targets = build_targets(rule, basis, kappa, mu, N);
    const auto labels = target_labels(mu, N);
    REQUIRE(targets.size() == labels.size());
    for (size_t t = 0; t < labels.size(); t += 5) {
        const auto [m, n] = labels[t];
        const Functional f = target_functional(
            m, n, kappa, [&, n = n](double z) { return basis.eval(n, z) / basis.gamma(n); });
        const WeightedGridfunction direct = discretize(rule, f);
        CHECK((targets[t].entries - direct.entries).norm() <= 1e-12 * direct.entries.norm());
    }
}

TEST_CASE("estimate shapes the table and flags unsatisfied targets") {
    ReconstructionKernel k;
    const int mu = 1, N = 1, S = 2;
    k.coefficients = Eigen::MatrixXcd::Zero((2 * mu + 1) * (N + 1), S);
    k.coefficients(0, 0) = 1.0;
    k.coefficients(3, 1) = Complex(0, 2);  // (m, n) = (0, 1)
    k.satisfied.assign(6, true);
    k.satisfied[5] = false;  // (m, n) = (1, 1)
    k.eps_ev = 1e-4;
    k.eps_ed = 1e-8;
    Eigen::VectorXcd a(S);
    a << Complex(2, 0), Complex(1, 1);
    const GpcTable t = estimate(k, a, mu, N);
    CHECK(t.at(-1, 0) == Complex(2, 0));
    CHECK(t.at(0, 1) == Complex(0, 2) * Complex(1, 1));
    CHECK(t.at(1, 1) == Complex(0, 0));
    REQUIRE(t.meta.unsatisfied.size() == 1);
    CHECK(t.meta.unsatisfied[0] == std::pair{1, 1});
    CHECK(t.meta.eps_ev == 1e-4);

    Eigen::VectorXcd bad(3);
    CHECK_THROWS_AS(estimate(k, bad, mu, N), DimensionError);
    CHECK_THROWS_AS(estimate(k, a, mu + 1, N), DimensionError);
}

TEST_CASE("evaluate_expansion sums coefficients against the basis") {
    GpcTable t;
    t.mu = 1;
    t.order = 2;
    t.coefficients.resize(3, 3);
    t.coefficients.setZero();
    t.coefficients(2, 0) = 1.0;           // m = 1, n = 0
    t.coefficients(2, 2) = Complex(0, 1); // m = 1, n = 2
    const GpcBasis b = legendre_basis();
    const double z = 0.4;
    const Eigen::VectorXcd v = evaluate_expansion(t, b, z);
    CHECK(v(2) == Complex(1.0, 0.0) + Complex(0, 1) * b.eval(2, z));
    CHECK(v(0) == Complex(0, 0));
}
