#include <doctest.h>

#include <gsl/gsl_integration.h>

#include <cmath>
#include <functional>

#include "starscat/coarea.hpp"

using namespace starscat;

namespace {

using Integrand = std::function<Complex(double r, double theta, double z)>;

// Dense tensor oracle for E[contour integral of f dS], smooth periodic shapes:
// trapezoid in theta and z (both directions periodic and smooth).
Complex dense_periodic(const StarShape& s, const Integrand& f, int n_theta, int n_z) {
    Complex sum = 0.0;
    const double span = s.z_hi() - s.z_lo();
    for (int k = 0; k < n_z; ++k) {
        const double z = s.z_lo() + span * k / n_z;
        for (int j = 0; j < n_theta; ++j) {
            const double th = 2 * kPi * j / n_theta;
            const double r = s.rho(th, z), rt = s.drho_dtheta(th, z);
            sum += f(r, th, z) * std::sqrt(r * r + rt * rt) * s.density(z) *
                   (2 * kPi / n_theta) * (span / n_z);
        }
    }
    return sum;
}

// Dense tensor oracle for polygonal shapes: per-segment Gauss-Legendre in
// theta (smooth inside each segment) tensor Gauss-Legendre in z.
Complex dense_polygon(const StarShape& s, const Integrand& f, int n_theta, int n_z) {
    gsl_integration_glfixed_table* tt = gsl_integration_glfixed_table_alloc(n_theta);
    gsl_integration_glfixed_table* tz = gsl_integration_glfixed_table_alloc(n_z);
    const std::vector<double> bps = s.angular_breakpoints(0.0);
    const int Q = static_cast<int>(bps.size());
    Complex sum = 0.0;
    for (int k = 0; k < n_z; ++k) {
        double z, wz;
        gsl_integration_glfixed_point(s.z_lo(), s.z_hi(), k, &z, &wz, tz);
        for (int q = 1; q <= Q; ++q) {
            const double hi = bps[q - 1];
            const double lo = (q == 1) ? bps[Q - 1] - 2 * kPi : bps[q - 2];
            for (int j = 0; j < n_theta; ++j) {
                double th, wt;
                gsl_integration_glfixed_point(lo, hi, j, &th, &wt, tt);
                const double r = s.rho(th, z), rt = s.drho_dtheta(th, z);
                sum += f(r, th, z) * std::sqrt(r * r + rt * rt) * s.density(z) * wt * wz;
            }
        }
    }
    gsl_integration_glfixed_table_free(tt);
    gsl_integration_glfixed_table_free(tz);
    return sum;
}

Complex coarea_sum(const CoareaGrid& g, const Integrand& f) { return ensemble_integral(g, f); }

}  // namespace

TEST_CASE("ellipse spatial weights sum to pi") {
    for (auto [M, N] : {std::pair{15, 10}, {8, 3}, {40, 7}}) {
        const CoareaGrid g = ellipse_grid(5.0, 1.0, M, N);
        double sum = 0.0;
        for (const GridNode& n : g.nodes) sum += n.spatial_weight;
        CHECK(std::abs(sum - kPi) <= 1e-12 * kPi);
    }
}

TEST_CASE("ellipse grid shape: node and branch counts") {
    const int M = 15, N = 10;
    const CoareaGrid g = ellipse_grid(5.0, 1.0, M, N);
    size_t expected = 0;
    for (int i = 1; i <= M; ++i) {
        const double x = std::cos((2.0 * i - 1.0) * kPi / (2.0 * M));
        const double r = 2.0 * x + 3.0;
        expected += N * std::max(1, static_cast<int>(std::floor(r)));
    }
    CHECK(g.nodes.size() == expected);
    CHECK(g.points().size() == 4 * expected);  // four fiber branches per node
    for (const GridNode& n : g.nodes) {
        double frac = 0.0;
        for (const GridBranch& b : n.branches) frac += b.fraction;
        CHECK(frac == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(n.r > 1.0);
        CHECK(n.r < 5.0);
    }
}

TEST_CASE("octagon grid covers eight subdomains") {
    const ShapePtr s = random_octagon(5.0, 4.0);
    const CoareaGrid g = polygon_grid(s, 6, 5);
    std::vector<int> seen(9, 0);
    for (const GridNode& n : g.nodes) {
        REQUIRE(n.subdomain_id >= 1);
        REQUIRE(n.subdomain_id <= 8);
        seen[n.subdomain_id]++;
        CHECK(n.branches.size() == 1);
    }
    for (int q = 1; q <= 8; ++q) CHECK(seen[q] > 0);
}

TEST_CASE("coarea identity: ellipse against dense tensor oracle") {
    const ShapePtr s = ellipse_shape(5.0, 1.0);
    const CoareaGrid g = ellipse_grid(5.0, 1.0, 24, 12);
    const std::vector<Integrand> fs = {
        [](double, double, double) { return Complex(1.0); },
        [](double r, double, double) { return Complex(std::exp(0.3 * r)); },
        [](double r, double th, double z) {
            return std::exp(Complex(0.0, 1.0) * (r * std::cos(th - z)));
        },
        [](double r, double th, double) { return Complex(r * r * std::sin(2 * th), r); },
    };
    for (const Integrand& f : fs) {
        const Complex exact = dense_periodic(*s, f, 800, 800);
        const Complex got = coarea_sum(g, f);
        CHECK(std::abs(got - exact) <= 1e-6 * std::abs(exact));
    }
}

TEST_CASE("coarea identity: octagon against dense tensor oracle") {
    const ShapePtr s = random_octagon(5.0, 4.0);
    const CoareaGrid g = polygon_grid(s, 15, 12);
    const std::vector<Integrand> fs = {
        [](double, double, double) { return Complex(1.0); },
        [](double r, double th, double z) {
            return Complex(std::cos(0.4 * r * std::cos(th)) * (1.0 + 0.2 * z));
        },
        [](double r, double th, double) {
            return std::exp(Complex(0.0, 0.5) * (r * std::sin(th)));
        },
    };
    for (const Integrand& f : fs) {
        const Complex exact = dense_polygon(*s, f, 60, 60);
        const Complex got = coarea_sum(g, f);
        CHECK(std::abs(got - exact) <= 1e-6 * std::abs(exact));
    }
}

TEST_CASE("coarea error decays geometrically under doubling") {
    const ShapePtr s = ellipse_shape(5.0, 1.0);
    const Integrand f = [](double r, double th, double z) {
        // smooth and 2*pi-periodic in the rotation parameter
        return std::exp(Complex(0.0, 1.0) * (0.8 * r * std::cos(th) + 0.3 * std::sin(z)));
    };
    const Complex exact = dense_periodic(*s, f, 1200, 1200);
    double prev = 1e300;
    int improved = 0;
    for (int k : {4, 8, 16, 32}) {
        const double err = std::abs(coarea_sum(ellipse_grid(5.0, 1.0, k, k), f) - exact);
        if (err < 0.25 * prev || err < 1e-12) ++improved;
        prev = err;
    }
    CHECK(improved >= 3);  // at least 4x reduction per doubling until roundoff
}

TEST_CASE("naive grid weights") {
    const ShapePtr ell = ellipse_shape(5.0, 1.0);
    const NaiveGrid gp = naive_grid(ell, 16, 32);
    double wz = 0.0;
    for (double w : gp.z_weights) wz += w;
    CHECK(wz == doctest::Approx(2 * kPi));

    const ShapePtr oct = random_octagon(5.0, 4.0);
    const NaiveGrid gt = naive_grid(oct, 9, 32);
    CHECK(gt.z_nodes.front() == -1.0);
    CHECK(gt.z_nodes.back() == 1.0);
    CHECK(gt.z_weights.front() == doctest::Approx(0.5 * gt.z_weights[1]));

    const NaiveGrid g1 = naive_grid(oct, 1, 8);
    CHECK(g1.z_nodes.size() == 1);
    CHECK(g1.z_weights[0] == doctest::Approx(2.0));
}

TEST_CASE("naive grid integrates the mean perimeter") {
    // Circle of radius 3: every realization has perimeter 6*pi.
    const ShapePtr c = ellipse_shape(3.0, 3.0);
    const NaiveGrid g = naive_grid(c, 4, 64);
    Complex sum = 0.0;
    for (const QuadPoint& p : g.points()) sum += p.weight;
    CHECK(sum.real() == doctest::Approx(6 * kPi).epsilon(1e-12));
    CHECK(sum.imag() == 0.0);
}
