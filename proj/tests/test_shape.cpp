#include <doctest.h>

#include <cmath>

#include "starscat/shape.hpp"

using namespace starscat;

namespace {

// FD check of the analytic partials at (theta, z).
void check_partials(const StarShape& s, double theta, double z, double tol = 1e-6) {
    const double h = 1e-6;
    const double dt_fd = (s.rho(theta + h, z) - s.rho(theta - h, z)) / (2 * h);
    const double dz_fd = (s.rho(theta, z + h) - s.rho(theta, z - h)) / (2 * h);
    CHECK(s.drho_dtheta(theta, z) == doctest::Approx(dt_fd).epsilon(tol));
    CHECK(s.drho_dz(theta, z) == doctest::Approx(dz_fd).epsilon(tol));
}

// |grad z_r| via re-solving the fiber at perturbed radii.
double fd_grad_z(const StarShape& s, double theta, double r, double z_ref) {
    const double h = 1e-6 * r;
    auto nearest = [&](double rr) {
        double best = 0.0, dist = 1e300;
        for (const FiberBranch& b : s.fiber_solve(theta, rr))
            if (std::abs(b.z - z_ref) < dist) {
                dist = std::abs(b.z - z_ref);
                best = b.z;
            }
        return best;
    };
    const double dz_dr = (nearest(r + h) - nearest(r - h)) / (2 * h);
    const double rt = s.drho_dtheta(theta, z_ref);
    const double rho = s.rho(theta, z_ref);
    const double metric = std::sqrt(1.0 + (rt / rho) * (rt / rho));
    return metric * std::abs(dz_dr);
}

}  // namespace

TEST_CASE("ellipse radius bounds and partials") {
    const ShapePtr s = ellipse_shape(5.0, 1.0);
    CHECK(s->r_min() == 1.0);
    CHECK(s->r_max() == 5.0);
    CHECK(s->z_periodic());
    CHECK(s->rho(0.7, 0.7) == doctest::Approx(5.0));         // along the major axis
    CHECK(s->rho(0.7 + kPi / 2, 0.7) == doctest::Approx(1.0));
    for (double theta : {0.3, 1.9, 4.4})
        for (double z : {0.1, 2.0, 5.5}) check_partials(*s, theta, z);
}

TEST_CASE("ellipse fiber: four branches solving rho = r") {
    const ShapePtr s = ellipse_shape(5.0, 1.0);
    for (double theta : {0.0, 0.9, 3.7})
        for (double r : {1.3, 2.5, 4.8}) {
            const auto branches = s->fiber_solve(theta, r);
            REQUIRE(branches.size() == 4);
            for (const FiberBranch& b : branches) {
                CHECK(s->rho(theta, b.z) == doctest::Approx(r).epsilon(1e-12));
                CHECK(b.density == doctest::Approx(1.0 / (2 * kPi)));
                CHECK(b.z >= 0.0);
                CHECK(b.z < 2 * kPi);
            }
        }
    CHECK(s->fiber_solve(0.5, 0.9).empty());
    CHECK(s->fiber_solve(0.5, 5.1).empty());
}

TEST_CASE("ellipse fiber gradient magnitude matches implicit differentiation") {
    const ShapePtr s = ellipse_shape(5.0, 1.0);
    for (double theta : {0.4, 2.2})
        for (double r : {1.7, 3.1, 4.5})
            for (const FiberBranch& b : s->fiber_solve(theta, r))
                CHECK(b.grad_z_magnitude ==
                      doctest::Approx(fd_grad_z(*s, theta, r, b.z)).epsilon(1e-4));
}

TEST_CASE("ellipse fiber gradient equals s * |dt_r/dr|") {
    const double a = 5.0, b = 1.0;
    const ShapePtr s = ellipse_shape(a, b);
    for (double r : {1.5, 3.0, 4.2}) {
        const double expected = std::abs(dt_r_dr(a, b, r));
        for (const FiberBranch& br : s->fiber_solve(1.1, r)) {
            const double rt = s->drho_dtheta(1.1, br.z);
            const double metric = std::sqrt(1.0 + (rt / r) * (rt / r));
            CHECK(br.grad_z_magnitude == doctest::Approx(metric * expected).epsilon(1e-10));
        }
    }
}

TEST_CASE("circle accepted, a < b rejected") {
    CHECK(ellipse_shape(3.0, 3.0)->rho(1.0, 2.0) == doctest::Approx(3.0));
    CHECK_THROWS_AS(ellipse_shape(1.0, 5.0), ParameterError);
}

TEST_CASE("octagon geometry") {
    const ShapePtr s = random_octagon(5.0, 4.0);
    CHECK(s->r_min() == 1.0);
    CHECK(s->r_max() == 9.0);
    CHECK_FALSE(s->z_periodic());
    CHECK(s->angular_breakpoints(0.0).size() == 8);
    // Vertex radii: odd vertices a + b*z, even vertices a.
    for (double z : {-0.8, 0.0, 0.6}) {
        CHECK(s->rho(kPi / 4, z) == doctest::Approx(5.0 + 4.0 * z));
        CHECK(s->rho(kPi / 2, z) == doctest::Approx(5.0));
        CHECK(s->rho(2 * kPi, z) == doctest::Approx(5.0));
    }
    for (double theta : {0.2, 1.1, 3.0, 5.9})
        for (double z : {-0.5, 0.1, 0.7}) check_partials(*s, theta, z);
}

TEST_CASE("octagon closed-form fiber agrees with generic bracketing") {
    const double a = 5.0, b = 4.0;
    const ShapePtr oct = random_octagon(a, b);
    VertexRadii radii;
    radii.value = [a, b](int q, double z) { return ((q + 1) % 2 == 1) ? a + b * z : a; };
    radii.dz = [b](int q, double) { return ((q + 1) % 2 == 1) ? b : 0.0; };
    std::vector<double> angles;
    for (int q = 1; q <= 8; ++q) angles.push_back(q * kPi / 4.0);
    const ShapePtr generic =
        polygon_shape(radii, angles, -1.0, 1.0, a - b, a + b, "octagon-generic");

    for (double theta : {0.1, 0.9, 2.0, 3.3, 4.7, 6.1})
        for (double r : {2.0, 4.5, 6.0, 8.0}) {
            const auto fast = oct->fiber_solve(theta, r);
            const auto slow = generic->fiber_solve(theta, r);
            REQUIRE(fast.size() == slow.size());
            for (size_t i = 0; i < fast.size(); ++i) {
                CHECK(fast[i].z == doctest::Approx(slow[i].z).epsilon(1e-10));
                CHECK(fast[i].grad_z_magnitude ==
                      doctest::Approx(slow[i].grad_z_magnitude).epsilon(1e-8));
                CHECK(oct->rho(theta, fast[i].z) == doctest::Approx(r).epsilon(1e-12));
            }
        }
}

TEST_CASE("octagon fiber gradient magnitude matches implicit differentiation") {
    const ShapePtr s = random_octagon(5.0, 4.0);
    for (double theta : {0.3, 1.7, 5.2})
        for (double r : {3.0, 5.5, 7.5})
            for (const FiberBranch& b : s->fiber_solve(theta, r))
                CHECK(b.grad_z_magnitude ==
                      doctest::Approx(fd_grad_z(*s, theta, r, b.z)).epsilon(1e-4));
}

TEST_CASE("surface sample") {
    const ShapePtr s = ellipse_shape(5.0, 1.0);
    const SurfaceSample smp = surface_sample(*s, 0.9, 0.9);  // major-axis point
    CHECK(smp.position.x == doctest::Approx(5.0 * std::cos(0.9)));
    CHECK(smp.position.y == doctest::Approx(5.0 * std::sin(0.9)));
    CHECK(norm(smp.unit_outward_normal) == doctest::Approx(1.0));
    // At the axis the normal is radial and the metric is 1.
    CHECK(smp.unit_outward_normal.x == doctest::Approx(std::cos(0.9)));
    CHECK(smp.metric_s == doctest::Approx(1.0));
    CHECK(smp.line_element == doctest::Approx(5.0));
}

TEST_CASE("polygon validation") {
    VertexRadii radii;
    radii.value = [](int, double) { return 1.0; };
    radii.dz = [](int, double) { return 0.0; };
    CHECK_THROWS_AS(polygon_shape(radii, {1.0, 0.5, 2.0}, 0, 1, 0.1, 2, "bad"),
                    ParameterError);
    CHECK_THROWS_AS(polygon_shape(radii, {1.0, 2.0}, 0, 1, 0.1, 2, "bad"), ParameterError);
    VertexRadii neg;
    neg.value = [](int q, double) { return q == 0 ? -1.0 : 1.0; };
    neg.dz = [](int, double) { return 0.0; };
    CHECK_THROWS_AS(polygon_shape(neg, {1.0, 2.0, 3.0}, 0, 1, 0.1, 2, "bad"), ParameterError);
}

TEST_CASE("dt_r_dr guards") {
    CHECK_THROWS_AS(dt_r_dr(5.0, 1.0, 5.0), SingularityError);
    CHECK_THROWS_AS(dt_r_dr(5.0, 1.0, 0.5), ParameterError);
    CHECK_THROWS_AS(dt_r_dr(1.0, 1.0, 1.0), ParameterError);
    CHECK(dt_r_dr(5.0, 1.0, 3.0) ==
          doctest::Approx(-5.0 / (3.0 * std::sqrt(8.0 * 16.0))));
}
