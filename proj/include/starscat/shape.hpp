#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "starscat/common.hpp"

namespace starscat {

struct SurfaceSample {
    Vec2 position;
    Vec2 unit_outward_normal;
    double metric_s = 1.0;     // sqrt(1 + (rho_theta/rho)^2)
    double line_element = 0.0; // sqrt(rho^2 + rho_theta^2), per radian
};

// One solution z of rho(theta; z) = r.
struct FiberBranch {
    double z = 0.0;
    double grad_z_magnitude = 0.0;  // |grad z_r| = s(theta; z) * |d z_r / d r|
    double density = 0.0;           // dF/dz at z
};

// Star-shaped random boundary rho(theta; z); immutable after construction.
class StarShape {
public:
    virtual ~StarShape() = default;

    virtual double rho(double theta, double z) const = 0;
    virtual double drho_dtheta(double theta, double z) const = 0;
    virtual double drho_dz(double theta, double z) const = 0;

    virtual double r_min() const = 0;
    virtual double r_max() const = 0;

    virtual double z_lo() const = 0;
    virtual double z_hi() const = 0;
    virtual bool z_periodic() const = 0;
    virtual double density(double z) const = 0;

    virtual std::vector<double> angular_breakpoints(double /*z*/) const { return {}; }

    // All z with rho(theta; z) = r.  Generic bracketing implementation;
    // shapes with closed forms override.
    virtual std::vector<FiberBranch> fiber_solve(double theta, double r) const;

    virtual std::string id() const = 0;

protected:
    // Builds a branch record at a solved z (shared by overrides).
    FiberBranch make_branch(double theta, double z) const;
};

using ShapePtr = std::shared_ptr<const StarShape>;

// rho(theta; alpha) = a*b / sqrt(b^2 cos^2(theta-alpha) + a^2 sin^2(theta-alpha)),
// alpha uniform on [0, 2*pi).  a == b (circle) is accepted as a degenerate case.
ShapePtr ellipse_shape(double a, double b);

// Star-shaped polygon with fixed vertex angles and z-dependent vertex radii.
struct VertexRadii {
    // radii(z, q) and d radii / d z, q = 0..Q-1 (vertex q+1 in 1-based terms)
    std::function<double(int q, double z)> value;
    std::function<double(int q, double z)> dz;
};
ShapePtr polygon_shape(VertexRadii radii, std::vector<double> vertex_angles,
                       double z_lo, double z_hi, double r_min, double r_max,
                       std::string id);

// Octagon with rho_q = a + b*(1-(-1)^q)*z/2, theta_q = q*pi/4, z uniform on [-1, 1].
ShapePtr random_octagon(double a, double b);

SurfaceSample surface_sample(const StarShape& shape, double theta, double z);

// d t_r / d r for the ellipse fiber angle t_r = arccos((a/r) sqrt((r^2-b^2)/(a^2-b^2))).
double dt_r_dr(double a, double b, double r);

}  // namespace starscat
