#pragma once

#include <functional>

#include "starscat/shape.hpp"

namespace starscat {

struct GridBranch {
    FiberBranch fiber;
    double fraction = 1.0;  // per-node fractions sum to 1
};

struct GridNode {
    int subdomain_id = 0;
    double r = 0.0;
    double theta = 0.0;
    double spatial_weight = 0.0;  // pure cubature weight w.r.t. the singular measure
    double node_factor = 0.0;     // geometry factors fixed at build (r, metric, radial extent, ...)
    std::vector<GridBranch> branches;
};

// Flattened (node, branch) quadrature entry; weight is the full product
// fraction * spatial_weight * node_factor.
struct QuadPoint {
    double r = 0.0;
    double theta = 0.0;
    double z = 0.0;
    double weight = 0.0;
    int subdomain_id = 0;
    int branch_index = 0;
};

struct CoareaGrid {
    ShapePtr shape;
    std::vector<GridNode> nodes;
    std::vector<QuadPoint> points() const;
    std::string id;
};

struct NaiveGrid {
    ShapePtr shape;
    std::vector<double> theta_nodes, z_nodes;
    std::vector<double> theta_weights, z_weights;  // tensor-product weights
    // Effective ensemble quadrature: weight includes rho*s and the density.
    std::vector<QuadPoint> points() const;
    std::string id;
};

// Chebyshev-Gauss (radial) x trapezoid (angular, density N_base*floor(r)) grid
// for the rotated ellipse.
CoareaGrid ellipse_grid(double a, double b, int M, int N_base);

// Repeated per-segment Gauss-Legendre grid for the random octagon.
CoareaGrid polygon_grid(const ShapePtr& shape, int M_q, int N_q);

// Uniform tensor (theta, z) grid with trapezoid weights.
NaiveGrid naive_grid(const ShapePtr& shape, int M_z, int N_theta);

// Sum f(r, theta, z) * weight over all (node, branch) entries; approximates
// the ensemble surface integral of f.
Complex ensemble_integral(const CoareaGrid& grid,
                          const std::function<Complex(double, double, double)>& f);

}  // namespace starscat
