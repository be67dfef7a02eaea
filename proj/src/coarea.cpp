#include "starscat/coarea.hpp"

#include <gsl/gsl_integration.h>

#include <cmath>

namespace starscat {

namespace {

constexpr double kStationaryCut = 1e-10;  // |d rho/d z| below this: branch excluded

struct GlRule {
    std::vector<double> x, w;  // on [-1, 1]
};

GlRule gl_rule(int n) {
    gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(n);
    GlRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) gsl_integration_glfixed_point(-1.0, 1.0, i, &r.x[i], &r.w[i], t);
    gsl_integration_glfixed_table_free(t);
    return r;
}

// Per-branch coarea kernel r * density * |grad z_r| (= r * s * p / |d rho/d z|).
double branch_kernel(double r, const FiberBranch& b) {
    return r * b.density * b.grad_z_magnitude;
}

void attach_branches(const StarShape& shape, GridNode& node, double desing) {
    double total = 0.0;
    for (const FiberBranch& fb : shape.fiber_solve(node.theta, node.r)) {
        if (std::abs(shape.drho_dz(node.theta, fb.z)) < kStationaryCut) continue;
        node.branches.push_back({fb, 0.0});
        total += branch_kernel(node.r, fb);
    }
    if (total <= 0.0) {
        node.branches.clear();
        node.node_factor = 0.0;
        return;
    }
    node.node_factor = desing * total;
    for (GridBranch& gb : node.branches)
        gb.fraction = branch_kernel(node.r, gb.fiber) / total;
}

}  // namespace

std::vector<QuadPoint> CoareaGrid::points() const {
    std::vector<QuadPoint> pts;
    for (const GridNode& n : nodes) {
        int k = 0;
        for (const GridBranch& b : n.branches)
            pts.push_back({n.r, n.theta, b.fiber.z,
                           b.fraction * n.spatial_weight * n.node_factor, n.subdomain_id, k++});
    }
    return pts;
}

std::vector<QuadPoint> NaiveGrid::points() const {
    std::vector<QuadPoint> pts;
    for (size_t k = 0; k < z_nodes.size(); ++k)
        for (size_t j = 0; j < theta_nodes.size(); ++j) {
            const double th = theta_nodes[j], z = z_nodes[k];
            const double r = shape->rho(th, z);
            const double rt = shape->drho_dtheta(th, z);
            const double w = theta_weights[j] * z_weights[k] * shape->density(z) *
                             std::sqrt(r * r + rt * rt);
            pts.push_back({r, th, z, w, 0, 0});
        }
    return pts;
}

CoareaGrid ellipse_grid(double a, double b, int M, int N_base) {
    if (M < 1 || N_base < 1) throw ParameterError("ellipse_grid requires M, N_base >= 1");
    ShapePtr shape = ellipse_shape(a, b);
    CoareaGrid grid;
    grid.shape = shape;
    grid.id = "ellipse_grid(M=" + std::to_string(M) + ",N=" + std::to_string(N_base) + ")";
    for (int i = 1; i <= M; ++i) {
        const double x = std::cos((2.0 * i - 1.0) * kPi / (2.0 * M));
        const double r = 0.5 * (a - b) * x + 0.5 * (a + b);
        const int Ni = N_base * std::max(1, static_cast<int>(std::floor(r)));
        // Chebyshev-Gauss weight pi/M for dr/sqrt((a-r)(r-b)), trapezoid 1/N_i
        // for dtheta/(2*pi).
        const double w = kPi / (static_cast<double>(M) * Ni);
        const double desing = 2.0 * kPi * std::sqrt((a - r) * (r - b));
        for (int j = 0; j < Ni; ++j) {
            GridNode node;
            node.subdomain_id = 0;
            node.r = r;
            node.theta = 2.0 * kPi * j / Ni;
            node.spatial_weight = w;
            attach_branches(*shape, node, desing);
            grid.nodes.push_back(std::move(node));
        }
    }
    return grid;
}

CoareaGrid polygon_grid(const ShapePtr& shape, int M_q, int N_q) {
    if (M_q < 1 || N_q < 1) throw ParameterError("polygon_grid requires M_q, N_q >= 1");
    const std::vector<double> bps = shape->angular_breakpoints(0.0);
    if (bps.empty()) throw ParameterError("polygon_grid requires a polygonal shape");
    const GlRule sigma = gl_rule(M_q), tau = gl_rule(N_q);
    CoareaGrid grid;
    grid.shape = shape;
    grid.id = "polygon_grid(Mq=" + std::to_string(M_q) + ",Nq=" + std::to_string(N_q) + ")";
    const int Q = static_cast<int>(bps.size());
    for (int q = 1; q <= Q; ++q) {
        const double th_hi = bps[q - 1];
        const double th_lo = (q == 1) ? bps[Q - 1] - 2.0 * kPi : bps[q - 2];
        const double half = 0.5 * (th_hi - th_lo);
        for (int j = 0; j < N_q; ++j) {
            const double th = th_lo + half * (tau.x[j] + 1.0);
            // Radial extent of the segment sliver at this angle.
            double r0 = shape->rho(th, shape->z_lo());
            double r1 = shape->rho(th, shape->z_hi());
            if (r0 > r1) std::swap(r0, r1);
            const double h = 0.5 * (r1 - r0), c = 0.5 * (r1 + r0);
            for (int i = 0; i < M_q; ++i) {
                GridNode node;
                node.subdomain_id = q;
                node.r = c + h * sigma.x[i];
                node.theta = th;
                node.spatial_weight = sigma.w[i] * tau.w[j] * half;
                attach_branches(*shape, node, h);
                if (!node.branches.empty()) grid.nodes.push_back(std::move(node));
            }
        }
    }
    return grid;
}

NaiveGrid naive_grid(const ShapePtr& shape, int M_z, int N_theta) {
    if (M_z < 1 || N_theta < 1) throw ParameterError("naive_grid requires M, N >= 1");
    NaiveGrid g;
    g.shape = shape;
    g.id = "naive_grid(M=" + std::to_string(M_z) + ",N=" + std::to_string(N_theta) + ")";
    for (int j = 0; j < N_theta; ++j) {
        g.theta_nodes.push_back(2.0 * kPi * j / N_theta);
        g.theta_weights.push_back(2.0 * kPi / N_theta);
    }
    const double lo = shape->z_lo(), hi = shape->z_hi();
    if (shape->z_periodic()) {
        for (int k = 0; k < M_z; ++k) {
            g.z_nodes.push_back(lo + (hi - lo) * k / M_z);
            g.z_weights.push_back((hi - lo) / M_z);
        }
    } else {
        // Gauss-Legendre over the non-periodic parameter range.
        gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(M_z);
        for (int k = 0; k < M_z; ++k) {
            double z, w;
            gsl_integration_glfixed_point(lo, hi, k, &z, &w, t);
            g.z_nodes.push_back(z);
            g.z_weights.push_back(w);
        }
        gsl_integration_glfixed_table_free(t);
    }
    return g;
}

Complex ensemble_integral(const CoareaGrid& grid,
                          const std::function<Complex(double, double, double)>& f) {
    Complex sum = 0.0;
    for (const QuadPoint& p : grid.points()) sum += f(p.r, p.theta, p.z) * p.weight;
    return sum;
}

}  // namespace starscat
