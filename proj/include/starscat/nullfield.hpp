#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>

#include "starscat/coarea.hpp"

namespace starscat {

// A quadrature over the random-surface ensemble (or a single realization):
// the common currency for discretizing functionals.
struct EnsembleRule {
    std::vector<QuadPoint> pts;
    std::string id;
};
using RulePtr = std::shared_ptr<const EnsembleRule>;

RulePtr make_rule(const CoareaGrid& grid);
RulePtr make_rule(const NaiveGrid& grid);
// Surface rule for one realization z: trapezoid for smooth shapes, per-segment
// Gauss-Legendre across breakpoints. n = total nodes (smooth) or nodes per segment.
RulePtr surface_rule(const ShapePtr& shape, double z, int n);

// Interior multipole source placed along the family of random surfaces.
struct SourceSpec {
    int ell = 1;                 // 1-based location index
    int count = 1;               // L, total locations
    int mode = 0;                // multipole order
    double radial_factor = 0.95; // r_src = radial_factor * rho(theta_ell; z)
    int degree = 0;              // Legendre degree of the strength modulation in z
};

struct Functional {
    enum class Kind { Target, InfoSource };
    Kind kind = Kind::Target;
    int mode = 0;   // m
    int index = 0;  // gPC index n (Target) or location ell (InfoSource)
    std::function<Complex(double r, double theta, double z)> evaluator;
    std::optional<SourceSpec> source;  // set for InfoSource
};

// Target evaluator: -(i/4) J_m(kappa r) e^{-i m theta} * pn_over_gamma(z).
// The sign folds the single-layer representation of the scattered field so
// that reconstructed combinations estimate b_{m,n} directly.
Functional target_functional(int m, int n, double kappa,
                             std::function<double(double)> pn_over_gamma);

Functional info_source_functional(const ShapePtr& shape, const SourceSpec& spec, double kappa);

Vec2 info_source_position(const StarShape& shape, const SourceSpec& spec, double z);

struct WeightedGridfunction {
    Eigen::VectorXcd entries;
    RulePtr rule;
};

// All L*(2*modes+1)*(max_degree+1) information sources (location-major, mode
// -modes..modes middle, modulation degree 0..max_degree inner), discretized in
// one pass.
struct SourceSet {
    std::vector<Functional> functionals;
    std::vector<WeightedGridfunction> gridfunctions;
};
SourceSet build_sources(const RulePtr& rule, const ShapePtr& shape, int L, int modes,
                        double kappa, double radial_factor = 0.95, int max_degree = 0);

WeightedGridfunction discretize(const RulePtr& rule, const Functional& fn);
WeightedGridfunction discretize(const CoareaGrid& grid, const Functional& fn);

// <f, g> = sum f_i conj(g_i)
Complex gridfunction_dot(const WeightedGridfunction& f, const WeightedGridfunction& g);

struct ReconstructionKernel {
    Eigen::MatrixXcd coefficients;  // targets x sources
    Eigen::VectorXd residual_norms;
    Eigen::VectorXd target_norms;
    double bound = 0.0;  // eps_ev / eps_ed
    double eps_ev = 0.0, eps_ed = 0.0;
    std::vector<bool> satisfied;
    std::vector<std::pair<int, int>> target_labels;  // (m, n) or (m, 0)
};

// Box-constrained truncated-SVD least squares, one active-set re-solve.
ReconstructionKernel solve_kernel(const std::vector<WeightedGridfunction>& targets,
                                  const std::vector<WeightedGridfunction>& sources,
                                  double eps_ev, double eps_ed);

// -contour_integral(u_inc * dnu(psi) - psi * dnu(u_inc)) dS over the realization z
// (equals contour_integral psi * dnu(u) dS by the null-field identity).
Complex nullfield_rhs(const StarShape& shape, double z, const Functional& source,
                      double kappa, int surface_nodes);

// nullfield_rhs for every source at a fixed realization z (batched).
Eigen::VectorXcd realization_outcomes(const StarShape& shape,
                                      const std::vector<Functional>& sources, double kappa,
                                      double z, int surface_nodes);

// Closed form of the same contour integrals: by Green's identity the
// integral extracts the multipole expansion coefficient of the incident
// plane wave about the source point, -4i i^m e^{i kappa x_src.x}, scaled by
// the source's Legendre strength modulation. Exact for every mode, where the
// surface quadrature degrades rapidly with |mode|.
Eigen::VectorXcd expansion_outcomes(const StarShape& shape,
                                    const std::vector<Functional>& sources, double kappa,
                                    double z);

// a_ell = integral of the realization outcome over the parameter distribution
// (trapezoid for periodic z, Gauss-Legendre otherwise), with the closed-form
// integrand.
Eigen::VectorXcd information_outcomes(const StarShape& shape,
                                      const std::vector<Functional>& sources, double kappa,
                                      int z_nodes);

}  // namespace starscat
