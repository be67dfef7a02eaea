#pragma once

#include "starscat/gpc.hpp"

namespace starscat {

struct OracleSettings {
    int boundary_nodes = 256;  // total Nystrom nodes (rounded up to the grid stride)
    int grading = 2;           // corner grading exponent for polygonal boundaries
};

struct RealizationResult {
    Eigen::VectorXcd b;  // over m in [-mu, mu]
    int mu = 0;
};

// Deterministic single-realization solve, independent of the ensemble
// machinery: combined-field integral equation (exterior Dirichlet),
// Nystrom-discretized with the spectral log-quadrature on a uniform
// parameter grid; polygonal boundaries use a corner-graded parameterization.
RealizationResult solve_realization(const ShapePtr& shape, double z, double kappa,
                                    const OracleSettings& settings);

struct McEstimate {
    Eigen::VectorXcd mean;
    Eigen::VectorXd half_width;  // 1.96 * sample_std / sqrt(n)
    int n_samples = 0;
    int mu = 0;
    std::string rng_id;
    int n_failures = 0;
};

McEstimate monte_carlo(const ShapePtr& shape, double kappa, int n_samples,
                       unsigned long long seed, const OracleSettings& settings,
                       int threads = 1);

struct CompareRow {
    int m = 0;
    Complex exact;   // Monte Carlo reference
    Complex approx;  // coarea/gPC pipeline
    double abs_err = 0.0;
    double half_width = 0.0;
    bool within = false;
};

struct CompareReport {
    std::vector<CompareRow> rows;
    double max_err = 0.0;
    double tolerance = 0.0;
};

CompareReport compare(const McEstimate& mc, const GpcTable& table, double tolerance);

// The z-draw for realization index i under `seed` (splitmix-scrambled
// mt19937_64, one draw per stream).
double parameter_draw(const StarShape& shape, unsigned long long seed, int index);

}  // namespace starscat
