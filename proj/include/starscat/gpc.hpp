#pragma once

#include "starscat/nullfield.hpp"

namespace starscat {

// Orthogonal basis P_n(z) for the parameter distribution.
struct GpcBasis {
    enum class Kind { Fourier, Legendre };
    Kind kind = Kind::Legendre;

    double eval(int n, double z) const;
    double gamma(int n) const;  // <P_n, P_n> under the parameter density
    std::string id() const { return kind == Kind::Fourier ? "fourier" : "legendre"; }
};

GpcBasis fourier_basis();   // z uniform on [0, 2*pi)
GpcBasis legendre_basis();  // z uniform on [-1, 1]
GpcBasis basis_for(const StarShape& shape);

struct GpcTable {
    int mu = 0;
    int order = 0;  // N
    Eigen::MatrixXcd coefficients;  // (2*mu+1) x (N+1), row index m + mu
    struct Meta {
        double kappa = 0.0;
        std::string shape_id, grid_id;
        double eps_ev = 0.0, eps_ed = 0.0;
        std::vector<std::pair<int, int>> unsatisfied;  // (m, n)
    } meta;

    Complex at(int m, int n) const { return coefficients(m + mu, n); }
};

// One weighted gridfunction per (m, n), m in [-mu, mu] (outer), n in [0, N]
// (inner); labels (m, n) attached by solve_kernel via target_labels.
std::vector<WeightedGridfunction> build_targets(const RulePtr& rule, const GpcBasis& basis,
                                                double kappa, int mu, int N);
std::vector<WeightedGridfunction> build_targets(const CoareaGrid& grid, const GpcBasis& basis,
                                                double kappa, int mu, int N);
std::vector<std::pair<int, int>> target_labels(int mu, int N);

GpcTable estimate(const ReconstructionKernel& kernel, const Eigen::VectorXcd& outcomes,
                  int mu, int N);

// b_m(z) ~ sum_n b_{m,n} P_n(z), vector over m in [-mu, mu].
Eigen::VectorXcd evaluate_expansion(const GpcTable& table, const GpcBasis& basis, double z);

}  // namespace starscat
