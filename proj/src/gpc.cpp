#include "starscat/gpc.hpp"

#include <cmath>

#include "starscat/specfun.hpp"

namespace starscat {

double GpcBasis::eval(int n, double z) const {
    if (n < 0) throw ParameterError("gpc index must be >= 0");
    if (kind == Kind::Legendre) return std::legendre(n, z);
    if (n == 0) return 1.0;
    return (n % 2 == 0) ? std::cos((n / 2) * z) : std::sin(((n + 1) / 2) * z);
}

double GpcBasis::gamma(int n) const {
    if (n < 0) throw ParameterError("gpc index must be >= 0");
    if (kind == Kind::Legendre) return 1.0 / (2.0 * n + 1.0);  // 2/(2n+1) times density 1/2
    return n == 0 ? 1.0 : 0.5;                                 // under dz/(2*pi)
}

GpcBasis fourier_basis() { return {GpcBasis::Kind::Fourier}; }
GpcBasis legendre_basis() { return {GpcBasis::Kind::Legendre}; }

GpcBasis basis_for(const StarShape& shape) {
    return shape.z_periodic() ? fourier_basis() : legendre_basis();
}

std::vector<std::pair<int, int>> target_labels(int mu, int N) {
    std::vector<std::pair<int, int>> labels;
    for (int m = -mu; m <= mu; ++m)
        for (int n = 0; n <= N; ++n) labels.emplace_back(m, n);
    return labels;
}

std::vector<WeightedGridfunction> build_targets(const RulePtr& rule, const GpcBasis& basis,
                                                double kappa, int mu, int N) {
    if (mu < 0 || N < 0) throw ParameterError("build_targets requires mu, N >= 0");
    const Eigen::Index P = static_cast<Eigen::Index>(rule->pts.size());
    const int T = (2 * mu + 1) * (N + 1);
    std::vector<WeightedGridfunction> out(T);
    for (auto& g : out) {
        g.rule = rule;
        g.entries.resize(P);
    }
    std::vector<double> jm(mu + 1), pn(N + 1);
    Eigen::Index i = 0;
    for (const QuadPoint& p : rule->pts) {
        bessel_j_array(mu, kappa * p.r, jm.data());
        for (int n = 0; n <= N; ++n) pn[n] = basis.eval(n, p.z) / basis.gamma(n);
        const double sw = std::sqrt(p.weight);
        const Complex e = std::polar(1.0, -p.theta);  // e^{-i theta}
        Complex em = 1.0;                             // e^{-i m theta}, m from 0 upward
        int t0 = mu * (N + 1);                        // column block for m = 0
        for (int m = 0; m <= mu; ++m) {
            const Complex base = Complex(0.0, -0.25) * jm[m] * sw;
            const double refl = (m & 1) ? -1.0 : 1.0;
            for (int n = 0; n <= N; ++n) {
                out[t0 + m * (N + 1) + n].entries(i) = base * em * pn[n];
                if (m > 0)
                    out[t0 - m * (N + 1) + n].entries(i) = refl * base * std::conj(em) * pn[n];
            }
            em *= e;
        }
        ++i;
    }
    return out;
}

std::vector<WeightedGridfunction> build_targets(const CoareaGrid& grid, const GpcBasis& basis,
                                                double kappa, int mu, int N) {
    return build_targets(make_rule(grid), basis, kappa, mu, N);
}

GpcTable estimate(const ReconstructionKernel& kernel, const Eigen::VectorXcd& outcomes,
                  int mu, int N) {
    if (kernel.coefficients.cols() != outcomes.size())
        throw DimensionError("kernel/outcomes source-count mismatch");
    if (kernel.coefficients.rows() != (2 * mu + 1) * (N + 1))
        throw DimensionError("kernel target count does not match (2*mu+1)*(N+1)");
    GpcTable table;
    table.mu = mu;
    table.order = N;
    table.coefficients.resize(2 * mu + 1, N + 1);
    const Eigen::VectorXcd b = kernel.coefficients * outcomes;
    int t = 0;
    for (int m = -mu; m <= mu; ++m)
        for (int n = 0; n <= N; ++n, ++t) {
            table.coefficients(m + mu, n) = b(t);
            if (!kernel.satisfied[t]) table.meta.unsatisfied.emplace_back(m, n);
        }
    table.meta.eps_ev = kernel.eps_ev;
    table.meta.eps_ed = kernel.eps_ed;
    return table;
}

Eigen::VectorXcd evaluate_expansion(const GpcTable& table, const GpcBasis& basis, double z) {
    Eigen::VectorXd pn(table.order + 1);
    for (int n = 0; n <= table.order; ++n) pn(n) = basis.eval(n, z);
    return table.coefficients * pn;
}

}  // namespace starscat
