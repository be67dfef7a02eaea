#include "starscat/nullfield.hpp"

#include <gsl/gsl_integration.h>
#include <lapacke.h>

#include <cmath>
#include <map>
#include <tuple>

#include "starscat/specfun.hpp"

extern "C" void openblas_set_num_threads(int);

namespace starscat {

namespace {

const bool g_blas_single_thread = [] {
    openblas_set_num_threads(1);  // determinism and a single-core host
    return true;
}();

std::vector<double> gl_nodes(int n, std::vector<double>* w);

}  // namespace

RulePtr make_rule(const CoareaGrid& grid) {
    auto rule = std::make_shared<EnsembleRule>();
    rule->pts = grid.points();
    rule->id = grid.id;
    return rule;
}

RulePtr make_rule(const NaiveGrid& grid) {
    auto rule = std::make_shared<EnsembleRule>();
    rule->pts = grid.points();
    rule->id = grid.id;
    return rule;
}

RulePtr surface_rule(const ShapePtr& shape, double z, int n) {
    if (n < 1) throw ParameterError("surface_rule requires n >= 1");
    auto rule = std::make_shared<EnsembleRule>();
    rule->id = "surface(z=" + std::to_string(z) + ")";
    const std::vector<double> bps = shape->angular_breakpoints(z);
    if (bps.empty()) {
        for (int j = 0; j < n; ++j) {
            const double th = 2.0 * kPi * j / n;
            const double r = shape->rho(th, z);
            const double rt = shape->drho_dtheta(th, z);
            rule->pts.push_back({r, th, z, (2.0 * kPi / n) * std::hypot(r, rt), 0, 0});
        }
    } else {
        std::vector<double> w;
        const std::vector<double> x = gl_nodes(n, &w);
        const int Q = static_cast<int>(bps.size());
        for (int q = 1; q <= Q; ++q) {
            const double hi = bps[q - 1];
            const double lo = (q == 1) ? bps[Q - 1] - 2.0 * kPi : bps[q - 2];
            const double half = 0.5 * (hi - lo);
            for (int j = 0; j < n; ++j) {
                const double th = lo + half * (x[j] + 1.0);
                const double r = shape->rho(th, z);
                const double rt = shape->drho_dtheta(th, z);
                rule->pts.push_back({r, th, z, w[j] * half * std::hypot(r, rt), q, 0});
            }
        }
    }
    return rule;
}

Vec2 info_source_position(const StarShape& shape, const SourceSpec& spec, double z) {
    const double th = 2.0 * kPi * (spec.ell - 1) / spec.count;
    const double rs = spec.radial_factor * shape.rho(th, z);
    return {rs * std::cos(th), rs * std::sin(th)};
}

namespace {

// Source strength modulation P_degree on the parameter range mapped to [-1, 1].
double modulation(const StarShape& shape, const SourceSpec& spec, double z) {
    if (spec.degree == 0) return 1.0;
    const double lo = shape.z_lo(), hi = shape.z_hi();
    return std::legendre(spec.degree, 2.0 * (z - lo) / (hi - lo) - 1.0);
}

}  // namespace

Functional target_functional(int m, int n, double kappa,
                             std::function<double(double)> pn_over_gamma) {
    Functional f;
    f.kind = Functional::Kind::Target;
    f.mode = m;
    f.index = n;
    f.evaluator = [m, kappa, png = std::move(pn_over_gamma)](double r, double theta, double z) {
        const double jm = eval({m, CylinderKind::BesselJ}, kappa * r);
        return Complex(0.0, -0.25) * jm * std::polar(1.0, -m * theta) * png(z);
    };
    return f;
}

Functional info_source_functional(const ShapePtr& shape, const SourceSpec& spec, double kappa) {
    if (!(spec.radial_factor > 0.0 && spec.radial_factor < 1.0))
        throw PlacementError("info source must lie strictly inside the obstacle");
    Functional f;
    f.kind = Functional::Kind::InfoSource;
    f.mode = spec.mode;
    f.index = spec.ell;
    f.source = spec;
    f.evaluator = [shape, spec, kappa](double r, double theta, double z) {
        const Vec2 p{r * std::cos(theta), r * std::sin(theta)};
        const Vec2 src = info_source_position(*shape, spec, z);
        const Vec2 d = p - src;
        const double R = norm(d);
        if (R == 0.0) throw SingularityError("info source coincides with a grid node");
        const Complex h = eval_complex({spec.mode, CylinderKind::Hankel1}, kappa * R);
        return h * std::polar(1.0, spec.mode * std::atan2(d.y, d.x)) *
               modulation(*shape, spec, z);
    };
    return f;
}

SourceSet build_sources(const RulePtr& rule, const ShapePtr& shape, int L, int modes,
                        double kappa, double radial_factor, int max_degree) {
    if (L < 1 || modes < 0 || max_degree < 0)
        throw ParameterError("build_sources requires L >= 1, modes >= 0, max_degree >= 0");
    if (!(radial_factor > 0.0 && radial_factor < 1.0))
        throw PlacementError("info source must lie strictly inside the obstacle");
    SourceSet set;
    const int nm = 2 * modes + 1, nd = max_degree + 1;
    const Eigen::Index P = static_cast<Eigen::Index>(rule->pts.size());
    set.gridfunctions.resize(static_cast<size_t>(L) * nm * nd);
    for (int ell = 1; ell <= L; ++ell)
        for (int j = -modes; j <= modes; ++j)
            for (int d = 0; d <= max_degree; ++d) {
                SourceSpec sp{ell, L, j, radial_factor, d};
                set.functionals.push_back(info_source_functional(shape, sp, kappa));
                auto& g = set.gridfunctions[((ell - 1) * nm + (j + modes)) * nd + d];
                g.rule = rule;
                g.entries.resize(P);
            }
    std::vector<Complex> h(modes + 1);
    std::vector<double> leg(nd);
    Eigen::Index i = 0;
    for (const QuadPoint& p : rule->pts) {
        const Vec2 pos{p.r * std::cos(p.theta), p.r * std::sin(p.theta)};
        const double sw = std::sqrt(p.weight);
        for (int d = 0; d <= max_degree; ++d)
            leg[d] = modulation(*shape, SourceSpec{1, L, 0, radial_factor, d}, p.z);
        for (int ell = 1; ell <= L; ++ell) {
            const SourceSpec sp{ell, L, 0, radial_factor};
            const Vec2 dv = pos - info_source_position(*shape, sp, p.z);
            const double R = norm(dv);
            if (R == 0.0) throw SingularityError("info source coincides with a grid node");
            hankel1_array(modes, kappa * R, h.data());
            const Complex e = std::polar(1.0, std::atan2(dv.y, dv.x));  // e^{i phi}
            Complex ej = 1.0;
            for (int j = 0; j <= modes; ++j) {
                const double refl = (j & 1) ? -1.0 : 1.0;
                const Complex v = h[j] * ej * sw;
                const Complex vn = refl * h[j] * std::conj(ej) * sw;
                for (int d = 0; d <= max_degree; ++d) {
                    set.gridfunctions[((ell - 1) * nm + (j + modes)) * nd + d].entries(i) =
                        v * leg[d];
                    if (j > 0)
                        set.gridfunctions[((ell - 1) * nm + (modes - j)) * nd + d].entries(i) =
                            vn * leg[d];
                }
                ej *= e;
            }
        }
        ++i;
    }
    for (const auto& g : set.gridfunctions)
        if (!g.entries.allFinite())
            throw SingularityError("non-finite source entry (source too close to a grid node)");
    return set;
}

WeightedGridfunction discretize(const RulePtr& rule, const Functional& fn) {
    WeightedGridfunction g;
    g.rule = rule;
    g.entries.resize(static_cast<Eigen::Index>(rule->pts.size()));
    Eigen::Index i = 0;
    for (const QuadPoint& p : rule->pts) {
        const Complex v = fn.evaluator(p.r, p.theta, p.z) * std::sqrt(p.weight);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw SingularityError("non-finite gridfunction entry (source at a grid node?)");
        g.entries[i++] = v;
    }
    return g;
}

WeightedGridfunction discretize(const CoareaGrid& grid, const Functional& fn) {
    return discretize(make_rule(grid), fn);
}

Complex gridfunction_dot(const WeightedGridfunction& f, const WeightedGridfunction& g) {
    if (f.entries.size() != g.entries.size())
        throw DimensionError("gridfunction length mismatch");
    return g.entries.dot(f.entries);  // sum f_i * conj(g_i)
}

// ---------------------------------------------------------------------------
// Regularized kernel solve.

namespace {

std::vector<double> gl_nodes(int n, std::vector<double>* w) {
    std::vector<double> x(n);
    w->resize(n);
    gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(n);
    for (int i = 0; i < n; ++i) gsl_integration_glfixed_point(-1.0, 1.0, i, &x[i], &(*w)[i], t);
    gsl_integration_glfixed_table_free(t);
    return x;
}

struct Svd {
    Eigen::MatrixXcd U, V;
    Eigen::VectorXd s;
};

Svd svd_economy(Eigen::MatrixXcd A) {
    const int m = static_cast<int>(A.rows()), n = static_cast<int>(A.cols());
    const int k = std::min(m, n);
    Svd out;
    out.U.resize(m, k);
    out.s.resize(k);
    Eigen::MatrixXcd VT(k, n);
    const int info = LAPACKE_zgesdd(
        LAPACK_COL_MAJOR, 'S', m, n, reinterpret_cast<lapack_complex_double*>(A.data()), m,
        out.s.data(), reinterpret_cast<lapack_complex_double*>(out.U.data()), m,
        reinterpret_cast<lapack_complex_double*>(VT.data()), k);
    if (info != 0) throw Error("zgesdd failed: info=" + std::to_string(info));
    out.V = VT.adjoint();
    return out;
}

// Minimum-norm truncated-SVD least-squares solution.
Eigen::VectorXcd tsvd_solve(const Svd& svd, const Eigen::VectorXcd& g, double eps_ed) {
    if (svd.s.size() == 0 || svd.s(0) <= 0.0)
        return Eigen::VectorXcd::Zero(svd.V.rows());
    int rank = 0;
    while (rank < svd.s.size() && svd.s(rank) >= eps_ed * svd.s(0)) ++rank;
    const Eigen::VectorXcd y = svd.U.leftCols(rank).adjoint() * g;
    return svd.V.leftCols(rank) * (y.array() / svd.s.head(rank).array()).matrix();
}

}  // namespace

ReconstructionKernel solve_kernel(const std::vector<WeightedGridfunction>& targets,
                                  const std::vector<WeightedGridfunction>& sources,
                                  double eps_ev, double eps_ed) {
    if (!(eps_ev >= eps_ed && eps_ed > 0.0))
        throw ParameterError("solve_kernel requires eps_ev >= eps_ed > 0");
    if (sources.empty() || targets.empty())
        throw ParameterError("solve_kernel requires nonempty targets and sources");
    const Eigen::Index P = sources[0].entries.size();
    const int S = static_cast<int>(sources.size());
    const int T = static_cast<int>(targets.size());
    Eigen::MatrixXcd F(P, S);
    for (int l = 0; l < S; ++l) {
        if (sources[l].entries.size() != P) throw DimensionError("source length mismatch");
        F.col(l) = sources[l].entries;
    }
    for (const auto& t : targets)
        if (t.entries.size() != P) throw DimensionError("target length mismatch");

    // Column normalization keeps the relative singular-value cutoff meaningful
    // when source magnitudes span many orders; the box still applies to the
    // raw coefficients.
    Eigen::VectorXd D(S);
    for (int l = 0; l < S; ++l) {
        const double nl = F.col(l).norm();
        D(l) = (nl > 0.0) ? nl : 1.0;
    }
    Eigen::MatrixXcd Fn = F * D.cwiseInverse().asDiagonal();
    const Svd svd = svd_economy(Fn);
    const double B = eps_ev / eps_ed;

    ReconstructionKernel out;
    out.coefficients.resize(T, S);
    out.residual_norms.resize(T);
    out.target_norms.resize(T);
    out.satisfied.assign(T, false);
    out.bound = B;
    out.eps_ev = eps_ev;
    out.eps_ed = eps_ed;

    std::map<std::vector<bool>, Svd> resolve_cache;

    for (int t = 0; t < T; ++t) {
        const Eigen::VectorXcd& g = targets[t].entries;
        Eigen::VectorXcd c = tsvd_solve(svd, g, eps_ed).cwiseQuotient(D.cast<Complex>());

        std::vector<bool> active(S, false);
        bool any_active = false;
        for (int l = 0; l < S; ++l)
            if (std::abs(c(l)) > B) {
                active[l] = true;
                any_active = true;
                c(l) *= B / std::abs(c(l));
            }
        if (any_active) {
            // One re-solve on the free set with the clipped columns moved to
            // the right-hand side.
            std::vector<int> free_idx;
            Eigen::VectorXcd g2 = g;
            for (int l = 0; l < S; ++l) {
                if (active[l])
                    g2 -= F.col(l) * c(l);
                else
                    free_idx.push_back(l);
            }
            if (!free_idx.empty()) {
                auto it = resolve_cache.find(active);
                if (it == resolve_cache.end()) {
                    Eigen::MatrixXcd Ff(P, free_idx.size());
                    for (size_t i = 0; i < free_idx.size(); ++i) Ff.col(i) = Fn.col(free_idx[i]);
                    it = resolve_cache.emplace(active, svd_economy(std::move(Ff))).first;
                }
                const Eigen::VectorXcd cf = tsvd_solve(it->second, g2, eps_ed);
                for (size_t i = 0; i < free_idx.size(); ++i) {
                    Complex v = cf(i) / D(free_idx[i]);
                    if (std::abs(v) > B) v *= B / std::abs(v);
                    c(free_idx[i]) = v;
                }
            }
        }
        out.coefficients.row(t) = c.transpose();
        out.residual_norms(t) = (g - F * c).norm();
        out.target_norms(t) = g.norm();
        out.satisfied[t] = out.residual_norms(t) <= eps_ev * out.target_norms(t);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Null-field right-hand sides.

namespace {

// Batched evaluation of -(u_inc dnu(psi) - psi dnu(u_inc)) integrals for a set
// of interior sources at one realization z.
Eigen::VectorXcd outcomes_at_z(const StarShape& shape, double z,
                               const std::vector<Functional>& sources, double kappa,
                               int surface_nodes) {
    const int S = static_cast<int>(sources.size());
    for (const Functional& f : sources)
        if (!f.source) throw ParameterError("nullfield_rhs requires InfoSource functionals");

    // Unique source locations and the max order needed at each.
    std::map<std::pair<int, int>, int> loc_max;  // (ell, count) -> max |mode|
    for (const Functional& f : sources) {
        auto key = std::make_pair(f.source->ell, f.source->count);
        auto [it, ok] = loc_max.emplace(key, std::abs(f.source->mode));
        if (!ok) it->second = std::max(it->second, std::abs(f.source->mode));
        if (!(f.source->radial_factor > 0.0 && f.source->radial_factor < 1.0))
            throw PlacementError("source point lies outside the closed obstacle");
    }

    const RulePtr rule = surface_rule(
        std::shared_ptr<const StarShape>(&shape, [](const StarShape*) {}), z, surface_nodes);

    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(S);
    for (const QuadPoint& p : rule->pts) {
        const SurfaceSample ss = surface_sample(shape, p.theta, z);
        const Vec2 nu = ss.unit_outward_normal;
        const FieldSample u = plane_wave(kappa, ss.position);
        const Complex du_dn = u.gradient[0] * nu.x + u.gradient[1] * nu.y;

        // Cache per unique (ell, count, radial_factor) location.
        std::map<std::tuple<int, int, double>, std::tuple<double, double, std::vector<Complex>>>
            cache;
        for (int si = 0; si < S; ++si) {
            const SourceSpec& sp = *sources[si].source;
            const int am = std::abs(sp.mode);
            auto key = std::make_tuple(sp.ell, sp.count, sp.radial_factor);
            auto it = cache.find(key);
            if (it == cache.end()) {
                const Vec2 src = info_source_position(shape, sp, z);
                const Vec2 d = ss.position - src;
                const double R = norm(d);
                if (R == 0.0) throw SingularityError("surface node hits a source point");
                const double phi = std::atan2(d.y, d.x);
                const auto [kk, jmax0] = *loc_max.find({sp.ell, sp.count});
                (void)kk;
                std::vector<Complex> h(jmax0 + 2);
                hankel1_array(jmax0 + 1, kappa * R, h.data());
                it = cache.emplace(key, std::make_tuple(R, phi, std::move(h))).first;
            }
            const auto& [R, phi, h] = it->second;
            const double refl = (sp.mode < 0 && (am & 1)) ? -1.0 : 1.0;
            const Complex ang = std::polar(refl, sp.mode * phi);
            const Complex hm = h[am] * ang;
            const Complex hlo = (am == 0) ? -h[1] : h[am - 1];  // H_{m-1} for m = |mode|
            const Complex dh = 0.5 * (hlo - h[am + 1]);
            // gradient in the source-centered frame
            const double cphi = std::cos(phi), sphi = std::sin(phi);
            const Complex radial = kappa * dh * ang;
            const Complex angular = Complex(0.0, sp.mode / R) * hm;
            const Complex gx = radial * cphi - angular * sphi;
            const Complex gy = radial * sphi + angular * cphi;
            const Complex dpsi_dn = gx * nu.x + gy * nu.y;
            acc(si) -= (u.value * dpsi_dn - hm * du_dn) * p.weight * modulation(shape, sp, z);
        }
    }
    return acc;
}

}  // namespace

Complex nullfield_rhs(const StarShape& shape, double z, const Functional& source, double kappa,
                      int surface_nodes) {
    return outcomes_at_z(shape, z, {source}, kappa, surface_nodes)(0);
}

Eigen::VectorXcd realization_outcomes(const StarShape& shape,
                                      const std::vector<Functional>& sources, double kappa,
                                      double z, int surface_nodes) {
    return outcomes_at_z(shape, z, sources, kappa, surface_nodes);
}

Eigen::VectorXcd expansion_outcomes(const StarShape& shape,
                                    const std::vector<Functional>& sources, double kappa,
                                    double z) {
    const int S = static_cast<int>(sources.size());
    Eigen::VectorXcd out(S);
    for (int si = 0; si < S; ++si) {
        if (!sources[si].source)
            throw ParameterError("expansion_outcomes requires InfoSource functionals");
        const SourceSpec& sp = *sources[si].source;
        if (!(sp.radial_factor > 0.0 && sp.radial_factor < 1.0))
            throw PlacementError("source point lies outside the closed obstacle");
        const Vec2 x = info_source_position(shape, sp, z);
        // Jacobi-Anger about x: e^{i kappa x.x} sum_m i^m J_m(kappa rho) e^{im phi};
        // the contour integral returns -4i times the m-th coefficient.
        static const Complex ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        out(si) = Complex(0.0, -4.0) * ipow[((sp.mode % 4) + 4) % 4] *
                  std::polar(1.0, kappa * x.x) * modulation(shape, sp, z);
    }
    return out;
}

Eigen::VectorXcd information_outcomes(const StarShape& shape,
                                      const std::vector<Functional>& sources, double kappa,
                                      int z_nodes) {
    Eigen::VectorXcd a = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(sources.size()));
    if (shape.z_periodic()) {
        const double lo = shape.z_lo(), span = shape.z_hi() - lo;
        for (int k = 0; k < z_nodes; ++k) {
            const double z = lo + span * k / z_nodes;
            a += (span / z_nodes) * shape.density(z) * expansion_outcomes(shape, sources, kappa, z);
        }
    } else {
        std::vector<double> w;
        const std::vector<double> x = gl_nodes(z_nodes, &w);
        const double lo = shape.z_lo(), half = 0.5 * (shape.z_hi() - lo);
        for (int k = 0; k < z_nodes; ++k) {
            const double z = lo + half * (x[k] + 1.0);
            a += w[k] * half * shape.density(z) * expansion_outcomes(shape, sources, kappa, z);
        }
    }
    return a;
}

}  // namespace starscat
