#include "starscat/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "starscat/csv.hpp"
#include "starscat/specfun.hpp"

namespace starscat {

namespace {

bool is_circle(const ExperimentConfig& cfg) {
    return cfg.shape.kind == "ellipse" && cfg.shape.a == cfg.shape.b;
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.output.dir);
    return (std::filesystem::path(cfg.output.dir) / name).string();
}

void stamp(CsvWriter& w, const ExperimentConfig& cfg, const std::string& command) {
    w.comment("command: " + command);
    w.comment("config_hash: " + config_hash(cfg));
}

void write_points(CsvWriter& w, const std::vector<QuadPoint>& pts) {
    w.header({"subdomain_id", "r", "theta", "weight", "branch_index", "z", "branch_fraction"});
    for (const QuadPoint& p : pts)
        w.row({std::to_string(p.subdomain_id), format_double(p.r), format_double(p.theta),
               format_double(p.weight), std::to_string(p.branch_index), format_double(p.z),
               format_double(1.0)});
}

void write_kernel(const ExperimentConfig& cfg, const std::string& name,
                  const ReconstructionKernel& k) {
    CsvWriter w(out_path(cfg, name));
    stamp(w, cfg, "reconstruct");
    w.header({"target_m", "target_n", "residual", "satisfied", "max_abs_coefficient"});
    for (size_t t = 0; t < k.target_labels.size(); ++t) {
        const double cmax = k.coefficients.row(static_cast<int>(t)).cwiseAbs().maxCoeff();
        w.row({std::to_string(k.target_labels[t].first),
               std::to_string(k.target_labels[t].second),
               format_double(k.residual_norms(static_cast<int>(t))),
               k.satisfied[t] ? "1" : "0", format_double(cmax)});
    }
}

void enforce_allowance(const ExperimentConfig& cfg, int n_unsatisfied) {
    const int cap = cfg.thresholds.max_unsatisfied;
    if (cap >= 0 && n_unsatisfied > cap)
        throw NumericalFailure(std::to_string(n_unsatisfied) +
                               " unsatisfied targets exceed allowance " + std::to_string(cap));
}

}  // namespace

ShapePtr shape_from(const ExperimentConfig& cfg) {
    validate_config(cfg);
    if (cfg.shape.kind == "octagon") return random_octagon(cfg.shape.a, cfg.shape.b);
    return ellipse_shape(cfg.shape.a, cfg.shape.b);
}

RulePtr ensemble_rule_from(const ExperimentConfig& cfg, const ShapePtr& shape,
                           std::string* grid_id) {
    if (cfg.shape.kind == "octagon") {
        CoareaGrid g = polygon_grid(shape, cfg.grid.radial, cfg.grid.angular);
        if (grid_id) *grid_id = g.id;
        return make_rule(g);
    }
    if (is_circle(cfg)) {
        NaiveGrid g = naive_grid(shape, cfg.grid.naive_z, cfg.grid.naive_theta);
        if (grid_id) *grid_id = g.id;
        return make_rule(g);
    }
    CoareaGrid g = ellipse_grid(cfg.shape.a, cfg.shape.b, cfg.grid.radial, cfg.grid.angular);
    if (grid_id) *grid_id = g.id;
    return make_rule(g);
}

RulePtr kernel_rule_from(const ExperimentConfig& cfg, const ShapePtr& shape,
                         std::string* grid_id) {
    if (cfg.grid.kernel == "tensor") {
        NaiveGrid g = naive_grid(shape, cfg.grid.naive_z, cfg.grid.naive_theta);
        if (grid_id) *grid_id = g.id;
        return make_rule(g);
    }
    return ensemble_rule_from(cfg, shape, grid_id);
}

void run_grid(const ExperimentConfig& cfg) {
    const ShapePtr shape = shape_from(cfg);
    const NaiveGrid naive = naive_grid(shape, cfg.grid.naive_z, cfg.grid.naive_theta);
    {
        CsvWriter w(out_path(cfg, "naive.csv"));
        stamp(w, cfg, "grid");
        w.comment("grid: " + naive.id);
        write_points(w, naive.points());
    }
    if (is_circle(cfg)) return;  // coarea views require a genuinely random surface

    const CoareaGrid grid =
        cfg.shape.kind == "octagon"
            ? polygon_grid(shape, cfg.grid.radial, cfg.grid.angular)
            : ellipse_grid(cfg.shape.a, cfg.shape.b, cfg.grid.radial, cfg.grid.angular);
    {
        CsvWriter w(out_path(cfg, "coarea_spatial.csv"));
        stamp(w, cfg, "grid");
        w.comment("grid: " + grid.id);
        w.header({"subdomain_id", "r", "theta", "weight"});
        for (const GridNode& n : grid.nodes)
            w.row({std::to_string(n.subdomain_id), format_double(n.r), format_double(n.theta),
                   format_double(n.spatial_weight * n.node_factor)});
    }
    {
        CsvWriter w(out_path(cfg, "coarea_parametric.csv"));
        stamp(w, cfg, "grid");
        w.comment("grid: " + grid.id);
        w.header(
            {"subdomain_id", "r", "theta", "weight", "branch_index", "z", "branch_fraction"});
        for (const GridNode& n : grid.nodes)
            for (size_t b = 0; b < n.branches.size(); ++b)
                w.row({std::to_string(n.subdomain_id), format_double(n.r),
                       format_double(n.theta),
                       format_double(n.spatial_weight * n.node_factor * n.branches[b].fraction),
                       std::to_string(static_cast<int>(b)),
                       format_double(n.branches[b].fiber.z),
                       format_double(n.branches[b].fraction)});
    }
}

void run_reconstruct(const ExperimentConfig& cfg) {
    const ShapePtr shape = shape_from(cfg);
    std::string grid_id;
    const RulePtr rule = kernel_rule_from(cfg, shape, &grid_id);
    const GpcBasis basis = basis_for(*shape);

    CsvWriter w(out_path(cfg, "reconstruct.csv"));
    stamp(w, cfg, "reconstruct");
    w.comment("shape: " + shape->id());
    w.comment("grid: " + grid_id);
    w.header({"kappa", "L", "frobenius_err", "max_row_err", "n_unsatisfied"});

    int worst_unsatisfied = 0;
    for (size_t ik = 0; ik < cfg.wave.kappa.size(); ++ik) {
        const double kappa = cfg.wave.kappa[ik];
        const int mu = truncation_order(kappa, shape->r_max());
        const auto targets = build_targets(rule, basis, kappa, mu, cfg.gpc.order);
        for (int L : cfg.sources.count) {
            const SourceSet sources = build_sources(rule, shape, L, cfg.sources.modes, kappa,
                                                    cfg.sources.radial_factor,
                                                    cfg.sources.degree);
            ReconstructionKernel kernel = solve_kernel(
                targets, sources.gridfunctions, cfg.thresholds.eps_ev, cfg.thresholds.eps_ed);
            kernel.target_labels = target_labels(mu, cfg.gpc.order);

            double num = 0.0, den = 0.0, max_row = 0.0;
            int n_unsat = 0;
            for (int t = 0; t < kernel.residual_norms.size(); ++t) {
                const double r = kernel.residual_norms(t), g = kernel.target_norms(t);
                num += r * r;
                den += g * g;
                if (g > 0.0) max_row = std::max(max_row, r / g);
                if (!kernel.satisfied[t]) ++n_unsat;
            }
            const double frob = den > 0.0 ? std::sqrt(num / den) : 0.0;
            worst_unsatisfied = std::max(worst_unsatisfied, n_unsat);
            w.row({format_double(kappa), std::to_string(L), format_double(frob),
                   format_double(max_row), std::to_string(n_unsat)});
            write_kernel(cfg, "kernel_k" + std::to_string(ik) + "_L" + std::to_string(L) + ".csv",
                         kernel);
        }
    }
    enforce_allowance(cfg, worst_unsatisfied);
}

GpcTable gpc_table_for(const ExperimentConfig& cfg, const ShapePtr& shape, double kappa) {
    std::string grid_id;
    const RulePtr rule = kernel_rule_from(cfg, shape, &grid_id);
    const GpcBasis basis = basis_for(*shape);
    const int mu = truncation_order(kappa, shape->r_max());
    const int N = cfg.gpc.order;
    const auto targets = build_targets(rule, basis, kappa, mu, N);
    const SourceSet sources =
        build_sources(rule, shape, cfg.sources.count.front(), cfg.sources.modes, kappa,
                      cfg.sources.radial_factor, cfg.sources.degree);
    const ReconstructionKernel kernel =
        solve_kernel(targets, sources.gridfunctions, cfg.thresholds.eps_ev, cfg.thresholds.eps_ed);
    const Eigen::VectorXcd a =
        information_outcomes(*shape, sources.functionals, kappa, cfg.quadrature.z_nodes);
    GpcTable table = estimate(kernel, a, mu, N);
    table.meta.kappa = kappa;
    table.meta.shape_id = shape->id();
    table.meta.grid_id = grid_id;
    return table;
}

void run_gpc(const ExperimentConfig& cfg) {
    const ShapePtr shape = shape_from(cfg);
    int worst_unsatisfied = 0;
    for (size_t ik = 0; ik < cfg.wave.kappa.size(); ++ik) {
        const GpcTable table = gpc_table_for(cfg, shape, cfg.wave.kappa[ik]);
        worst_unsatisfied =
            std::max(worst_unsatisfied, static_cast<int>(table.meta.unsatisfied.size()));

        CsvWriter w(out_path(cfg, "gpc_k" + std::to_string(ik) + ".csv"));
        stamp(w, cfg, "gpc");
        w.comment("shape: " + table.meta.shape_id);
        w.comment("grid: " + table.meta.grid_id);
        w.comment("kappa: " + format_double(table.meta.kappa));
        w.comment("eps_ev: " + format_double(table.meta.eps_ev) +
                  ", eps_ed: " + format_double(table.meta.eps_ed));
        w.header({"m", "n", "re", "im", "satisfied"});
        const auto& unsat = table.meta.unsatisfied;
        for (int m = -table.mu; m <= table.mu; ++m)
            for (int n = 0; n <= table.order; ++n) {
                const bool bad =
                    std::find(unsat.begin(), unsat.end(), std::make_pair(m, n)) != unsat.end();
                const Complex v = table.at(m, n);
                w.row({std::to_string(m), std::to_string(n), format_double(v.real()),
                       format_double(v.imag()), bad ? "0" : "1"});
            }
    }
    enforce_allowance(cfg, worst_unsatisfied);
}

void run_validate(const ExperimentConfig& cfg) {
    const ShapePtr shape = shape_from(cfg);
    const double kappa = cfg.wave.kappa.front();
    const GpcTable table = gpc_table_for(cfg, shape, kappa);

    OracleSettings settings;
    settings.boundary_nodes = cfg.oracle.nodes;
    settings.grading = cfg.oracle.grading;
    const McEstimate mc = monte_carlo(shape, kappa, cfg.oracle.samples, cfg.oracle.seed,
                                      settings, cfg.threads);
    const CompareReport rep = compare(mc, table, cfg.oracle.tolerance);

    CsvWriter w(out_path(cfg, "validate.csv"));
    stamp(w, cfg, "validate");
    w.comment("shape: " + shape->id());
    w.comment("kappa: " + format_double(kappa));
    w.comment("rng: " + mc.rng_id + ", seed " + std::to_string(cfg.oracle.seed));
    w.comment("samples: " + std::to_string(mc.n_samples) + " (" +
              std::to_string(mc.n_failures) + " failed)");
    w.header({"m", "re_exact", "im_exact", "re_approx", "im_approx", "abs_err", "half_width"});
    for (const CompareRow& r : rep.rows)
        w.row({std::to_string(r.m), format_double(r.exact.real()),
               format_double(r.exact.imag()), format_double(r.approx.real()),
               format_double(r.approx.imag()), format_double(r.abs_err),
               format_double(r.half_width)});
    enforce_allowance(cfg, static_cast<int>(table.meta.unsatisfied.size()));
}

}  // namespace starscat
