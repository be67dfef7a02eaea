#pragma once

#include "starscat/config.hpp"
#include "starscat/oracle.hpp"

namespace starscat {

ShapePtr shape_from(const ExperimentConfig& cfg);

// Ensemble cubature matched to the shape: coarea grid for the ellipse and
// octagon, naive tensor grid for the degenerate circle.
RulePtr ensemble_rule_from(const ExperimentConfig& cfg, const ShapePtr& shape,
                           std::string* grid_id = nullptr);

// Rule the reconstruction kernel is assembled on: the ensemble rule, or the
// z-by-theta tensor rule when grid.kernel = tensor.
RulePtr kernel_rule_from(const ExperimentConfig& cfg, const ShapePtr& shape,
                         std::string* grid_id = nullptr);

// Subcommand bodies; each writes CSVs under cfg.output.dir and throws
// ConfigError / NumericalFailure on the corresponding exit conditions.
void run_grid(const ExperimentConfig& cfg);
void run_reconstruct(const ExperimentConfig& cfg);
void run_gpc(const ExperimentConfig& cfg);
void run_validate(const ExperimentConfig& cfg);

// gPC table for one kappa (shared by run_gpc and run_validate).
GpcTable gpc_table_for(const ExperimentConfig& cfg, const ShapePtr& shape, double kappa);

}  // namespace starscat
