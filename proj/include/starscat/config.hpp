#pragma once

#include <string>
#include <vector>

#include "starscat/common.hpp"

namespace starscat {

// Experiment configuration; plain-text INI-style sections, round-trippable
// via emit_config / parse_config.
struct ExperimentConfig {
    struct Shape {
        std::string kind = "ellipse";  // ellipse | octagon (ellipse with a == b is a circle)
        double a = 5.0;
        double b = 1.0;
        bool operator==(const Shape&) const = default;
    } shape;

    struct Wave {
        std::vector<double> kappa{1.0};
        bool operator==(const Wave&) const = default;
    } wave;

    struct Grid {
        int radial = 15;    // M (ellipse) or M_q (octagon)
        int angular = 10;   // N_base (ellipse) or N_q (octagon)
        int naive_z = 64;   // naive/circle tensor grid
        int naive_theta = 256;
        // Rule the reconstruction kernel is built on: "ensemble" reuses the
        // coarea ensemble grid; "tensor" uses the z-by-theta tensor rule
        // (naive_z x naive_theta), which resolves the near-source boundary
        // layers of the information functionals.
        std::string kernel = "ensemble";
        bool operator==(const Grid&) const = default;
    } grid;

    struct Thresholds {
        double eps_ev = 1e-4;
        double eps_ed = 1e-8;
        int max_unsatisfied = -1;  // < 0: unlimited
        bool operator==(const Thresholds&) const = default;
    } thresholds;

    struct Sources {
        std::vector<int> count{50};  // L sweep
        int modes = 6;
        double radial_factor = 0.95;
        int degree = 0;  // max Legendre degree of the source strength modulation
        bool operator==(const Sources&) const = default;
    } sources;

    struct Gpc {
        int order = 0;
        bool operator==(const Gpc&) const = default;
    } gpc;

    struct Quadrature {
        int surface_nodes = 512;  // trapezoid total, smooth shapes
        int segment_nodes = 40;   // Gauss-Legendre per polygon segment
        int z_nodes = 64;
        bool operator==(const Quadrature&) const = default;
    } quadrature;

    struct Oracle {
        int samples = 2000;
        unsigned long long seed = 7;
        int nodes = 256;   // total Nystrom boundary nodes per realization
        int grading = 2;   // corner grading exponent (polygonal shapes)
        double tolerance = 1e-4;
        bool operator==(const Oracle&) const = default;
    } oracle;

    struct Output {
        std::string dir = "out";
        bool operator==(const Output&) const = default;
    } output;

    int threads = 1;

    bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);
std::string emit_config(const ExperimentConfig& cfg);

// "section.key=value" override, as accepted by the CLI --set flag.
void apply_override(ExperimentConfig& cfg, const std::string& assignment);

void validate_config(const ExperimentConfig& cfg);

// FNV-1a hash of the canonical emission (hex string).
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace starscat
