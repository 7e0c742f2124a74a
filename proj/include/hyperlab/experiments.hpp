#pragma once

#include "hyperlab/report.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace hyperlab {

/// Every knob the experiment runners understand. Each runner reads the subset it needs and
/// echoes exactly that subset into its report.
struct Settings {
    int dim = 4;                 ///< spatial dimension for block-embedded representations
    double t = 0.5;
    double lambda = 2.0;
    int genus = 2;
    int ball_radius = 6;
    double radius = 2.0;         ///< R of the discreteness count
    std::uint64_t seed = 1;
    Tolerances tol{};

    std::string tree = "path:3";
    std::string edges_file;      ///< embed-tree: optional edge list replacing `tree`
    bool midpoints = false;
    double c_budget = 3.0;       ///< additive budget of the QI fit

    std::string mode = "galerkin";
    int core_radius = 3;
    int samples = 24;
    int max_dim = -1;

    std::string split = "amalgam";
    std::string z = "random";    ///< random | identity
    std::vector<double> angles;  ///< explicit bend angles, one per angle class
    double bend_scale = 1.0;
    int words = 100;

    int trials = 20;
    std::vector<double> magnitudes{0.0, 1e-3, 1.0};

    int count = 100;             ///< centralizer-dim: random matrices
    int max_size = 12;
};

/// Builds the report of one subcommand. Throws Error on bad settings or numerical failure.
Report run_embed_tree(const Settings& s);
Report run_fuchsian(const Settings& s);
Report run_rho_t(const Settings& s);
Report run_bend(const Settings& s);
Report run_centralizer_dim(const Settings& s);
Report run_discreteness(const Settings& s);
Report run_stability(const Settings& s);

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    Json data;           ///< deterministic measurements
    double seconds = 0;  ///< wall time, kept out of artifacts
};

/// Runs acceptance criteria 1-10. on_result is called as each criterion finishes.
std::vector<CriterionResult> run_acceptance(std::uint64_t seed,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

/// The verify report: every criterion's data and verdict (no timings).
Report verify_report(const Settings& s, const std::vector<CriterionResult>& results);

/// One-line summary "criterion N: PASS|FAIL name (detail) [x.xs]".
std::string summary_line(const CriterionResult& r);

}  // namespace hyperlab
