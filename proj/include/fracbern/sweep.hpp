#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracbern/ensemble.hpp"
#include "fracbern/report.hpp"

namespace fracbern {

enum class SweepTask {
    kernel_bounds,
    eps_star,
    banded_l1,
    periodic_c3,
    decay,
    bernstein,
    poincare,
    maximal,
    counterexample,
    derivative_check,
};

std::string to_string(SweepTask task);
SweepTask sweep_task_from_string(const std::string& name);

struct SweepTolerances {
    /// Absolute error target of kernel and banded-kernel quadratures.
    double kernel = 1e-8;
    double banded_l1 = 1e-5;
    /// Plateau half-width and grid size of the sup-norm counterexample.
    double delta0 = 0.1;
    std::size_t counterexample_n = 4096;
    /// Bisection depth of the eps threshold search.
    int eps_steps = 20;
};

/// One parameter cell of a sweep. Unused coordinates are NaN.
struct SweepCell {
    double alpha = 0.0;
    int dim = 1;
    double q = 0.0;
    double N = 0.0;
    double t = 0.0;
};

/// Parameter lists a task iterates over; the cells are their Cartesian product.
struct SweepConfig {
    SweepTask task = SweepTask::decay;
    std::vector<double> alpha_list;
    std::vector<int> dim_list;
    std::vector<double> q_list;
    std::vector<double> N_list;
    /// Empty means the task's default time grid.
    std::vector<double> t_list;
    /// Annulus, size, seed and grid of the random ensembles. Tasks indexed by
    /// N replace the annulus with [N/2, 2N]; `dim` follows the cell.
    EnsembleSpec ensemble;
    bool refine = true;
    SweepTolerances tolerances;
    std::string output_path;
    ReportFormat format = ReportFormat::csv;

    /// Throws std::invalid_argument when a list the task needs is empty or a
    /// value breaks the task's contract.
    void validate() const;
    std::vector<SweepCell> cells() const;

    static SweepConfig from_json(const nlohmann::json& j);
};

/// A config document is one sweep object, or {"sweeps": [...]} whose entries
/// inherit top-level "output_path" and "format".
std::vector<SweepConfig> parse_sweep_document(const nlohmann::json& doc);
std::vector<SweepConfig> load_sweep_document(const std::string& path);

struct SweepOutcome {
    ReportTable table;
    std::size_t cells = 0;
    std::size_t failed_cells = 0;
};

/// Runs every cell on up to `workers` threads and assembles rows in cell
/// order. A failing cell becomes an "error" row carrying the message.
SweepOutcome run_sweep(const SweepConfig& config, std::size_t workers);
SweepOutcome run_sweeps(const std::vector<SweepConfig>& configs, std::size_t workers);

/// The single report row of one cell; throws on failure.
ReportRow run_cell(const SweepConfig& config, const SweepCell& cell);

} // namespace fracbern
