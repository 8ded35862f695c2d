#include "fracbern/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fracbern/inequality.hpp"
#include "fracbern/kernel.hpp"
#include "fracbern/parallel.hpp"
#include "fracbern/periodic.hpp"
#include "fracbern/positivity.hpp"

namespace fracbern {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

constexpr SweepTask kAllTasks[] = {
    SweepTask::kernel_bounds, SweepTask::eps_star,       SweepTask::banded_l1, SweepTask::periodic_c3,
    SweepTask::decay,         SweepTask::bernstein,      SweepTask::poincare,  SweepTask::maximal,
    SweepTask::counterexample, SweepTask::derivative_check,
};

bool uses_q(SweepTask t) {
    return t == SweepTask::decay || t == SweepTask::bernstein || t == SweepTask::poincare ||
           t == SweepTask::derivative_check;
}

bool uses_N(SweepTask t) {
    return t == SweepTask::decay || t == SweepTask::bernstein || t == SweepTask::derivative_check;
}

bool uses_ensemble(SweepTask t) {
    return t == SweepTask::decay || t == SweepTask::bernstein || t == SweepTask::poincare ||
           t == SweepTask::maximal || t == SweepTask::derivative_check;
}

std::string fmt(double v) { return format_double(v); }

[[noreturn]] void reject(const SweepConfig& c, const std::string& what) {
    throw std::invalid_argument(to_string(c.task) + ": " + what);
}

// Accepts numbers and the strings "inf" / "infinity".
double number_from_json(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "infinity")
            return std::numeric_limits<double>::infinity();
        throw std::invalid_argument("expected a number, got '" + s + "'");
    }
    return j.get<double>();
}

std::vector<double> number_list(const json& j, const char* key) {
    std::vector<double> out;
    if (!j.contains(key))
        return out;
    for (const auto& v : j.at(key))
        out.push_back(number_from_json(v));
    return out;
}

std::vector<double> t_from_json(const json& spec) {
    if (spec.is_array()) {
        std::vector<double> out;
        for (const auto& v : spec)
            out.push_back(number_from_json(v));
        if (out.empty())
            throw std::invalid_argument("t_spec list is empty");
        return out;
    }
    if (spec.value("kind", std::string()) != "dyadic")
        throw std::invalid_argument("t_spec must be a list or {\"kind\": \"dyadic\", \"k_min\", \"k_max\"}");
    const int k_min = spec.at("k_min").get<int>(), k_max = spec.at("k_max").get<int>();
    if (k_max < k_min)
        throw std::invalid_argument("t_spec needs k_min <= k_max");
    return dyadic_times(k_min, k_max);
}

std::vector<double> times_or(const SweepConfig& c, std::vector<double> fallback) {
    return c.t_list.empty() ? fallback : c.t_list;
}

EnsembleSpec ensemble_for(const SweepConfig& c, const SweepCell& cell) {
    EnsembleSpec e = c.ensemble;
    e.dim = cell.dim;
    if (uses_N(c.task))
        e.annulus = {cell.N / 2.0, 2.0 * cell.N};
    return e;
}

std::vector<double> maximal_times(const SweepConfig& c) {
    std::vector<double> t{0.0};
    for (double s : times_or(c, default_decay_times()))
        t.push_back(s);
    return t;
}

ReportRow blank_row(const SweepConfig& c, const SweepCell& cell) {
    ReportRow r;
    r.task = to_string(c.task);
    r.alpha = cell.alpha;
    r.dim = cell.dim;
    r.q = cell.q;
    r.N = cell.N;
    r.t = cell.t;
    r.error_bound = kNaN;
    r.seed = uses_ensemble(c.task) ? c.ensemble.seed : 0;
    return r;
}

ReportRow from_estimate(ReportRow r, const ConstantEstimate& e) {
    r.quantity = to_string(e.quantity);
    r.value = e.value;
    r.witness = e.witness();
    return r;
}

} // namespace

std::string to_string(SweepTask task) {
    switch (task) {
    case SweepTask::kernel_bounds: return "kernel_bounds";
    case SweepTask::eps_star: return "eps_star";
    case SweepTask::banded_l1: return "banded_l1";
    case SweepTask::periodic_c3: return "periodic_c3";
    case SweepTask::decay: return "decay";
    case SweepTask::bernstein: return "bernstein";
    case SweepTask::poincare: return "poincare";
    case SweepTask::maximal: return "maximal";
    case SweepTask::counterexample: return "counterexample";
    case SweepTask::derivative_check: return "derivative_check";
    }
    return "unknown";
}

SweepTask sweep_task_from_string(const std::string& name) {
    for (SweepTask t : kAllTasks)
        if (to_string(t) == name)
            return t;
    throw std::invalid_argument("unknown sweep task '" + name + "'");
}

void SweepConfig::validate() const {
    if (alpha_list.empty())
        reject(*this, "alpha_list is empty");
    if (dim_list.empty())
        reject(*this, "dim_list is empty");
    if (uses_q(task) && q_list.empty())
        reject(*this, "q_list is empty");
    if (uses_N(task) && N_list.empty())
        reject(*this, "N_list is empty");

    const bool power_law =
        task == SweepTask::kernel_bounds || task == SweepTask::eps_star || task == SweepTask::periodic_c3;
    for (double a : alpha_list) {
        if (!(a > 0.0 && a <= 2.0))
            reject(*this, "alpha " + fmt(a) + " outside (0, 2]");
        if (power_law && a >= 2.0)
            reject(*this, "needs alpha < 2");
        if (task == SweepTask::counterexample && a != 2.0)
            reject(*this, "the sup-norm counterexample is for alpha = 2");
    }
    for (int d : dim_list) {
        if (d < 1 || d > 3)
            reject(*this, "dimension " + std::to_string(d) + " outside 1..3");
        if (task == SweepTask::counterexample && d != 1)
            reject(*this, "the sup-norm counterexample is one-dimensional");
        if (task == SweepTask::eps_star && d > 2)
            reject(*this, "eps search supports d <= 2");
    }
    for (double q : q_list) {
        if (task == SweepTask::decay ? !(q >= 1.0) : !(q > 1.0 && std::isfinite(q)))
            reject(*this, "q = " + fmt(q) + " outside the task's range");
    }
    for (double t : t_list) {
        const bool zero_ok = task == SweepTask::banded_l1 || task == SweepTask::maximal;
        if (!(t > 0.0 || (zero_ok && t == 0.0)) || !std::isfinite(t))
            reject(*this, "invalid time " + fmt(t));
    }
    if (task == SweepTask::eps_star && !t_list.empty())
        for (double t : t_list)
            if (t > 1.0)
                reject(*this, "positivity certificates need t <= 1");
    if (uses_ensemble(task)) {
        if (ensemble.n == 0 || (ensemble.n & (ensemble.n - 1)) != 0)
            reject(*this, "ensemble grid size must be a power of two");
        if (ensemble.n_samples == 0)
            reject(*this, "ensemble needs at least one member");
        const double nyq = static_cast<double>(ensemble.n) / (2.0 * ensemble.box_len);
        if (uses_N(task)) {
            for (double N : N_list)
                if (!(N > 0.0) || !(2.0 * N < nyq))
                    reject(*this, "N = " + fmt(N) + " needs 0 < 2N < Nyquist " + fmt(nyq));
        } else {
            EnsembleSpec e = ensemble;
            e.validate();
        }
    }
    if (task == SweepTask::counterexample) {
        if (!(tolerances.delta0 > 0.0 && tolerances.delta0 < 0.25))
            reject(*this, "delta0 must lie in (0, 1/4)");
        if (tolerances.counterexample_n < 64)
            reject(*this, "counterexample grid too coarse");
    }
    if (!(tolerances.kernel > 0.0) || !(tolerances.banded_l1 > 0.0) || tolerances.eps_steps < 1)
        reject(*this, "tolerances must be positive");
    if (cells().empty())
        reject(*this, "empty parameter product");
}

std::vector<SweepCell> SweepConfig::cells() const {
    const std::vector<double> none{kNaN};
    const auto& qs = uses_q(task) ? q_list : none;
    const auto& Ns = uses_N(task) ? N_list : none;
    std::vector<double> ts = none;
    if (task == SweepTask::banded_l1)
        ts = times_or(*this, {0.0, 0.01});
    else if (task == SweepTask::counterexample)
        ts = times_or(*this, {0.04, 0.02, 0.01});
    std::vector<SweepCell> out;
    for (double a : alpha_list)
        for (int d : dim_list)
            for (double q : qs)
                for (double N : Ns)
                    for (double t : ts)
                        out.push_back({a, d, q, N, t});
    return out;
}

SweepConfig SweepConfig::from_json(const json& j) {
    SweepConfig c;
    c.task = sweep_task_from_string(j.at("task").get<std::string>());
    c.alpha_list = number_list(j, "alpha_list");
    if (j.contains("dim_list"))
        c.dim_list = j.at("dim_list").get<std::vector<int>>();
    c.q_list = number_list(j, "q_list");
    c.N_list = number_list(j, "N_list");
    if (j.contains("t_spec"))
        c.t_list = t_from_json(j.at("t_spec"));
    if (j.contains("ensemble")) {
        const json& e = j.at("ensemble");
        c.ensemble.annulus.A1 = e.value("A1", c.ensemble.annulus.A1);
        c.ensemble.annulus.A2 = e.value("A2", c.ensemble.annulus.A2);
        c.ensemble.n_samples = e.value("n_samples", c.ensemble.n_samples);
        c.ensemble.seed = e.value("seed", c.ensemble.seed);
        c.ensemble.box_len = e.value("box_len", c.ensemble.box_len);
        c.ensemble.n = e.value("n", c.ensemble.n);
        c.refine = e.value("refine", c.refine);
    }
    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        c.tolerances.kernel = t.value("kernel", c.tolerances.kernel);
        c.tolerances.banded_l1 = t.value("banded_l1", c.tolerances.banded_l1);
        c.tolerances.delta0 = t.value("delta0", c.tolerances.delta0);
        c.tolerances.counterexample_n = t.value("counterexample_n", c.tolerances.counterexample_n);
        c.tolerances.eps_steps = t.value("eps_steps", c.tolerances.eps_steps);
    }
    c.output_path = j.value("output_path", std::string());
    c.format = report_format_from_string(j.value("format", std::string("csv")));
    return c;
}

std::vector<SweepConfig> parse_sweep_document(const json& doc) {
    std::vector<SweepConfig> out;
    try {
        if (!doc.contains("sweeps")) {
            out.push_back(SweepConfig::from_json(doc));
        } else {
            for (json entry : doc.at("sweeps")) {
                for (const char* key : {"output_path", "format"})
                    if (doc.contains(key) && !entry.contains(key))
                        entry[key] = doc.at(key);
                out.push_back(SweepConfig::from_json(entry));
            }
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed sweep config: ") + e.what());
    }
    if (out.empty())
        throw std::invalid_argument("sweep config lists no sweeps");
    for (const auto& c : out)
        c.validate();
    return out;
}

std::vector<SweepConfig> load_sweep_document(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open sweep config '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw std::invalid_argument("'" + path + "' is not valid JSON: " + e.what());
    }
    return parse_sweep_document(doc);
}

ReportRow run_cell(const SweepConfig& c, const SweepCell& cell) {
    ReportRow row = blank_row(c, cell);
    EstimatorOptions opts;
    opts.refine = c.refine;

    switch (c.task) {
    case SweepTask::kernel_bounds: {
        ProbeGrid grid = ProbeGrid::log_spaced(0.01, 1.0, 3, 1e3, 61);
        if (!c.t_list.empty())
            grid.t = c.t_list;
        const FractionalParams p(cell.alpha, cell.dim);
        const BoundReport rep = check_two_sided_bound(std::span(&p, 1), grid);
        row.quantity = "C1_hat";
        row.value = rep.C1_hat;
        row.witness = "ratio_min=" + fmt(rep.ratio_min) + ";ratio_max=" + fmt(rep.ratio_max) +
                      ";t=" + fmt(rep.worst_t) + ";r=" + fmt(rep.worst_r);
        return row;
    }
    case SweepTask::eps_star: {
        PositivityGrids grids;
        if (!c.t_list.empty())
            grids.t = c.t_list;
        const double eps_hi = 1.0;
        const EpsSearchResult res =
            find_eps_star(FractionalParams(cell.alpha, cell.dim), grids, eps_hi, c.tolerances.eps_steps);
        row.quantity = "eps_star";
        row.value = res.eps_star;
        row.error_bound = std::ldexp(eps_hi, -c.tolerances.eps_steps);
        row.witness = "min_margin=" + fmt(res.cert.min_margin) + ";C1=" + fmt(res.cert.C1) +
                      ";envelope=" + fmt(res.cert.envelope_const) + ";t=" + fmt(res.cert.worst_t) +
                      ";r=" + fmt(res.cert.worst_r);
        return row;
    }
    case SweepTask::banded_l1: {
        const BandedL1 b = banded_kernel_l1(FractionalParams(cell.alpha, cell.dim), cell.t, c.tolerances.banded_l1);
        row.quantity = "banded_l1";
        row.value = b.value;
        row.error_bound = b.abs_err;
        row.witness = "lower_bound=" + fmt(b.lower_bound) + ";cutoff=" + fmt(b.cutoff);
        return row;
    }
    case SweepTask::periodic_c3: {
        const auto times = times_or(c, dyadic_times(0, 10));
        const auto axis = default_c3_axis();
        const LowerBoundReport rep = estimate_c3(FractionalParams(cell.alpha, cell.dim), times, axis);
        row.quantity = "c3_hat";
        row.value = rep.c3_hat;
        std::string x;
        for (double v : rep.argmin_x)
            x += (x.empty() ? "" : " ") + fmt(v);
        row.witness = "t=" + fmt(rep.argmin_t) + ";x=" + x;
        return row;
    }
    case SweepTask::decay: {
        const auto times = times_or(c, default_decay_times());
        return from_estimate(row, estimate_decay_constant(FractionalParams(cell.alpha, cell.dim), cell.q, cell.N,
                                                          ensemble_for(c, cell), times, opts));
    }
    case SweepTask::bernstein:
        return from_estimate(row, estimate_bernstein_constant(FractionalParams(cell.alpha, cell.dim), cell.q, cell.N,
                                                              ensemble_for(c, cell), opts));
    case SweepTask::poincare:
        return from_estimate(
            row, estimate_poincare_constant(FractionalParams(cell.alpha, cell.dim), cell.q, ensemble_for(c, cell), opts));
    case SweepTask::maximal: {
        const auto times = maximal_times(c);
        return from_estimate(row, maximal_domination_constant(FractionalParams(cell.alpha, cell.dim),
                                                              ensemble_for(c, cell), times, opts));
    }
    case SweepTask::counterexample: {
        const double t[] = {cell.t};
        const CounterexampleReport rep =
            heat_sup_counterexample(c.tolerances.delta0, t, c.tolerances.counterexample_n);
        row.quantity = "sup_ratio";
        row.value = rep.rows.at(0).ratio;
        row.witness = "delta0=" + fmt(c.tolerances.delta0) + ";n=" + std::to_string(c.tolerances.counterexample_n);
        return row;
    }
    case SweepTask::derivative_check: {
        const FractionalParams p(cell.alpha, cell.dim);
        const EnsembleSpec e = ensemble_for(c, cell);
        const auto h = default_h_sequence(cell.N, cell.alpha);
        double worst = 0.0;
        std::size_t witness = 0;
        for (std::size_t i = 0; i < e.n_samples; ++i) {
            const DerivativeCheck d = check_derivative_identity(sample_band_limited(e, i), cell.N, p, cell.q, h);
            const double rel = d.residual / (cell.q * std::abs(d.pairing));
            if (!(rel <= worst)) {
                worst = rel;
                witness = i;
            }
        }
        row.quantity = "relative_residual";
        row.value = worst;
        row.witness = "member=" + std::to_string(witness);
        return row;
    }
    }
    throw std::logic_error("unhandled sweep task");
}

SweepOutcome run_sweep(const SweepConfig& config, std::size_t workers) {
    config.validate();
    const auto cells = config.cells();
    std::vector<ReportRow> rows(cells.size());
    std::vector<char> failed(cells.size(), 0);
    parallel_for(cells.size(), workers, [&](std::size_t i) {
        try {
            rows[i] = run_cell(config, cells[i]);
        } catch (const std::exception& e) {
            ReportRow r = blank_row(config, cells[i]);
            r.quantity = "error";
            r.value = kNaN;
            r.witness = e.what();
            std::replace(r.witness.begin(), r.witness.end(), '\n', ' ');
            rows[i] = std::move(r);
            failed[i] = 1;
        }
    });

    SweepOutcome out;
    out.table.provenance.bump_profile = bump_provenance_id();
    out.table.provenance.grid_n = config.ensemble.n;
    out.table.provenance.box_len = config.ensemble.box_len;
    out.table.rows = std::move(rows);
    out.cells = cells.size();
    out.failed_cells = static_cast<std::size_t>(std::count(failed.begin(), failed.end(), 1));
    return out;
}

SweepOutcome run_sweeps(const std::vector<SweepConfig>& configs, std::size_t workers) {
    if (configs.empty())
        throw std::invalid_argument("no sweeps to run");
    SweepOutcome all;
    for (std::size_t k = 0; k < configs.size(); ++k) {
        SweepOutcome one = run_sweep(configs[k], workers);
        if (k == 0)
            all.table.provenance = one.table.provenance;
        all.table.rows.insert(all.table.rows.end(), one.table.rows.begin(), one.table.rows.end());
        all.cells += one.cells;
        all.failed_cells += one.failed_cells;
    }
    return all;
}

} // namespace fracbern
