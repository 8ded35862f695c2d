// Command-line front end: sweeps, single kernel evaluations and report conversion.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracbern/ensemble.hpp"
#include "fracbern/kernel.hpp"
#include "fracbern/parallel.hpp"
#include "fracbern/periodic.hpp"
#include "fracbern/positivity.hpp"
#include "fracbern/report.hpp"
#include "fracbern/sweep.hpp"

namespace {

using namespace fracbern;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitPartial = 2;

int cmd_sweep(const std::string& config_path, const std::string& output_override, std::size_t workers) {
    const auto configs = load_sweep_document(config_path);
    const SweepOutcome out = run_sweeps(configs, workers);
    const std::string path = output_override.empty() ? configs.front().output_path : output_override;
    if (path.empty())
        write_csv(std::cout, out.table);
    else
        emit_report(out.table, output_override.empty() ? configs.front().format : report_format_from_path(path), path);
    std::fprintf(stderr, "%zu cells, %zu failed\n", out.cells, out.failed_cells);
    return out.failed_cells ? kExitPartial : kExitOk;
}

int cmd_kernel(double alpha, int dim, double t, double r, double tol) {
    const FractionalParams p(alpha, dim, t);
    const RadialKernelValue v = eval_radial_numeric(p, r, tol);
    nlohmann::json j;
    j["alpha"] = alpha;
    j["dim"] = dim;
    j["t"] = t;
    j["r"] = r;
    j["value"] = v.value;
    j["abs_err"] = v.abs_err;
    if (alpha == 1.0 || alpha == 2.0)
        j["closed_form"] = eval_closed_form(p, r);
    std::cout << j.dump(2) << '\n';
    return kExitOk;
}

int cmd_find_eps(double alpha, int dim, std::size_t workers) {
    const EpsSearchResult res = find_eps_star(FractionalParams(alpha, dim), PositivityGrids::standard(), 1.0, 20, workers);
    nlohmann::json j;
    j["alpha"] = alpha;
    j["dim"] = dim;
    j["eps_star"] = res.eps_star;
    j["bisection_steps"] = res.steps;
    j["certificate"] = res.cert.to_json();
    if (!res.diagnostics.empty())
        j["diagnostics"] = res.diagnostics;
    std::cout << j.dump(2) << '\n';
    return res.eps_star > 0.0 ? kExitOk : kExitPartial;
}

int cmd_c3(double alpha, int dim, int k_max, std::size_t workers) {
    const auto times = dyadic_times(0, k_max);
    const auto axis = default_c3_axis();
    const LowerBoundReport rep = estimate_c3(FractionalParams(alpha, dim), times, axis, workers);
    nlohmann::json j;
    j["alpha"] = alpha;
    j["dim"] = dim;
    j["c3_hat"] = rep.c3_hat;
    j["argmin_t"] = rep.argmin_t;
    j["argmin_x"] = rep.argmin_x;
    j["probes"] = rep.probes;
    std::cout << j.dump(2) << '\n';
    return rep.c3_hat > 0.0 ? kExitOk : kExitPartial;
}

int cmd_convert(const std::string& in, const std::string& out, const std::string& format) {
    const ReportTable table = load_report(in);
    emit_report(table, format.empty() ? report_format_from_path(out) : report_format_from_string(format), out);
    return kExitOk;
}

int cmd_sample(double A1, double A2, int dim, std::size_t n, double box_len, std::uint64_t seed, std::size_t index,
               const std::string& out) {
    EnsembleSpec e;
    e.annulus = {A1, A2};
    e.dim = dim;
    e.n = n;
    e.box_len = box_len;
    e.seed = seed;
    e.n_samples = index + 1;
    save_grid(out, sample_band_limited(e, index));
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional heat semigroup kernels, positivity certificates and Bernstein-type constants"};
    app.require_subcommand(1);
    std::size_t workers = fracbern::default_worker_count();
    app.add_option("--workers", workers, "Worker threads (default: $FRACBERN_WORKERS or hardware parallelism)")
        ->check(CLI::PositiveNumber);

    std::function<int()> action;

    auto* sweep = app.add_subcommand("sweep", "Parameter sweeps")->require_subcommand(1);
    auto* sweep_run = sweep->add_subcommand("run", "Run a JSON sweep config");
    std::string config_path, output_override;
    sweep_run->add_option("--config", config_path, "Sweep config (JSON)")->required();
    sweep_run->add_option("--output", output_override, "Override the config's output path");
    sweep_run->callback([&] { action = [&] { return cmd_sweep(config_path, output_override, workers); }; });

    auto* kernel = app.add_subcommand("kernel", "Whole-space kernel")->require_subcommand(1);
    auto* kernel_eval = kernel->add_subcommand("eval", "Evaluate p(t, r)");
    double alpha = 1.0, t = 1.0, r = 0.0, tol = 1e-10;
    int dim = 1;
    kernel_eval->add_option("--alpha", alpha)->required();
    kernel_eval->add_option("--dim", dim)->required();
    kernel_eval->add_option("--t", t)->required();
    kernel_eval->add_option("--r", r)->required();
    kernel_eval->add_option("--tol", tol, "Absolute error target");
    kernel_eval->callback([&] { action = [&] { return cmd_kernel(alpha, dim, t, r, tol); }; });

    auto* positivity = app.add_subcommand("positivity", "Perturbed kernel")->require_subcommand(1);
    auto* find_eps = positivity->add_subcommand("find-eps", "Largest certified eps");
    find_eps->add_option("--alpha", alpha)->required();
    find_eps->add_option("--dim", dim)->required();
    find_eps->callback([&] { action = [&] { return cmd_find_eps(alpha, dim, workers); }; });

    auto* periodic = app.add_subcommand("periodic", "Torus kernel")->require_subcommand(1);
    auto* c3 = periodic->add_subcommand("c3", "Lower bound of k_per(t, x) / t");
    int k_max = 10;
    c3->add_option("--alpha", alpha)->required();
    c3->add_option("--dim", dim)->required();
    c3->add_option("--k-max", k_max, "Times 2^-k for k = 0..k_max");
    c3->callback([&] { action = [&] { return cmd_c3(alpha, dim, k_max, workers); }; });

    auto* report = app.add_subcommand("report", "Report files")->require_subcommand(1);
    auto* convert = report->add_subcommand("convert", "Convert between CSV and JSON");
    std::string in_path, out_path, format;
    convert->add_option("--in", in_path)->required();
    convert->add_option("--out", out_path)->required();
    convert->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
    convert->callback([&] { action = [&] { return cmd_convert(in_path, out_path, format); }; });

    auto* ensemble = app.add_subcommand("ensemble", "Band-limited ensembles")->require_subcommand(1);
    auto* sample = ensemble->add_subcommand("sample", "Write one member in the binary grid layout");
    double A1 = 0.5, A2 = 2.0, box_len = 1.0;
    std::size_t n = 128, index = 0;
    std::uint64_t seed = 0;
    sample->add_option("--A1", A1)->required();
    sample->add_option("--A2", A2)->required();
    sample->add_option("--dim", dim);
    sample->add_option("--n", n);
    sample->add_option("--box-len", box_len);
    sample->add_option("--seed", seed);
    sample->add_option("--index", index);
    sample->add_option("--out", out_path)->required();
    sample->callback([&] { action = [&] { return cmd_sample(A1, A2, dim, n, box_len, seed, index, out_path); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }
    try {
        return action();
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitPartial;
    }
}
