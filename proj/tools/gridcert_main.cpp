#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gridcert/certifier.hpp"
#include "gridcert/errors.hpp"
#include "gridcert/netmodel.hpp"
#include "gridcert/powerflow.hpp"
#include "gridcert/report.hpp"

namespace {

using namespace gridcert;

constexpr int kExitParse = 2;
constexpr int kExitSingular = 3;
constexpr int kExitDivergence = 4;

struct CommonArgs {
    std::string case_path;
    std::string mode = "";
    std::string method = "newton";
    double tol = 1e-12;
    int max_iter = 50;
    std::string trace_path;
    std::string json_path;
    double delta_probe = 0.1;
};

std::optional<Mode> parse_mode_flag(const std::string& m) {
    if (m.empty()) return std::nullopt;
    if (m == "master-slave" || m == "master_slave") return Mode::master_slave;
    if (m == "island") return Mode::island;
    throw CLI::ValidationError("--mode", "expected master-slave or island");
}

Method parse_method_flag(const std::string& m) {
    if (m == "newton") return Method::newton;
    if (m == "approx" || m == "approx-newton" || m == "approx_newton") return Method::approx_newton;
    throw CLI::ValidationError("--method", "expected newton or approx");
}

void add_common(CLI::App* cmd, CommonArgs& args, bool with_solver_opts) {
    cmd->add_option("case", args.case_path, "case file (CSV)")->required();
    cmd->add_option("--mode", args.mode, "master-slave or island");
    cmd->add_option("--method", args.method, "newton or approx");
    cmd->add_option("--delta-probe", args.delta_probe, "probe radius for the approx report pair");
    cmd->add_option("--json", args.json_path, "also write the JSON report to a file");
    if (with_solver_opts) {
        cmd->add_option("--tol", args.tol, "residual sup-norm stopping threshold");
        cmd->add_option("--max-iter", args.max_iter, "iteration cap");
        cmd->add_option("--trace", args.trace_path, "write the iteration trace CSV here");
    }
}

void emit(const nlohmann::json& doc, const std::string& json_path) {
    const std::string text = doc.dump(2);
    std::cout << text << "\n";
    if (!json_path.empty()) {
        std::ofstream out(json_path, std::ios::binary);
        out << text << "\n";
    }
}

int run_certify(const CommonArgs& args) {
    GridCase grid = load_case(args.case_path);
    const Mode mode = resolve_mode(grid, parse_mode_flag(args.mode));
    ReportOptions opts;
    opts.with_solve = false;
    opts.delta_probe = args.delta_probe;
    opts.precision = report_precision();
    emit(run_report(grid, mode, parse_method_flag(args.method), opts), args.json_path);
    return 0;
}

int run_solve(const CommonArgs& args) {
    GridCase grid = load_case(args.case_path);
    const Mode mode = resolve_mode(grid, parse_mode_flag(args.mode));
    const Method method = parse_method_flag(args.method);

    ResidualModel model = build_model(grid, mode);
    const Certificate cert = certify(compute_constants(model), method, args.delta_probe);

    SolverConfig cfg;
    cfg.tol = args.tol;
    cfg.max_iter = args.max_iter;
    cfg.variant = method == Method::newton ? SolverVariant::newton : SolverVariant::approx_newton;
    const auto t0 = std::chrono::steady_clock::now();
    const SolveResult result = solve(model, cfg);
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    const int precision = report_precision();
    nlohmann::json doc{
        {"mode", mode == Mode::master_slave ? "master_slave" : "island"},
        {"method", to_string(method)},
        {"certificate", certificate_json(cert, precision)},
        {"solve", solve_json(result, ms, precision)},
    };
    emit(doc, args.json_path);
    if (!args.trace_path.empty()) {
        std::ofstream out(args.trace_path, std::ios::binary);
        out << trace_csv(result.trace);
    }
    return result.converged() ? 0 : kExitDivergence;
}

int run_maxpower(const CommonArgs& args) {
    GridCase grid = load_case(args.case_path);
    resolve_mode(grid, Mode::master_slave);
    ResidualModel model = build_model(grid, Mode::master_slave);
    const ConstantSet c = compute_constants(model);
    const double alpha_max = max_power_master(c.rho, c.mu);
    const int precision = report_precision();
    emit(nlohmann::json{
             {"alpha_max", round_sig(alpha_max, precision)},
             {"load_norm", round_sig(c.alpha, precision)},
             {"guaranteed", c.alpha <= alpha_max},
         },
         args.json_path);
    return 0;
}

int run_sweep_cmd(const CommonArgs& args, double smin, double smax, int steps, bool serial) {
    GridCase grid = load_case(args.case_path);
    const Mode mode = resolve_mode(grid, parse_mode_flag(args.mode));
    SolverConfig cfg;
    cfg.tol = args.tol;
    cfg.max_iter = args.max_iter;
    const auto rows = run_sweep(grid, mode, parse_method_flag(args.method), smin, smax, steps, cfg,
                                !serial);
    std::cout << sweep_csv(rows, report_precision());
    return 0;
}

int run_full_report(const CommonArgs& args) {
    GridCase grid = load_case(args.case_path);
    ReportOptions opts;
    opts.with_solve = true;
    opts.solver.tol = args.tol;
    opts.solver.max_iter = args.max_iter;
    opts.delta_probe = args.delta_probe;
    opts.precision = report_precision();
    emit(full_report(grid, args.case_path, opts), args.json_path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"DC-microgrid power flow with a-priori convergence certificates"};
    app.require_subcommand(1);

    CommonArgs args;
    double scale_min = 0.5, scale_max = 2.0;
    int steps = 16;
    bool serial = false;

    auto* certify_cmd = app.add_subcommand("certify", "compute the convergence certificate");
    add_common(certify_cmd, args, false);
    auto* solve_cmd = app.add_subcommand("solve", "run the power flow");
    add_common(solve_cmd, args, true);
    auto* maxpower_cmd = app.add_subcommand("maxpower", "maximum certified loadability");
    maxpower_cmd->add_option("case", args.case_path, "case file (CSV)")->required();
    maxpower_cmd->add_option("--json", args.json_path, "also write the JSON report to a file");
    auto* sweep_cmd = app.add_subcommand("sweep", "certify and solve over a load-scale grid");
    add_common(sweep_cmd, args, true);
    sweep_cmd->add_option("--scale-min", scale_min, "smallest load scale");
    sweep_cmd->add_option("--scale-max", scale_max, "largest load scale");
    sweep_cmd->add_option("--steps", steps, "number of scales");
    sweep_cmd->add_flag("--serial", serial, "disable the parallel sweep path");
    auto* report_cmd = app.add_subcommand("report", "certificates and solves for all modes/methods");
    add_common(report_cmd, args, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (certify_cmd->parsed()) return run_certify(args);
        if (solve_cmd->parsed()) return run_solve(args);
        if (maxpower_cmd->parsed()) return run_maxpower(args);
        if (sweep_cmd->parsed()) return run_sweep_cmd(args, scale_min, scale_max, steps, serial);
        if (report_cmd->parsed()) return run_full_report(args);
    } catch (const gridcert::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const gridcert::SingularMatrixError& e) {
        std::cerr << "singular matrix: " << e.what() << "\n";
        return kExitSingular;
    } catch (const gridcert::NoRootError& e) {
        std::cerr << "no root: " << e.what() << "\n";
        return kExitSingular;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
