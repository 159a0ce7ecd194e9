#include "gridcert/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gridcert/errors.hpp"

namespace gridcert {

double round_sig(double x, int digits) {
    if (!std::isfinite(x) || x == 0.0) return x;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
    return std::atof(buf);
}

int report_precision() {
    const char* env = std::getenv("GRIDCERT_PRECISION");
    if (!env) return 6;
    const int p = std::atoi(env);
    return p >= 1 && p <= 17 ? p : 6;
}

namespace {

nlohmann::json number_or_null(double x, int precision) {
    if (std::isnan(x)) return nullptr;
    return round_sig(x, precision);
}

const char* mode_name(Mode m) { return m == Mode::master_slave ? "master_slave" : "island"; }

} // namespace

nlohmann::json certificate_json(const Certificate& cert, int precision) {
    nlohmann::json constants{
        {"alpha", number_or_null(cert.constants.alpha, precision)},
        {"rho", number_or_null(cert.constants.rho, precision)},
        {"mu", number_or_null(cert.constants.mu, precision)},
        {"xi", number_or_null(cert.constants.xi, precision)},
        {"gamma", number_or_null(cert.constants.gamma, precision)},
    };
    return nlohmann::json{
        {"mode", mode_name(cert.mode)},
        {"method", to_string(cert.method)},
        {"constants", constants},
        {"h_ratio", number_or_null(cert.h_ratio, precision)},
        {"h_threshold", number_or_null(cert.h_threshold, precision)},
        {"h_theorem1", number_or_null(cert.h_theorem1, precision)},
        {"delta", number_or_null(cert.delta, precision)},
        {"beta", number_or_null(cert.beta, precision)},
        {"lipschitz_k", number_or_null(cert.lipschitz_k, precision)},
        {"r_move", number_or_null(cert.r_move, precision)},
        {"alpha_max", number_or_null(cert.alpha_max, precision)},
        {"delta_probe", number_or_null(cert.delta_probe, precision)},
        {"beta_report", number_or_null(cert.beta_report, precision)},
        {"delta_report", number_or_null(cert.delta_report, precision)},
        {"verdict", to_string(cert.verdict)},
    };
}

nlohmann::json solve_json(const SolveResult& result, double elapsed_ms, int precision) {
    const double final_residual =
        result.trace.records.empty() ? std::nan("") : result.trace.records.back().residual_norm;
    return nlohmann::json{
        {"status", to_string(result.status)},
        {"converged", result.converged()},
        {"iterations", result.trace.iterations},
        {"final_residual", number_or_null(final_residual, precision)},
        {"min_voltage", number_or_null(result.min_voltage, precision)},
        {"time_ms", elapsed_ms},
    };
}

nlohmann::json run_report(const GridCase& grid, Mode mode, Method method,
                          const ReportOptions& opts) {
    ResidualModel model = build_model(grid, mode);
    const ConstantSet constants = compute_constants(model);
    const Certificate cert = certify(constants, method, opts.delta_probe);

    nlohmann::json out{
        {"mode", mode_name(mode)},
        {"method", to_string(method)},
        {"certificate", certificate_json(cert, opts.precision)},
    };
    if (opts.with_solve) {
        SolverConfig cfg = opts.solver;
        cfg.variant =
            method == Method::newton ? SolverVariant::newton : SolverVariant::approx_newton;
        const auto t0 = std::chrono::steady_clock::now();
        const SolveResult result = solve(model, cfg);
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        out["solve"] = solve_json(result, ms, opts.precision);
    }
    return out;
}

nlohmann::json full_report(const GridCase& grid, const std::string& case_path,
                           const ReportOptions& opts) {
    nlohmann::json runs = nlohmann::json::array();
    for (Mode mode : {Mode::master_slave, Mode::island}) {
        if (mode == Mode::master_slave && !grid.master_id) continue;
        for (Method method : {Method::newton, Method::approx_newton})
            runs.push_back(run_report(grid, mode, method, opts));
    }
    return nlohmann::json{
        {"case", {{"path", case_path},
                  {"nodes", grid.nodes.size()},
                  {"branches", grid.branches.size()},
                  {"v_master", grid.v_master},
                  {"v_ref", grid.v_ref}}},
        {"runs", runs},
    };
}

std::string trace_csv(const SolveTrace& trace) {
    std::ostringstream out;
    out << "iter,residual_norm,step_norm\n";
    for (size_t k = 0; k < trace.records.size(); ++k) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", k, trace.records[k].residual_norm,
                      trace.records[k].step_norm);
        out << buf;
    }
    return out.str();
}

std::vector<SweepRow> run_sweep(const GridCase& grid, Mode mode, Method method, double scale_min,
                                double scale_max, int steps, const SolverConfig& solver,
                                bool parallel) {
    if (!(scale_min < scale_max) || steps < 2)
        throw std::invalid_argument("run_sweep: need scale_min < scale_max and steps >= 2");

    std::vector<SweepRow> rows(steps);
    const double stride = (scale_max - scale_min) / (steps - 1);

    auto run_one = [&](int i) {
        SweepRow row;
        row.scale = scale_min + i * stride;
        GridCase scaled = grid;
        for (auto& n : scaled.nodes) n.power *= row.scale;
        try {
            ResidualModel model = build_model(scaled, mode);
            const Certificate cert = certify(compute_constants(model), method);
            row.verdict = cert.verdict;
            SolverConfig cfg = solver;
            cfg.variant =
                method == Method::newton ? SolverVariant::newton : SolverVariant::approx_newton;
            const SolveResult result = solve(model, cfg);
            row.converged = result.converged();
            row.iterations = result.trace.iterations;
            row.final_residual =
                result.trace.records.empty() ? std::nan("") : result.trace.records.back().residual_norm;
        } catch (const std::exception&) {
            row.verdict = Verdict::no_guarantee;
            row.converged = false;  // the sweep continues past per-row failures
        }
        rows[i] = row;
    };

#ifdef _OPENMP
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < steps; ++i) run_one(i);
        return rows;
    }
#else
    (void)parallel;
#endif
    for (int i = 0; i < steps; ++i) run_one(i);
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, int precision) {
    std::ostringstream out;
    out << "scale,verdict,converged,iters,final_residual\n";
    for (const auto& r : rows) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%.*g,%s,%d,%d,%.*g\n", precision, r.scale,
                      to_string(r.verdict), r.converged ? 1 : 0, r.iterations, precision,
                      r.final_residual);
        out << buf;
    }
    return out.str();
}

} // namespace gridcert
