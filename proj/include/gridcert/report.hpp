#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridcert/certifier.hpp"
#include "gridcert/netmodel.hpp"
#include "gridcert/powerflow.hpp"

namespace gridcert {

/// Rounds to `digits` significant digits so reports are byte-stable across
/// runs and platforms.
double round_sig(double x, int digits);

/// Report precision from GRIDCERT_PRECISION (significant digits, default 6).
int report_precision();

struct ReportOptions {
    bool with_solve = true;
    SolverConfig solver;
    double delta_probe = 0.1;
    int precision = 6;
};

nlohmann::json certificate_json(const Certificate& cert, int precision);
nlohmann::json solve_json(const SolveResult& result, double elapsed_ms, int precision);

/// One (mode, method) run: certificate plus, when requested, the solve.
nlohmann::json run_report(const GridCase& grid, Mode mode, Method method,
                          const ReportOptions& opts);

/// All four (mode x method) combinations in one document.
nlohmann::json full_report(const GridCase& grid, const std::string& case_path,
                           const ReportOptions& opts);

std::string trace_csv(const SolveTrace& trace);

struct SweepRow {
    double scale = 1.0;
    Verdict verdict = Verdict::no_guarantee;
    bool converged = false;
    int iterations = 0;
    double final_residual = 0.0;
};

/// Certifies and solves the case with P scaled by each factor of the evenly
/// spaced grid [scale_min, scale_max]. Rows are independent; `parallel`
/// selects the OpenMP path, the serial path is the reference. Rows come back
/// ordered by scale either way.
std::vector<SweepRow> run_sweep(const GridCase& grid, Mode mode, Method method, double scale_min,
                                double scale_max, int steps, const SolverConfig& solver,
                                bool parallel);

std::string sweep_csv(const std::vector<SweepRow>& rows, int precision);

} // namespace gridcert
