#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gridcert/netmodel.hpp"
#include "gridcert/numerics.hpp"

namespace gridcert {

/// Residual map of the reduced network. In master-slave mode
///   F(v) = diag(v)^-1 P - Y_pv v_v - Y_pp v,
/// in island mode
///   F(v) = diag(v)^-1 (P - C (v - v_n)) - Y_s v.
struct ResidualModel {
    Mode mode = Mode::master_slave;
    ReducedNetwork net;
    DenseVector power;    // P per p-node
    DenseVector droop;    // diagonal of C (island)
    DenseVector v_ref;    // v_n (island)
    double v_master = 1.0;

    int size() const { return static_cast<int>(power.size()); }
};

/// Assembles the residual model for a case in the given mode: admittance
/// assembly, the resistive Kron reduction, and in island mode the master
/// elimination.
ResidualModel build_model(const GridCase& grid, Mode mode);

enum class SolverVariant { newton, approx_newton };

struct SolverConfig {
    double tol = 1e-12;
    int max_iter = 50;
    SolverVariant variant = SolverVariant::newton;
    std::optional<DenseVector> v0;  // defaults to the flat start
};

struct TraceRecord {
    DenseVector v;
    double residual_norm = 0.0;
    double step_norm = 0.0;  // ||v_{k+1} - v_k||, 0 on the final record
};

struct SolveTrace {
    std::vector<TraceRecord> records;
    bool converged = false;
    int iterations = 0;
};

enum class SolveStatus { converged, diverged, singular_jacobian, iteration_limit };

const char* to_string(SolveStatus s);

struct SolveResult {
    DenseVector voltages;
    SolveTrace trace;
    double min_voltage = 0.0;
    SolveStatus status = SolveStatus::iteration_limit;

    bool converged() const { return status == SolveStatus::converged; }
};

DenseVector residual(const ResidualModel& model, const DenseVector& v);

/// Closed-form Jacobian: -diag(P) diag(v)^-2 - Y_pp, respectively
/// -diag(P + C v_n) diag(v)^-2 - Y_s.
DenseMatrix jacobian(const ResidualModel& model, const DenseVector& v);

/// Full Newton iteration with a fresh factorization per step.
SolveResult newton_solve(const ResidualModel& model, const SolverConfig& cfg);

/// Constant-Jacobian iteration v <- v - Gamma0 F(v); DF at the start point is
/// factored once and reused.
SolveResult approx_newton_solve(const ResidualModel& model, const SolverConfig& cfg);

/// Dispatch on cfg.variant.
SolveResult solve(const ResidualModel& model, const SolverConfig& cfg);

} // namespace gridcert
