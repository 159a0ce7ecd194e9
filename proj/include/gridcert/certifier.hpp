#pragma once

#include <cmath>

#include "gridcert/netmodel.hpp"
#include "gridcert/numerics.hpp"
#include "gridcert/powerflow.hpp"

namespace gridcert {

/// Grid constants the convergence conditions are built from. gamma is the
/// exact norm of the inverse Jacobian at the flat start (for the island
/// conditions it is the γ of the certificate; for master-slave it feeds the
/// Banach-bound check). r_move is the exact first-step length ||Γ0 F(ê)||.
struct ConstantSet {
    Mode mode = Mode::master_slave;
    double rho = std::nan("");    // ||Y_pp^-1||
    double alpha = 0.0;           // ||P||, island: ||P + C v_n||
    double xi = 0.0;              // ||Y_pv v_v||, island: ||P - C(ê - v_n) - Y_s ê||
    double mu = std::nan("");     // ||Y_pv v_v + Y_pp ê||, master-slave only
    double gamma = std::nan("");  // ||(DF(ê))^-1||
    double r_move = std::nan("");

    /// Lipschitz constant of the Jacobian on the ball of radius delta.
    double lipschitz_k(double delta) const { return 2.0 * alpha / std::pow(1.0 - delta, 3); }
};

ConstantSet constants_master(const ReducedNetwork& net, const DenseVector& power, double v_master);

/// Throws SingularMatrixError when Y_s + diag(P + C v_n) is singular.
ConstantSet constants_island(const ReducedNetwork& net, const DenseVector& power,
                             const DenseVector& droop, const DenseVector& v_ref);

/// constants_* for an assembled residual model.
ConstantSet compute_constants(const ResidualModel& model);

enum class Method { newton, approx_newton };
enum class Verdict { quadratic, linear, no_guarantee };

const char* to_string(Method m);
const char* to_string(Verdict v);

/// A-priori convergence certificate; every field is computable before any
/// iteration runs. For the approximated methods, (delta, beta) hold the
/// smallest self-consistent contraction pair found by grid search, while
/// (beta_report, delta_report) reproduce the looser single-probe estimate.
struct Certificate {
    Mode mode = Mode::master_slave;
    Method method = Method::newton;
    ConstantSet constants;

    double h_ratio = std::nan("");    // left side of the convergence inequality
    double h_threshold = std::nan("");
    double h_theorem1 = std::nan(""); // ||F|| ||DF^-1||^2 K form of the same quantity
    double delta = std::nan("");      // certified ball radius
    double beta = std::nan("");       // contraction constant (approx methods)
    double lipschitz_k = std::nan("");
    double r_move = std::nan("");
    double alpha_max = std::nan("");  // maximum-loadability root (master newton)

    double delta_probe = std::nan("");
    double beta_report = std::nan("");
    double delta_report = std::nan("");

    Verdict verdict = Verdict::no_guarantee;
};

Certificate certify_newton_master(const ConstantSet& c);
Certificate certify_newton_island(const ConstantSet& c);
Certificate certify_approx_master(const ConstantSet& c, double delta_probe = 0.1);
Certificate certify_approx_island(const ConstantSet& c, double delta_probe = 0.1);

/// Convenience dispatcher.
Certificate certify(const ConstantSet& c, Method method, double delta_probe = 0.1);

/// Minimum positive real root of
///   s(a) = 4 a rho^2 (1 - a rho)(a + mu) - (1 - 2 a rho - mu rho)^3,
/// the largest load norm for which the quadratic certificate holds.
double max_power_master(double rho, double mu);

} // namespace gridcert
