#include "gridcert/certifier.hpp"

#include <cmath>
#include <limits>

#include "gridcert/errors.hpp"

namespace gridcert {

namespace {

constexpr double kSearchResolution = 1e-4;

DenseVector ones(size_t n) { return DenseVector(n, 1.0); }

} // namespace

const char* to_string(Method m) {
    return m == Method::newton ? "newton" : "approx_newton";
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::quadratic: return "quadratic";
        case Verdict::linear: return "linear";
        case Verdict::no_guarantee: return "no_guarantee";
    }
    return "unknown";
}

ConstantSet constants_master(const ReducedNetwork& net, const DenseVector& power, double v_master) {
    ConstantSet c;
    c.mode = Mode::master_slave;
    c.rho = inverse_sup_norm(net.y_pp);
    c.alpha = power.empty() ? 0.0 : sup_norm(power);

    const DenseVector coupling = net.y_pv * DenseVector(net.v_labels.size(), v_master);
    c.xi = coupling.empty() ? 0.0 : sup_norm(coupling);

    const DenseVector at_flat = net.y_pp * ones(power.size());
    DenseVector flat_current(power.size());
    DenseVector f0(power.size());
    for (size_t i = 0; i < power.size(); ++i) {
        flat_current[i] = coupling[i] + at_flat[i];
        f0[i] = power[i] - flat_current[i];
    }
    c.mu = flat_current.empty() ? 0.0 : sup_norm(flat_current);

    if (power.empty()) {
        c.r_move = 0.0;
        return c;
    }
    DenseMatrix df0 = -net.y_pp;
    for (int i = 0; i < df0.rows; ++i) df0(i, i) -= power[i];
    c.gamma = inverse_sup_norm(df0);
    c.r_move = sup_norm(solve_linear(df0, f0));
    return c;
}

ConstantSet constants_island(const ReducedNetwork& net, const DenseVector& power,
                             const DenseVector& droop, const DenseVector& v_ref) {
    ConstantSet c;
    c.mode = Mode::island;
    const size_t n = power.size();
    if (n == 0) {
        c.r_move = 0.0;
        return c;
    }
    DenseVector anchored(n);  // P + C v_n
    for (size_t i = 0; i < n; ++i) anchored[i] = power[i] + droop[i] * v_ref[i];
    c.alpha = sup_norm(anchored);

    const DenseVector ys_flat = net.y_s * ones(n);
    DenseVector f0(n);
    for (size_t i = 0; i < n; ++i)
        f0[i] = power[i] - droop[i] * (1.0 - v_ref[i]) - ys_flat[i];
    c.xi = sup_norm(f0);

    DenseMatrix j0 = net.y_s;  // Y_s + diag(P + C v_n); DF(ê) is its negative
    for (size_t i = 0; i < n; ++i) j0(static_cast<int>(i), static_cast<int>(i)) += anchored[i];
    try {
        c.gamma = inverse_sup_norm(j0);
        c.r_move = sup_norm(solve_linear(j0, f0));
    } catch (const SingularMatrixError&) {
        throw SingularMatrixError("constants_island: island Jacobian at flat start is singular");
    }
    return c;
}

ConstantSet compute_constants(const ResidualModel& model) {
    return model.mode == Mode::master_slave
               ? constants_master(model.net, model.power, model.v_master)
               : constants_island(model.net, model.power, model.droop, model.v_ref);
}

Certificate certify_newton_master(const ConstantSet& c) {
    Certificate cert;
    cert.mode = Mode::master_slave;
    cert.method = Method::newton;
    cert.constants = c;
    cert.h_threshold = 0.25;
    cert.r_move = c.r_move;

    try {
        cert.alpha_max = max_power_master(c.rho, c.mu);
    } catch (const NoRootError&) {
        // zero-impedance limit: the condition holds for every load
    }

    const double denom = 1.0 - 2.0 * c.alpha * c.rho - c.mu * c.rho;
    if (!(denom > 0.0)) {
        cert.h_ratio = std::numeric_limits<double>::infinity();
        cert.verdict = Verdict::no_guarantee;
        return cert;
    }
    cert.h_ratio = c.alpha * c.rho * c.rho * (1.0 - c.alpha * c.rho) * (c.alpha + c.mu) /
                   (denom * denom * denom);
    cert.h_theorem1 = 2.0 * cert.h_ratio;
    cert.delta = (c.alpha + c.mu) * c.rho / (1.0 - c.alpha * c.rho);
    cert.lipschitz_k = c.lipschitz_k(cert.delta);
    cert.verdict = cert.h_ratio < cert.h_threshold && cert.delta < 1.0 ? Verdict::quadratic
                                                                       : Verdict::no_guarantee;
    return cert;
}

Certificate certify_newton_island(const ConstantSet& c) {
    Certificate cert;
    cert.mode = Mode::island;
    cert.method = Method::newton;
    cert.constants = c;
    cert.h_threshold = 0.5;
    cert.r_move = c.r_move;

    cert.delta = c.xi * c.gamma;
    if (!(cert.delta < 1.0)) {
        cert.h_ratio = std::numeric_limits<double>::infinity();
        cert.verdict = Verdict::no_guarantee;
        return cert;
    }
    const double one_minus = 1.0 - cert.delta;
    cert.h_ratio = c.xi * c.gamma * c.gamma * c.alpha / (one_minus * one_minus * one_minus);
    cert.h_theorem1 = 2.0 * cert.h_ratio;
    cert.lipschitz_k = c.lipschitz_k(cert.delta);
    cert.verdict = cert.h_ratio < cert.h_threshold ? Verdict::quadratic : Verdict::no_guarantee;
    return cert;
}

namespace {

// Smallest delta on the grid with beta(delta) < 1 and the self-mapping bound
// satisfied; lambda is ||Gamma0|| (its Banach bound for master-slave, gamma
// for island) and move_bound the a-priori bound on the first step.
struct ContractionSearch {
    bool found = false;
    double delta = std::nan("");
    double beta = std::nan("");
};

ContractionSearch search_contraction(double lambda, double alpha, double move_bound) {
    ContractionSearch s;
    for (int k = 1; k < 10000; ++k) {
        const double d = k * kSearchResolution;
        const double one_minus = 1.0 - d;
        const double beta = lambda * (alpha + 1.0 / (one_minus * one_minus));
        if (beta >= 1.0) continue;
        if (move_bound / (1.0 - beta) <= d) {
            s.found = true;
            s.delta = d;
            s.beta = beta;
            return s;
        }
    }
    return s;
}

Certificate certify_approx(const ConstantSet& c, double delta_probe, Mode mode) {
    Certificate cert;
    cert.mode = mode;
    cert.method = Method::approx_newton;
    cert.constants = c;
    cert.r_move = c.r_move;
    cert.delta_probe = delta_probe;

    double lambda, move_bound;
    if (mode == Mode::master_slave) {
        if (!(c.alpha * c.rho < 1.0)) {
            cert.verdict = Verdict::no_guarantee;
            return cert;
        }
        lambda = c.rho / (1.0 - c.alpha * c.rho);
        move_bound = lambda * (c.alpha + c.mu);
    } else {
        lambda = c.gamma;
        move_bound = c.gamma * c.xi;
    }

    const ContractionSearch s = search_contraction(lambda, c.alpha, move_bound);
    if (s.found) {
        cert.delta = s.delta;
        cert.beta = s.beta;
        cert.lipschitz_k = c.lipschitz_k(s.delta);
        cert.verdict = Verdict::linear;
    } else {
        cert.verdict = Verdict::no_guarantee;
    }

    const double probe_term = 1.0 / ((1.0 - delta_probe) * (1.0 - delta_probe));
    cert.beta_report = lambda * (c.alpha + probe_term);
    if (cert.beta_report < 1.0) cert.delta_report = move_bound / (1.0 - cert.beta_report);
    if (!s.found) cert.lipschitz_k = c.lipschitz_k(delta_probe);
    return cert;
}

} // namespace

Certificate certify_approx_master(const ConstantSet& c, double delta_probe) {
    return certify_approx(c, delta_probe, Mode::master_slave);
}

Certificate certify_approx_island(const ConstantSet& c, double delta_probe) {
    return certify_approx(c, delta_probe, Mode::island);
}

Certificate certify(const ConstantSet& c, Method method, double delta_probe) {
    if (method == Method::newton)
        return c.mode == Mode::master_slave ? certify_newton_master(c) : certify_newton_island(c);
    return c.mode == Mode::master_slave ? certify_approx_master(c, delta_probe)
                                        : certify_approx_island(c, delta_probe);
}

double max_power_master(double rho, double mu) {
    if (!(rho > 0.0)) throw NoRootError("max_power_master: rho must be positive");
    // expand s(a) = 4 a rho^2 (1 - a rho)(a + mu) - (b0 + b1 a)^3,
    // b0 = 1 - mu rho, b1 = -2 rho
    const double b0 = 1.0 - mu * rho;
    const double r2 = rho * rho;
    std::array<double, 4> coeffs{};
    coeffs[3] = -4.0 * r2 * rho + 8.0 * r2 * rho;
    coeffs[2] = 4.0 * r2 * b0 - 12.0 * r2 * b0;
    coeffs[1] = 4.0 * r2 * mu + 6.0 * rho * b0 * b0;
    coeffs[0] = -b0 * b0 * b0;
    return min_positive_real_root(coeffs);
}

} // namespace gridcert
