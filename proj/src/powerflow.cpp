#include "gridcert/powerflow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gridcert/errors.hpp"

namespace gridcert {

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::diverged: return "diverged";
        case SolveStatus::singular_jacobian: return "singular_jacobian";
        case SolveStatus::iteration_limit: return "iteration_limit";
    }
    return "unknown";
}

ResidualModel build_model(const GridCase& grid, Mode mode) {
    if (mode == Mode::master_slave && !grid.master_id)
        throw ParseError("missing #master directive in master-slave mode");

    AdmittanceBlocks blocks = assemble_admittance(grid);
    if (blocks.p_labels.empty())
        throw ParseError("case has no unknown voltage nodes");
    ReducedNetwork net = kron_reduce_resistive(blocks, shunt_diagonal(grid, blocks));

    ResidualModel model;
    model.mode = mode;
    model.v_master = grid.v_master;
    for (const auto& id : net.p_labels) {
        const NodeSpec* n = grid.find_node(id);
        model.power.push_back(n->power);
        model.droop.push_back(n->droop);
        model.v_ref.push_back(grid.v_ref);
    }
    if (mode == Mode::island) {
        model.net = kron_reduce_master(net, net.y_vv);
    } else {
        model.net = net;
    }
    return model;
}

DenseVector residual(const ResidualModel& model, const DenseVector& v) {
    const int n = model.size();
    for (int i = 0; i < n; ++i)
        if (v[i] == 0.0) throw std::domain_error("residual: zero voltage entry (short circuit)");
    DenseVector f(n);
    if (model.mode == Mode::master_slave) {
        const DenseVector coupling = model.net.y_pv * DenseVector(model.net.v_labels.size(), model.v_master);
        const DenseVector grid_flow = model.net.y_pp * v;
        for (int i = 0; i < n; ++i)
            f[i] = model.power[i] / v[i] - coupling[i] - grid_flow[i];
    } else {
        const DenseVector grid_flow = model.net.y_s * v;
        for (int i = 0; i < n; ++i)
            f[i] = (model.power[i] - model.droop[i] * (v[i] - model.v_ref[i])) / v[i] - grid_flow[i];
    }
    return f;
}

DenseMatrix jacobian(const ResidualModel& model, const DenseVector& v) {
    const int n = model.size();
    for (int i = 0; i < n; ++i)
        if (v[i] == 0.0) throw std::domain_error("jacobian: zero voltage entry (short circuit)");
    DenseMatrix df = model.mode == Mode::master_slave ? -model.net.y_pp : -model.net.y_s;
    for (int i = 0; i < n; ++i) {
        const double injected =
            model.mode == Mode::master_slave ? model.power[i]
                                             : model.power[i] + model.droop[i] * model.v_ref[i];
        df(i, i) -= injected / (v[i] * v[i]);
    }
    return df;
}

namespace {

SolveResult run_iteration(const ResidualModel& model, const SolverConfig& cfg, bool refactor) {
    const int n = model.size();
    DenseVector v = cfg.v0.value_or(DenseVector(n, 1.0));
    if (static_cast<int>(v.size()) != n)
        throw std::invalid_argument("solver: v0 dimension mismatch");

    SolveResult result;
    SolveTrace& trace = result.trace;

    std::optional<LuFactorization> frozen;
    double prev_residual = std::numeric_limits<double>::infinity();
    int growth_streak = 0;
    SolveStatus status = SolveStatus::iteration_limit;

    for (int k = 0; k <= cfg.max_iter; ++k) {
        const DenseVector f = residual(model, v);
        const double r = sup_norm(f);

        if (r <= cfg.tol) {
            trace.records.push_back({v, r, 0.0});
            status = SolveStatus::converged;
            trace.converged = true;
            break;
        }
        if (r > prev_residual) {
            if (++growth_streak >= 3) {
                trace.records.push_back({v, r, 0.0});
                status = SolveStatus::diverged;
                break;
            }
        } else {
            growth_streak = 0;
        }
        prev_residual = r;
        if (k == cfg.max_iter) {
            trace.records.push_back({v, r, 0.0});
            status = SolveStatus::iteration_limit;
            break;
        }

        const LuFactorization* lu = nullptr;
        std::optional<LuFactorization> fresh;
        if (refactor) {
            fresh.emplace(jacobian(model, v));
            lu = &*fresh;
        } else {
            if (!frozen) frozen.emplace(jacobian(model, v));
            lu = &*frozen;
        }
        if (lu->singular()) {
            trace.records.push_back({v, r, 0.0});
            status = SolveStatus::singular_jacobian;
            break;
        }

        const DenseVector dv = lu->solve(f);
        trace.records.push_back({v, r, sup_norm(dv)});
        for (int i = 0; i < n; ++i) v[i] -= dv[i];
        ++trace.iterations;

        if (*std::min_element(v.begin(), v.end()) <= 0.0) {
            status = SolveStatus::diverged;  // left every ball the theory admits
            bool evaluable = true;
            for (double x : v) evaluable &= x != 0.0;
            if (evaluable) trace.records.push_back({v, sup_norm(residual(model, v)), 0.0});
            break;
        }
    }

    result.voltages = v;
    result.min_voltage = *std::min_element(v.begin(), v.end());
    result.status = status;
    return result;
}

} // namespace

SolveResult newton_solve(const ResidualModel& model, const SolverConfig& cfg) {
    return run_iteration(model, cfg, true);
}

SolveResult approx_newton_solve(const ResidualModel& model, const SolverConfig& cfg) {
    return run_iteration(model, cfg, false);
}

SolveResult solve(const ResidualModel& model, const SolverConfig& cfg) {
    return cfg.variant == SolverVariant::newton ? newton_solve(model, cfg)
                                                : approx_newton_solve(model, cfg);
}

} // namespace gridcert
