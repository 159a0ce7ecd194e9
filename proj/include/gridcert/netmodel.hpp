#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gridcert/numerics.hpp"

namespace gridcert {

enum class Mode { master_slave, island };

enum class NodeKind { master, power, zero_injection, resistive };

struct NodeSpec {
    std::string id;
    NodeKind kind = NodeKind::power;
    double power = 0.0;  // injected power P, positive into the grid
    double droop = 0.0;  // droop conductance C, 0 when absent
    double shunt = 0.0;  // conductance g for resistive loads
};

struct BranchSpec {
    std::string from;
    std::string to;
    double resistance = 0.0;
};

/// Raw per-unit network description, immutable once built.
struct GridCase {
    std::vector<NodeSpec> nodes;
    std::vector<BranchSpec> branches;
    std::optional<std::string> master_id;
    double v_master = 1.0;           // v_v
    double v_ref = 1.0;              // v_n, broadcast to every droop node
    std::optional<Mode> mode;        // from #mode, when present

    const NodeSpec* find_node(const std::string& id) const;
};

/// Parses the CSV case format: header `from,to,r,P,inv_C`, data rows, and
/// `#master <node> <v_v>` / `#vref <value>` / `#mode <master-slave|island>`
/// directives. A row's P and inv_C attach to its `to` node; P = 0 with
/// inv_C = 0 marks a zero-injection node. Throws ParseError.
GridCase parse_case(const std::string& text);

/// parse_case on the contents of a file.
GridCase load_case(const std::string& path);

/// Resolves the operating mode: explicit argument, else the case's #mode,
/// else master-slave when a master is declared and island otherwise.
Mode resolve_mode(const GridCase& grid, std::optional<Mode> requested);

/// Nodal admittance matrix partitioned by terminal class. Class v holds the
/// master, class r collects resistive and zero-injection nodes, class p the
/// constant-power (and droop) nodes.
struct AdmittanceBlocks {
    DenseMatrix y_vv, y_vp, y_vr;
    DenseMatrix y_pv, y_pp, y_pr;
    DenseMatrix y_rv, y_rp, y_rr;
    std::vector<std::string> v_labels, p_labels, r_labels;
};

AdmittanceBlocks assemble_admittance(const GridCase& grid);

/// Shunt conductance diagonal g_rr in r-class order (zero-injection nodes
/// contribute 0).
DenseMatrix shunt_diagonal(const GridCase& grid, const AdmittanceBlocks& blocks);

/// Solver-ready network. y_s stays empty in master-slave mode; y_vv is the
/// reduced master block kept for the island reduction.
struct ReducedNetwork {
    Mode mode = Mode::master_slave;
    DenseMatrix y_pp;
    DenseMatrix y_pv;
    DenseMatrix y_vv;
    DenseMatrix y_s;
    std::vector<std::string> p_labels;
    std::vector<std::string> v_labels;
};

/// Eliminates class-r nodes: Y_xy = y_xy - y_xr (y_rr + g_rr)^-1 y_ry.
/// Throws SingularMatrixError when y_rr + g_rr is singular (isolated
/// resistive subnetwork).
ReducedNetwork kron_reduce_resistive(const AdmittanceBlocks& blocks, const DenseMatrix& g_rr);

/// Eliminates the master block: Y_s = Y_pp - Y_pv Y_vv^-1 Y_vp.
ReducedNetwork kron_reduce_master(const ReducedNetwork& net, const DenseMatrix& y_vv_block);

} // namespace gridcert
