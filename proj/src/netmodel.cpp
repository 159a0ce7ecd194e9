#include "gridcert/netmodel.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "gridcert/errors.hpp"

namespace gridcert {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    return out;
}

double parse_number(const std::string& s, int lineno, const char* what) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(lineno) + ": bad " + what + " value '" + s + "'");
    }
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

Mode parse_mode_word(const std::string& word, int lineno) {
    const std::string w = lower(word);
    if (w == "master-slave" || w == "master_slave") return Mode::master_slave;
    if (w == "island") return Mode::island;
    throw ParseError("line " + std::to_string(lineno) + ": unknown mode '" + word + "'");
}

void check_connected(const GridCase& grid) {
    if (grid.branches.empty()) throw ParseError("disconnected graph: case has no branches");
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& b : grid.branches) {
        adj[b.from].push_back(b.to);
        adj[b.to].push_back(b.from);
    }
    std::set<std::string> want;
    for (const auto& n : grid.nodes) want.insert(n.id);
    std::set<std::string> seen;
    std::queue<std::string> q;
    q.push(grid.branches.front().from);
    seen.insert(grid.branches.front().from);
    while (!q.empty()) {
        auto u = q.front();
        q.pop();
        for (const auto& v : adj[u])
            if (seen.insert(v).second) q.push(v);
    }
    for (const auto& id : want)
        if (!seen.count(id)) throw ParseError("disconnected graph: node '" + id + "' unreachable");
}

} // namespace

const NodeSpec* GridCase::find_node(const std::string& id) const {
    for (const auto& n : nodes)
        if (n.id == id) return &n;
    return nullptr;
}

GridCase parse_case(const std::string& text) {
    GridCase grid;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool saw_header = false;
    std::set<std::pair<std::string, std::string>> branch_keys;
    // per-node attachments gathered from data rows, keyed by `to` label
    std::map<std::string, std::pair<double, double>> attach;  // id -> (P, inv_C)
    std::vector<std::string> order;                           // first-appearance node order

    auto note_node = [&](const std::string& id) {
        if (std::find(order.begin(), order.end(), id) == order.end()) order.push_back(id);
    };

    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            if (t.size() < 2 || std::isspace(static_cast<unsigned char>(t[1]))) continue;  // comment
            std::istringstream ds(t.substr(1));
            std::string word;
            ds >> word;
            word = lower(word);
            if (word == "master") {
                std::string node, vv;
                ds >> node >> vv;
                if (node.empty() || vv.empty())
                    throw ParseError("line " + std::to_string(lineno) + ": #master needs <node> <v_v>");
                grid.master_id = node;
                grid.v_master = parse_number(vv, lineno, "v_v");
            } else if (word == "vref") {
                std::string v;
                ds >> v;
                if (v.empty()) throw ParseError("line " + std::to_string(lineno) + ": #vref needs a value");
                grid.v_ref = parse_number(v, lineno, "vref");
            } else if (word == "mode") {
                std::string m;
                ds >> m;
                grid.mode = parse_mode_word(m, lineno);
            } else {
                throw ParseError("line " + std::to_string(lineno) + ": unknown directive '#" + word + "'");
            }
            continue;
        }
        if (!saw_header) {
            auto cols = split_csv(t);
            if (cols.size() != 5 || lower(cols[0]) != "from" || lower(cols[1]) != "to" ||
                lower(cols[2]) != "r" || lower(cols[3]) != "p" || lower(cols[4]) != "inv_c")
                throw ParseError("line " + std::to_string(lineno) +
                                 ": expected header 'from,to,r,P,inv_C'");
            saw_header = true;
            continue;
        }
        auto cols = split_csv(t);
        if (cols.size() != 5)
            throw ParseError("line " + std::to_string(lineno) + ": expected 5 fields, got " +
                             std::to_string(cols.size()));
        BranchSpec br;
        br.from = cols[0];
        br.to = cols[1];
        br.resistance = parse_number(cols[2], lineno, "resistance");
        const double p = parse_number(cols[3], lineno, "P");
        const double inv_c = parse_number(cols[4], lineno, "inv_C");
        if (br.from.empty() || br.to.empty())
            throw ParseError("line " + std::to_string(lineno) + ": empty node label");
        if (br.from == br.to)
            throw ParseError("line " + std::to_string(lineno) + ": branch endpoints coincide");
        if (!(br.resistance > 0.0))
            throw ParseError("line " + std::to_string(lineno) + ": nonpositive resistance");
        auto key = std::minmax(br.from, br.to);
        if (!branch_keys.insert({key.first, key.second}).second)
            throw ParseError("line " + std::to_string(lineno) + ": duplicate branch " + br.from +
                             "-" + br.to);
        if (inv_c < 0.0)
            throw ParseError("line " + std::to_string(lineno) + ": negative inv_C");
        note_node(br.from);
        note_node(br.to);
        if (auto it = attach.find(br.to); it != attach.end()) {
            // a node reached by several rows keeps its one non-trivial attachment
            const auto existing = it->second;
            const std::pair<double, double> incoming{p, inv_c};
            if (incoming != existing && incoming != std::pair<double, double>{0.0, 0.0}) {
                if (existing != std::pair<double, double>{0.0, 0.0})
                    throw ParseError("line " + std::to_string(lineno) +
                                     ": conflicting terminal data for node '" + br.to + "'");
                it->second = incoming;
            }
        } else {
            attach[br.to] = {p, inv_c};
        }
        grid.branches.push_back(br);
    }
    if (!saw_header) throw ParseError("empty case: missing header 'from,to,r,P,inv_C'");
    if (grid.branches.empty()) throw ParseError("disconnected graph: case has no branches");

    if (grid.master_id && std::find(order.begin(), order.end(), *grid.master_id) == order.end())
        throw ParseError("master node '" + *grid.master_id + "' does not appear in any branch");

    for (const auto& id : order) {
        NodeSpec n;
        n.id = id;
        if (grid.master_id && id == *grid.master_id) {
            n.kind = NodeKind::master;
        } else if (auto it = attach.find(id); it != attach.end()) {
            const auto [p, inv_c] = it->second;
            if (p == 0.0 && inv_c == 0.0) {
                n.kind = NodeKind::zero_injection;
            } else {
                n.kind = NodeKind::power;
                n.power = p;
                n.droop = inv_c > 0.0 ? 1.0 / inv_c : 0.0;
            }
        } else {
            // endpoint that never appears as a `to` node and is not the master
            n.kind = NodeKind::zero_injection;
        }
        grid.nodes.push_back(n);
    }

    check_connected(grid);
    return grid;
}

GridCase load_case(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open case file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_case(ss.str());
}

Mode resolve_mode(const GridCase& grid, std::optional<Mode> requested) {
    Mode m = requested ? *requested
                       : grid.mode ? *grid.mode
                                   : (grid.master_id ? Mode::master_slave : Mode::island);
    if (m == Mode::master_slave && !grid.master_id)
        throw ParseError("missing #master directive in master-slave mode");
    return m;
}

AdmittanceBlocks assemble_admittance(const GridCase& grid) {
    AdmittanceBlocks b;
    std::map<std::string, int> index;
    std::vector<std::string> labels;
    for (const auto& n : grid.nodes) {
        index[n.id] = static_cast<int>(labels.size());
        labels.push_back(n.id);
        switch (n.kind) {
            case NodeKind::master: b.v_labels.push_back(n.id); break;
            case NodeKind::power: b.p_labels.push_back(n.id); break;
            default: b.r_labels.push_back(n.id); break;
        }
    }
    const int n = static_cast<int>(labels.size());
    DenseMatrix y(n, n);
    for (const auto& br : grid.branches) {
        const double g = 1.0 / br.resistance;
        const int i = index[br.from];
        const int j = index[br.to];
        y(i, j) -= g;
        y(j, i) -= g;
        y(i, i) += g;
        y(j, j) += g;
    }
    auto block = [&](const std::vector<std::string>& a, const std::vector<std::string>& c) {
        DenseMatrix m(static_cast<int>(a.size()), static_cast<int>(c.size()));
        for (int i = 0; i < m.rows; ++i)
            for (int j = 0; j < m.cols; ++j) m(i, j) = y(index[a[i]], index[c[j]]);
        return m;
    };
    b.y_vv = block(b.v_labels, b.v_labels);
    b.y_vp = block(b.v_labels, b.p_labels);
    b.y_vr = block(b.v_labels, b.r_labels);
    b.y_pv = block(b.p_labels, b.v_labels);
    b.y_pp = block(b.p_labels, b.p_labels);
    b.y_pr = block(b.p_labels, b.r_labels);
    b.y_rv = block(b.r_labels, b.v_labels);
    b.y_rp = block(b.r_labels, b.p_labels);
    b.y_rr = block(b.r_labels, b.r_labels);
    return b;
}

DenseMatrix shunt_diagonal(const GridCase& grid, const AdmittanceBlocks& blocks) {
    DenseVector g;
    g.reserve(blocks.r_labels.size());
    for (const auto& id : blocks.r_labels) {
        const NodeSpec* n = grid.find_node(id);
        g.push_back(n ? n->shunt : 0.0);
    }
    return DenseMatrix::diagonal(g);
}

ReducedNetwork kron_reduce_resistive(const AdmittanceBlocks& blocks, const DenseMatrix& g_rr) {
    ReducedNetwork net;
    net.mode = Mode::master_slave;
    net.p_labels = blocks.p_labels;
    net.v_labels = blocks.v_labels;
    if (blocks.r_labels.empty()) {
        net.y_pp = blocks.y_pp;
        net.y_pv = blocks.y_pv;
        net.y_vv = blocks.y_vv;
        return net;
    }
    DenseMatrix a = blocks.y_rr + g_rr;
    DenseMatrix ainv;
    try {
        ainv = inverse(a);
    } catch (const SingularMatrixError&) {
        throw SingularMatrixError("kron_reduce_resistive: y_rr + g_rr singular "
                                  "(isolated resistive subnetwork)");
    }
    net.y_pp = blocks.y_pp - blocks.y_pr * ainv * blocks.y_rp;
    net.y_pv = blocks.y_pv - blocks.y_pr * ainv * blocks.y_rv;
    net.y_vv = blocks.y_vv - blocks.y_vr * ainv * blocks.y_rv;
    return net;
}

ReducedNetwork kron_reduce_master(const ReducedNetwork& net, const DenseMatrix& y_vv_block) {
    ReducedNetwork out = net;
    out.mode = Mode::island;
    if (y_vv_block.empty()) {
        out.y_s = net.y_pp;
        return out;
    }
    DenseMatrix inv_vv;
    try {
        inv_vv = inverse(y_vv_block);
    } catch (const SingularMatrixError&) {
        throw SingularMatrixError("kron_reduce_master: master block singular");
    }
    out.y_s = net.y_pp - net.y_pv * inv_vv * transpose(net.y_pv);
    return out;
}

} // namespace gridcert
