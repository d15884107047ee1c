#include "bgan/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "bgan/error.hpp"

namespace bgan::topology {

CommGraph::CommGraph(std::size_t n) : in_(n), out_(n) {}

CommGraph::CommGraph(std::size_t n, std::span<const std::pair<AgentId, AgentId>> edges)
    : CommGraph(n) {
    for (const auto& [from, to] : edges) add_edge(from, to);
}

void CommGraph::check_id(AgentId i) const {
    if (i >= size()) {
        throw Error(ErrorCode::validation,
                    "agent id " + std::to_string(i) + " out of range [0, " + std::to_string(size()) + ")");
    }
}

std::size_t CommGraph::edge_count() const noexcept {
    std::size_t n = 0;
    for (const auto& v : in_) n += v.size();
    return n;
}

void CommGraph::add_edge(AgentId from, AgentId to) {
    check_id(from);
    check_id(to);
    if (from == to) throw Error(ErrorCode::validation, "self-loop on agent " + std::to_string(to));
    auto& in = in_[to];
    auto pos = std::lower_bound(in.begin(), in.end(), from);
    if (pos != in.end() && *pos == from) return;
    in.insert(pos, from);
    auto& out = out_[from];
    out.insert(std::lower_bound(out.begin(), out.end(), to), to);
}

bool CommGraph::has_edge(AgentId from, AgentId to) const {
    check_id(from);
    check_id(to);
    return std::binary_search(in_[to].begin(), in_[to].end(), from);
}

const std::vector<AgentId>& CommGraph::in_neighbors(AgentId i) const {
    check_id(i);
    return in_[i];
}

const std::vector<AgentId>& CommGraph::out_neighbors(AgentId i) const {
    check_id(i);
    return out_[i];
}

std::vector<std::pair<AgentId, AgentId>> CommGraph::edges() const {
    std::vector<std::pair<AgentId, AgentId>> e;
    for (AgentId i = 0; i < size(); ++i)
        for (AgentId j : in_[i]) e.emplace_back(j, i);
    return e;
}

CommGraph ring_graph(std::size_t n, std::size_t k) {
    if (n < 2) throw Error(ErrorCode::config, "ring graph needs n >= 2");
    if (k < 1 || k > n - 1) {
        throw Error(ErrorCode::config, "ring graph needs 1 <= k <= n-1, got k = " + std::to_string(k));
    }
    CommGraph g(n);
    for (AgentId i = 0; i < n; ++i)
        for (std::size_t h = 1; h <= k; ++h) g.add_edge((i + n - h) % n, i);
    return g;
}

CommGraph string_graph(std::size_t n) {
    if (n < 2) throw Error(ErrorCode::config, "string graph needs n >= 2");
    CommGraph g(n);
    for (AgentId i = 0; i + 1 < n; ++i) g.add_edge(i + 1, i);
    return g;
}

CommGraph complete_graph(std::size_t n) {
    if (n < 2) return CommGraph(n);
    return ring_graph(n, n - 1);
}

std::vector<std::size_t> strongly_connected_components(const CommGraph& g) {
    const std::size_t n = g.size();
    // Pass 1: finish order on the forward graph (iterative DFS).
    std::vector<char> seen(n, 0);
    std::vector<AgentId> order;
    order.reserve(n);
    for (AgentId s = 0; s < n; ++s) {
        if (seen[s]) continue;
        std::vector<std::pair<AgentId, std::size_t>> stack{{s, 0}};
        seen[s] = 1;
        while (!stack.empty()) {
            auto& [v, idx] = stack.back();
            const auto& next = g.out_neighbors(v);
            if (idx < next.size()) {
                const AgentId w = next[idx++];
                if (!seen[w]) {
                    seen[w] = 1;
                    stack.emplace_back(w, 0);
                }
            } else {
                order.push_back(v);
                stack.pop_back();
            }
        }
    }
    // Pass 2: DFS on the transpose in reverse finish order.
    constexpr std::size_t unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> comp(n, unset);
    std::size_t label = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (comp[*it] != unset) continue;
        std::vector<AgentId> stack{*it};
        comp[*it] = label;
        while (!stack.empty()) {
            const AgentId v = stack.back();
            stack.pop_back();
            for (AgentId w : g.in_neighbors(v)) {
                if (comp[w] == unset) {
                    comp[w] = label;
                    stack.push_back(w);
                }
            }
        }
        ++label;
    }
    return comp;
}

bool is_strongly_connected(const CommGraph& g) {
    if (g.size() == 0) return false;
    const auto comp = strongly_connected_components(g);
    return std::all_of(comp.begin(), comp.end(), [&](std::size_t c) { return c == comp[0]; });
}

std::set<AgentId> reachable_set(const CommGraph& g, AgentId i) {
    // Walk incoming edges backwards from i.
    std::vector<char> seen(g.size(), 0);
    std::vector<AgentId> stack{i};
    (void)g.in_neighbors(i);
    seen[i] = 1;
    std::set<AgentId> result;
    while (!stack.empty()) {
        const AgentId v = stack.back();
        stack.pop_back();
        for (AgentId w : g.in_neighbors(v)) {
            if (!seen[w]) {
                seen[w] = 1;
                result.insert(w);
                stack.push_back(w);
            }
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Mixing weights

std::vector<std::string> violations(const MixingWeights& w, const CommGraph& g) {
    std::vector<std::string> out;
    const std::size_t n = g.size();
    if (w.C.size() != n || w.B.size() != n) {
        out.push_back("weights describe " + std::to_string(w.C.size()) + " agents, graph has " +
                      std::to_string(n));
        return out;
    }
    for (AgentId i = 0; i < n; ++i) {
        if (w.B[i].size() != n) {
            out.push_back("row " + std::to_string(i) + " of B has wrong length");
            continue;
        }
        double sum = w.C[i];
        if (!std::isfinite(w.C[i]) || w.C[i] <= 0.0) {
            out.push_back("agent " + std::to_string(i) + ": pi_i = " + std::to_string(w.C[i]) +
                          " must be > 0 (I - B must be strictly diagonally dominant)");
        }
        for (AgentId j = 0; j < n; ++j) {
            const double v = w.B[i][j];
            sum += v;
            if (!std::isfinite(v) || v < 0.0) {
                out.push_back("agent " + std::to_string(i) + ": pi_" + std::to_string(i) + "," +
                              std::to_string(j) + " is negative or non-finite");
            } else if (v > 0.0 && (i == j || !g.has_edge(j, i))) {
                out.push_back("agent " + std::to_string(i) + ": weight on " + std::to_string(j) +
                              " but no edge " + std::to_string(j) + " -> " + std::to_string(i));
            }
        }
        if (std::abs(sum - 1.0) > 1e-12) {
            std::ostringstream msg;
            msg << "agent " << i << ": pi_i + sum_j pi_ij = " << std::setprecision(17) << sum
                << " != 1";
            out.push_back(msg.str());
        }
    }
    return out;
}

void validate(const MixingWeights& w, const CommGraph& g) {
    const auto v = violations(w, g);
    if (v.empty()) return;
    std::string msg = "invalid mixing weights:";
    for (const auto& s : v) msg += "\n  - " + s;
    throw Error(ErrorCode::validation, msg);
}

MixingWeights uniform_weights(const CommGraph& g) {
    const std::size_t n = g.size();
    MixingWeights w{std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0)),
                    std::vector<double>(n, 1.0)};
    for (AgentId i = 0; i < n; ++i) {
        const auto& in = g.in_neighbors(i);
        const double share = 1.0 / static_cast<double>(in.size() + 1);
        w.C[i] = share;
        for (AgentId j : in) w.B[i][j] = share;
    }
    return w;
}

MixingWeights proportional_weights(const CommGraph& g, std::span<const long long> sample_counts) {
    const std::size_t n = g.size();
    if (sample_counts.size() != n) {
        throw Error(ErrorCode::config, "proportional weights need one sample count per agent");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (sample_counts[i] <= 0) {
            throw Error(ErrorCode::config,
                        "agent " + std::to_string(i) + " has non-positive sample count");
        }
    }
    MixingWeights w{std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0)),
                    std::vector<double>(n, 1.0)};
    for (AgentId i = 0; i < n; ++i) {
        const auto& in = g.in_neighbors(i);
        double total = static_cast<double>(sample_counts[i]);
        for (AgentId j : in) total += static_cast<double>(sample_counts[j]);
        w.C[i] = static_cast<double>(sample_counts[i]) / total;
        for (AgentId j : in) w.B[i][j] = static_cast<double>(sample_counts[j]) / total;
    }
    return w;
}

// ---------------------------------------------------------------------------
// File formats

void write_graph(const CommGraph& g, std::ostream& out) {
    out << "agents " << g.size() << '\n';
    for (const auto& [from, to] : g.edges()) out << from << ' ' << to << '\n';
}

CommGraph read_graph(std::istream& in) {
    std::string line;
    std::size_t n = 0;
    bool have_header = false;
    CommGraph g;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (!have_header) {
            if (first != "agents" || !(ls >> n)) {
                throw Error(ErrorCode::io, "graph file: expected 'agents <n>' on line " +
                                               std::to_string(line_no));
            }
            g = CommGraph(n);
            have_header = true;
            continue;
        }
        std::size_t to = 0;
        if (!(ls >> to)) {
            throw Error(ErrorCode::io, "graph file: expected 'j i' on line " + std::to_string(line_no));
        }
        try {
            g.add_edge(std::stoul(first), to);
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::io, "graph file: bad sender on line " + std::to_string(line_no));
        }
    }
    if (!have_header) throw Error(ErrorCode::io, "graph file: missing 'agents <n>' header");
    return g;
}

CommGraph read_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io, "cannot read graph file " + path);
    return read_graph(in);
}

void write_weights(const MixingWeights& w, std::ostream& out) {
    out << std::setprecision(17);
    for (std::size_t i = 0; i < w.size(); ++i) {
        out << w.C[i];
        for (std::size_t j = 0; j < w.B[i].size(); ++j)
            if (w.B[i][j] != 0.0) out << ',' << j << ':' << w.B[i][j];
        out << '\n';
    }
}

MixingWeights read_weights(std::istream& in, std::size_t n) {
    MixingWeights w{std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0)),
                    std::vector<double>(n, 0.0)};
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (row >= n) throw Error(ErrorCode::io, "weights file has more than " + std::to_string(n) + " rows");
        std::istringstream ls(line);
        std::string cell;
        bool first = true;
        while (std::getline(ls, cell, ',')) {
            try {
                if (first) {
                    w.C[row] = std::stod(cell);
                    first = false;
                    continue;
                }
                const auto colon = cell.find(':');
                if (colon == std::string::npos) throw std::invalid_argument("missing ':'");
                const std::size_t j = std::stoul(cell.substr(0, colon));
                if (j >= n) throw std::out_of_range("column");
                w.B[row][j] = std::stod(cell.substr(colon + 1));
            } catch (const std::logic_error&) {
                throw Error(ErrorCode::io, "weights file: bad cell '" + cell + "' in row " +
                                               std::to_string(row));
            }
        }
        ++row;
    }
    if (row != n) {
        throw Error(ErrorCode::io, "weights file has " + std::to_string(row) + " rows, expected " +
                                       std::to_string(n));
    }
    return w;
}

MixingWeights read_weights_file(const std::string& path, std::size_t n) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io, "cannot read weights file " + path);
    return read_weights(in, n);
}

}  // namespace bgan::topology
