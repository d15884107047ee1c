#pragma once

#include <cstddef>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bgan::topology {

using AgentId = std::size_t;

/// Directed communication graph. An edge (j -> i) means agent i receives
/// ideas from agent j.
class CommGraph {
public:
    CommGraph() = default;
    explicit CommGraph(std::size_t n);
    CommGraph(std::size_t n, std::span<const std::pair<AgentId, AgentId>> edges);

    std::size_t size() const noexcept { return in_.size(); }
    std::size_t edge_count() const noexcept;

    void add_edge(AgentId from, AgentId to);
    bool has_edge(AgentId from, AgentId to) const;

    /// Agents that agent i receives from, ascending.
    const std::vector<AgentId>& in_neighbors(AgentId i) const;
    /// Agents that agent i sends to, ascending.
    const std::vector<AgentId>& out_neighbors(AgentId i) const;

    /// All edges as (from, to), ordered by receiver then sender.
    std::vector<std::pair<AgentId, AgentId>> edges() const;

    bool operator==(const CommGraph&) const = default;

private:
    void check_id(AgentId i) const;

    std::vector<std::vector<AgentId>> in_;
    std::vector<std::vector<AgentId>> out_;
};

/// Agent i receives from i-1, ..., i-k (mod n).
CommGraph ring_graph(std::size_t n, std::size_t k);
/// Agent i receives from i+1 only; the last agent receives nothing.
CommGraph string_graph(std::size_t n);
CommGraph complete_graph(std::size_t n);

bool is_strongly_connected(const CommGraph& g);
/// Component label per vertex (Kosaraju); labels are dense from 0.
std::vector<std::size_t> strongly_connected_components(const CommGraph& g);
/// Agents j != i that have a directed path j -> ... -> i.
std::set<AgentId> reachable_set(const CommGraph& g, AgentId i);

/// Brainstorming weights: row i holds pi_i (own data) and pi_ij per in-neighbor.
struct MixingWeights {
    std::vector<std::vector<double>> B;  // n x n, B[i][j] = pi_ij
    std::vector<double> C;               // C[i] = pi_i

    std::size_t size() const noexcept { return C.size(); }
    bool operator==(const MixingWeights&) const = default;
};

/// Throws a validation error listing every violated condition: support outside
/// the graph, negative entries, row sums off by more than 1e-12, or pi_i <= 0.
void validate(const MixingWeights& w, const CommGraph& g);
std::vector<std::string> violations(const MixingWeights& w, const CommGraph& g);

MixingWeights uniform_weights(const CommGraph& g);
MixingWeights proportional_weights(const CommGraph& g, std::span<const long long> sample_counts);

/// Edge list: header `agents <n>`, then one `j i` line per edge (j sends to i).
void write_graph(const CommGraph& g, std::ostream& out);
CommGraph read_graph(std::istream& in);
CommGraph read_graph_file(const std::string& path);

/// CSV rows per receiving agent: `pi_i,j:pi_ij,...`.
void write_weights(const MixingWeights& w, std::ostream& out);
MixingWeights read_weights(std::istream& in, std::size_t n);
MixingWeights read_weights_file(const std::string& path, std::size_t n);

}  // namespace bgan::topology
