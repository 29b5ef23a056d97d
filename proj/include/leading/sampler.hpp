#pragma once

#include "leading/graph.hpp"

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace leading {

/// Per-hop caps on sampled neighbors, e.g. {10, 5} = up to 10 first-hop and
/// 5 second-hop neighbors per expanding node.
struct FanoutSpec {
    std::vector<int> per_hop;

    std::size_t num_hops() const { return per_hop.size(); }
    void validate() const;
};

/// Parses "10,5" into a FanoutSpec.
FanoutSpec parse_fanout(const std::string& text);

/// A sampled subgraph around a target batch. Local rows [0, T) are the
/// targets in order, rows [T, T+B) the sampled non-target neighbors.
/// local_adj holds exactly the traversed undirected edges, renormalized by
/// local degrees; a target reached during expansion folds into its target
/// slot instead of becoming a neighbor row.
struct SubgraphBatch {
    std::vector<std::uint32_t> target_ids;
    std::vector<std::uint32_t> neighbor_ids;
    std::unordered_map<std::uint32_t, std::uint32_t> local_index;
    SparseAdjacency local_adj;

    std::size_t num_targets() const { return target_ids.size(); }
    std::size_t num_locals() const { return target_ids.size() + neighbor_ids.size(); }
    /// Global id of local row r.
    std::uint32_t global_id(std::size_t r) const {
        return r < target_ids.size() ? target_ids[r] : neighbor_ids[r - target_ids.size()];
    }
};

/// Splits node_ids into consecutive batches of batch_size (last may be
/// short), optionally pre-shuffled by a seeded permutation.
std::vector<std::vector<std::uint32_t>> epoch_batches(const std::vector<std::uint32_t>& node_ids,
                                                      std::size_t batch_size, bool shuffle,
                                                      std::uint64_t seed);

/// Hop-by-hop frontier expansion from the targets. At hop h every frontier
/// node samples min(fanout[h], degree) distinct neighbors uniformly without
/// replacement; traversed edges define the local graph. Nodes already in the
/// batch do not re-enter the frontier.
SubgraphBatch sample_subgraph(const TextAttributedGraph& graph, const SparseAdjacency& adj,
                              const std::vector<std::uint32_t>& targets, const FanoutSpec& fanout,
                              std::uint64_t seed);

/// Degenerate batch covering the whole graph: every node is a target and
/// local_adj is the full normalized adjacency.
SubgraphBatch full_graph_batch(const SparseAdjacency& adj);

/// Per-node encoder-invocation counts accumulated over an epoch simulation.
/// A node neighboring several targets of one batch is counted once per batch
/// (the report records this choice).
struct RedundancyReport {
    std::string schedule;
    std::size_t num_nodes = 0;
    std::size_t epochs = 0;
    std::size_t batch_size = 0;
    std::vector<int> fanout;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> target_counts;   // totals over all epochs
    std::vector<std::uint64_t> neighbor_counts; // totals over all epochs

    double mean_target_per_epoch() const;
    double mean_neighbor_per_epoch() const;
    double mean_total_per_epoch() const;
    /// Predicted per-epoch encoder invocations if the same batch stream ran
    /// under the coupled schedule (targets + per-batch neighbors).
    double coupled_invocations_per_epoch() const;
    /// Decoupled schedule: one target pass over the batches plus one
    /// full-graph refresh sweep per epoch.
    double decoupled_invocations_per_epoch() const;

    std::string to_json() const;
};

enum class ProfileSchedule { coupled, leading };

/// Simulates `epochs` epochs of batch scheduling plus neighbor sampling over
/// all nodes and counts how often each node would be encoded. Under the
/// coupled schedule neighbor encodings are counted per batch appearance;
/// under the decoupled (leading) schedule they are replaced by exactly one
/// refresh per node per epoch.
RedundancyReport profile_encoding_redundancy(const TextAttributedGraph& graph,
                                             const SparseAdjacency& adj, std::size_t batch_size,
                                             const FanoutSpec& fanout, std::size_t epochs,
                                             ProfileSchedule schedule, std::uint64_t seed);

} // namespace leading
