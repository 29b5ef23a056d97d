#include "leading/sampler.hpp"

#include "leading/errors.hpp"
#include "leading/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>

namespace leading {

void FanoutSpec::validate() const {
    if (per_hop.empty()) throw DataError("fanout: must name at least one hop");
    for (int f : per_hop)
        if (f < 1) throw DataError("fanout: per-hop counts must be >= 1");
}

FanoutSpec parse_fanout(const std::string& text) {
    FanoutSpec spec;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        try {
            spec.per_hop.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw DataError("fanout: cannot parse '" + text + "'");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    spec.validate();
    return spec;
}

std::vector<std::vector<std::uint32_t>> epoch_batches(const std::vector<std::uint32_t>& node_ids,
                                                      std::size_t batch_size, bool shuffle,
                                                      std::uint64_t seed) {
    if (node_ids.empty()) throw DataError("epoch_batches: empty node id list");
    if (batch_size < 1) throw DataError("epoch_batches: batch_size must be >= 1");
    std::vector<std::uint32_t> order = node_ids;
    if (shuffle) {
        Rng rng(seed);
        rng.shuffle(order);
    }
    std::vector<std::vector<std::uint32_t>> batches;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
        std::size_t end = std::min(order.size(), start + batch_size);
        batches.emplace_back(order.begin() + start, order.begin() + end);
    }
    return batches;
}

SubgraphBatch sample_subgraph(const TextAttributedGraph& graph, const SparseAdjacency& adj,
                              const std::vector<std::uint32_t>& targets, const FanoutSpec& fanout,
                              std::uint64_t seed) {
    fanout.validate();
    if (targets.empty()) throw DataError("sample_subgraph: empty target list");
    for (std::uint32_t t : targets)
        if (t >= graph.num_nodes) throw DataError("sample_subgraph: target id out of range");

    SubgraphBatch batch;
    batch.target_ids = targets;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        auto [it, fresh] = batch.local_index.emplace(targets[i], static_cast<std::uint32_t>(i));
        if (!fresh) throw DataError("sample_subgraph: duplicate target id");
    }

    Rng rng(seed);
    std::vector<std::uint32_t> frontier = targets;
    std::set<std::pair<std::uint32_t, std::uint32_t>> traversed;
    std::vector<std::uint32_t> scratch;

    for (std::size_t hop = 0; hop < fanout.num_hops(); ++hop) {
        std::vector<std::uint32_t> next_frontier;
        for (std::uint32_t u : frontier) {
            std::size_t deg = adj.row_degree(u);
            if (deg == 0) continue;
            scratch.assign(adj.col_indices.begin() + static_cast<std::ptrdiff_t>(adj.row_offsets[u]),
                           adj.col_indices.begin() + static_cast<std::ptrdiff_t>(adj.row_offsets[u + 1]));
            std::size_t want = std::min<std::size_t>(static_cast<std::size_t>(fanout.per_hop[hop]), deg);
            // Partial Fisher-Yates: the first `want` slots become the sample.
            for (std::size_t i = 0; i < want; ++i) {
                std::size_t j = i + static_cast<std::size_t>(rng.below(deg - i));
                std::swap(scratch[i], scratch[j]);
            }
            for (std::size_t i = 0; i < want; ++i) {
                std::uint32_t v = scratch[i];
                traversed.insert(std::minmax(u, v));
                if (!batch.local_index.count(v)) {
                    batch.local_index.emplace(
                        v, static_cast<std::uint32_t>(batch.target_ids.size() + batch.neighbor_ids.size()));
                    batch.neighbor_ids.push_back(v);
                    next_frontier.push_back(v);
                }
            }
        }
        frontier = std::move(next_frontier);
        if (frontier.empty()) break;
    }

    std::vector<std::pair<std::uint32_t, std::uint32_t>> local_edges;
    local_edges.reserve(traversed.size());
    for (const auto& [gu, gv] : traversed)
        local_edges.emplace_back(batch.local_index.at(gu), batch.local_index.at(gv));
    batch.local_adj = build_normalized_from_edges(batch.num_locals(), local_edges, false);
    return batch;
}

SubgraphBatch full_graph_batch(const SparseAdjacency& adj) {
    SubgraphBatch batch;
    batch.target_ids.resize(adj.n);
    for (std::size_t i = 0; i < adj.n; ++i) {
        batch.target_ids[i] = static_cast<std::uint32_t>(i);
        batch.local_index.emplace(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i));
    }
    batch.local_adj = adj;
    return batch;
}

double RedundancyReport::mean_target_per_epoch() const {
    if (num_nodes == 0 || epochs == 0) return 0.0;
    std::uint64_t s = 0;
    for (auto c : target_counts) s += c;
    return static_cast<double>(s) / static_cast<double>(num_nodes * epochs);
}

double RedundancyReport::mean_neighbor_per_epoch() const {
    if (num_nodes == 0 || epochs == 0) return 0.0;
    std::uint64_t s = 0;
    for (auto c : neighbor_counts) s += c;
    return static_cast<double>(s) / static_cast<double>(num_nodes * epochs);
}

double RedundancyReport::mean_total_per_epoch() const {
    return mean_target_per_epoch() + mean_neighbor_per_epoch();
}

double RedundancyReport::coupled_invocations_per_epoch() const {
    if (schedule == "coupled") return mean_total_per_epoch() * static_cast<double>(num_nodes);
    // Decoupled runs don't record per-occurrence neighbor counts, so no
    // coupled estimate can be derived from them.
    return -1.0;
}

double RedundancyReport::decoupled_invocations_per_epoch() const {
    return 2.0 * static_cast<double>(num_nodes);
}

std::string RedundancyReport::to_json() const {
    nlohmann::ordered_json j;
    j["schedule"] = schedule;
    j["num_nodes"] = num_nodes;
    j["epochs"] = epochs;
    j["batch_size"] = batch_size;
    j["fanout"] = fanout;
    j["seed"] = seed;
    j["neighbor_counting"] = "once_per_batch";
    j["target_counts"] = target_counts;
    j["neighbor_counts"] = neighbor_counts;
    j["mean_target_per_epoch"] = mean_target_per_epoch();
    j["mean_neighbor_per_epoch"] = mean_neighbor_per_epoch();
    j["mean_total_per_epoch"] = mean_total_per_epoch();
    if (schedule == "coupled") j["coupled_invocations_per_epoch"] = coupled_invocations_per_epoch();
    j["decoupled_invocations_per_epoch"] = decoupled_invocations_per_epoch();
    return j.dump(2);
}

RedundancyReport profile_encoding_redundancy(const TextAttributedGraph& graph,
                                             const SparseAdjacency& adj, std::size_t batch_size,
                                             const FanoutSpec& fanout, std::size_t epochs,
                                             ProfileSchedule schedule, std::uint64_t seed) {
    RedundancyReport report;
    report.schedule = schedule == ProfileSchedule::coupled ? "coupled" : "leading";
    report.num_nodes = graph.num_nodes;
    report.epochs = epochs;
    report.batch_size = batch_size;
    report.fanout = fanout.per_hop;
    report.seed = seed;
    report.target_counts.assign(graph.num_nodes, 0);
    report.neighbor_counts.assign(graph.num_nodes, 0);

    std::vector<std::uint32_t> all_nodes(graph.num_nodes);
    for (std::size_t i = 0; i < graph.num_nodes; ++i) all_nodes[i] = static_cast<std::uint32_t>(i);

    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        auto batches = epoch_batches(all_nodes, batch_size, true, derive_seed(seed, epoch, ~0ULL));
        for (std::size_t b = 0; b < batches.size(); ++b) {
            for (std::uint32_t t : batches[b]) ++report.target_counts[t];
            if (schedule == ProfileSchedule::coupled) {
                auto sub = sample_subgraph(graph, adj, batches[b], fanout, derive_seed(seed, epoch, b));
                for (std::uint32_t v : sub.neighbor_ids) ++report.neighbor_counts[v];
            }
        }
        if (schedule == ProfileSchedule::leading) {
            // Pipeline-2 refresh sweep: every node exactly once per epoch.
            for (std::size_t i = 0; i < graph.num_nodes; ++i) ++report.neighbor_counts[i];
        }
    }
    return report;
}

} // namespace leading
