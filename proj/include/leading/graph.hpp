#pragma once

#include "leading/dense.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace leading {

enum class Split : std::uint8_t { train = 0, val = 1, test = 2 };

const char* split_name(Split s);

/// Undirected graph whose nodes carry tokenized text, an optional class
/// label (-1 = unlabeled) and a train/val/test split tag. Edges are stored
/// once per unordered pair, with no self loops and no duplicates.
struct TextAttributedGraph {
    std::size_t num_nodes = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    std::vector<std::vector<std::string>> tokens;
    std::vector<int> labels;
    std::vector<Split> split;

    std::size_t num_edges() const { return edges.size(); }
    int num_classes() const;
    std::vector<std::uint32_t> split_ids(Split s) const;

    /// Throws DataError if any structural invariant is violated.
    void validate() const;
};

/// CSR matrix holding the symmetrically normalized adjacency. Column indices
/// are strictly increasing within each row and every stored entry has its
/// symmetric mirror.
struct SparseAdjacency {
    std::size_t n = 0;
    std::vector<std::size_t> row_offsets;   // length n+1
    std::vector<std::uint32_t> col_indices; // length nnz
    std::vector<double> values;             // length nnz

    std::size_t nnz() const { return col_indices.size(); }
    /// Stored value at (i, j), 0 if absent. Linear scan of row i.
    double value_at(std::uint32_t i, std::uint32_t j) const;
    std::size_t row_degree(std::uint32_t i) const { return row_offsets[i + 1] - row_offsets[i]; }
};

/// A_hat = D^-1/2 A D^-1/2 with d_i the (self-loop-adjusted) degree.
/// Isolated nodes get an all-zero row rather than an error.
SparseAdjacency build_normalized_adjacency(const TextAttributedGraph& graph, bool add_self_loops);

/// Builds a CSR adjacency directly from an undirected edge list with local
/// degree normalization. Edge endpoints index [0, n).
SparseAdjacency build_normalized_from_edges(
    std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& undirected_edges,
    bool add_self_loops);

/// Exact product A_hat * X. Adds nnz * x.cols() to the global multiply-add
/// counter.
DenseMatrix spmm(const SparseAdjacency& adj, const DenseMatrix& x);

std::uint64_t spmm_madd_count();
void reset_spmm_madd_count();

struct LoadStats {
    std::size_t dropped_self_loops = 0;
    std::size_t dropped_duplicate_edges = 0;
};

/// Parses the nodes TSV (`id<TAB>label<TAB>split<TAB>text`) and the edge list
/// (`src dst` per line). Duplicate edges and self loops are dropped and
/// counted in stats; structural errors throw DataError with the line number.
TextAttributedGraph load_graph(const std::string& nodes_path, const std::string& edges_path,
                               LoadStats* stats = nullptr);

/// Writes nodes.tsv and edges.tsv under dir in the load_graph format.
void write_graph_files(const TextAttributedGraph& graph, const std::string& dir);

/// Bit-exact binary cache of a graph.
void save_graph_binary(const TextAttributedGraph& graph, const std::string& path);
TextAttributedGraph load_graph_binary(const std::string& path);

struct SyntheticSpec {
    std::size_t num_nodes = 200;
    int num_classes = 2;
    double intra_p = 0.8;
    double inter_p = 0.05;
    int tokens_per_node = 6;
    int vocab_per_class = 150;
    int shared_vocab = 150;
    std::uint64_t seed = 1;
};

/// Planted-partition generator: node i's class is i mod num_classes, each
/// unordered pair is an edge with intra_p (same class) or inter_p (cross),
/// and each token comes from the class vocabulary with probability 0.7, else
/// from the shared vocabulary. Splits: 20 train nodes per class, then half of
/// the remainder (capped at 500) as val, rest test. Deterministic per seed.
TextAttributedGraph synthetic_graph(const SyntheticSpec& spec);

} // namespace leading
