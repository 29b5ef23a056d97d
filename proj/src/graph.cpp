#include "leading/graph.hpp"

#include "leading/errors.hpp"
#include "leading/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace leading {

const char* split_name(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        case Split::test: return "test";
    }
    return "?";
}

int TextAttributedGraph::num_classes() const {
    int k = 0;
    for (int l : labels) k = std::max(k, l + 1);
    return k;
}

std::vector<std::uint32_t> TextAttributedGraph::split_ids(Split s) const {
    std::vector<std::uint32_t> ids;
    for (std::size_t i = 0; i < num_nodes; ++i)
        if (split[i] == s) ids.push_back(static_cast<std::uint32_t>(i));
    return ids;
}

void TextAttributedGraph::validate() const {
    if (tokens.size() != num_nodes || labels.size() != num_nodes || split.size() != num_nodes)
        throw DataError("graph: per-node array sizes do not match num_nodes");
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (const auto& [u, v] : edges) {
        if (u >= num_nodes || v >= num_nodes) throw DataError("graph: edge endpoint out of range");
        if (u == v) throw DataError("graph: stored self loop");
        auto key = std::minmax(u, v);
        if (!seen.insert(key).second) throw DataError("graph: duplicate undirected edge");
    }
    for (std::size_t i = 0; i < num_nodes; ++i)
        if (split[i] == Split::train && labels[i] < 0)
            throw DataError("graph: train node " + std::to_string(i) + " has no label");
}

double SparseAdjacency::value_at(std::uint32_t i, std::uint32_t j) const {
    for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k)
        if (col_indices[k] == j) return values[k];
    return 0.0;
}

SparseAdjacency build_normalized_from_edges(
    std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& undirected_edges,
    bool add_self_loops) {
    std::vector<std::size_t> degree(n, add_self_loops ? 1 : 0);
    for (const auto& [u, v] : undirected_edges) {
        ++degree[u];
        ++degree[v];
    }

    // Directed entry list; each undirected edge contributes both directions.
    std::vector<std::vector<std::uint32_t>> nbrs(n);
    for (const auto& [u, v] : undirected_edges) {
        nbrs[u].push_back(v);
        nbrs[v].push_back(u);
    }
    if (add_self_loops)
        for (std::size_t i = 0; i < n; ++i) nbrs[i].push_back(static_cast<std::uint32_t>(i));

    SparseAdjacency adj;
    adj.n = n;
    adj.row_offsets.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::sort(nbrs[i].begin(), nbrs[i].end());
        adj.row_offsets[i + 1] = adj.row_offsets[i] + nbrs[i].size();
    }
    adj.col_indices.reserve(adj.row_offsets[n]);
    adj.values.reserve(adj.row_offsets[n]);
    for (std::size_t i = 0; i < n; ++i) {
        double di = static_cast<double>(degree[i]);
        for (std::uint32_t j : nbrs[i]) {
            adj.col_indices.push_back(j);
            adj.values.push_back(1.0 / std::sqrt(di * static_cast<double>(degree[j])));
        }
    }
    return adj;
}

SparseAdjacency build_normalized_adjacency(const TextAttributedGraph& graph, bool add_self_loops) {
    return build_normalized_from_edges(graph.num_nodes, graph.edges, add_self_loops);
}

namespace {
std::atomic<std::uint64_t> g_spmm_madds{0};
}

std::uint64_t spmm_madd_count() { return g_spmm_madds.load(std::memory_order_relaxed); }
void reset_spmm_madd_count() { g_spmm_madds.store(0, std::memory_order_relaxed); }

DenseMatrix spmm(const SparseAdjacency& adj, const DenseMatrix& x) {
    if (adj.n != x.rows()) throw std::invalid_argument("spmm: adjacency cols != x rows");
    DenseMatrix y(adj.n, x.cols());
    for (std::size_t i = 0; i < adj.n; ++i) {
        auto yrow = y.row(i);
        for (std::size_t k = adj.row_offsets[i]; k < adj.row_offsets[i + 1]; ++k) {
            double a = adj.values[k];
            const auto xrow = x.row(adj.col_indices[k]);
            for (std::size_t c = 0; c < x.cols(); ++c) yrow[c] += a * xrow[c];
        }
    }
    g_spmm_madds.fetch_add(static_cast<std::uint64_t>(adj.nnz()) * x.cols(),
                           std::memory_order_relaxed);
    return y;
}

namespace {

Split parse_split(const std::string& s, std::size_t line_no) {
    if (s == "train") return Split::train;
    if (s == "val") return Split::val;
    if (s == "test") return Split::test;
    throw DataError("nodes file line " + std::to_string(line_no) + ": unknown split tag '" + s + "'");
}

} // namespace

TextAttributedGraph load_graph(const std::string& nodes_path, const std::string& edges_path,
                               LoadStats* stats) {
    std::ifstream nf(nodes_path);
    if (!nf) throw DataError("cannot open nodes file: " + nodes_path);

    TextAttributedGraph g;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(nf, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::size_t t1 = line.find('\t');
        std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        std::size_t t3 = t2 == std::string::npos ? std::string::npos : line.find('\t', t2 + 1);
        if (t3 == std::string::npos)
            throw DataError("nodes file line " + std::to_string(line_no) +
                            ": expected 4 tab-separated fields");
        std::string id_s = line.substr(0, t1);
        std::string label_s = line.substr(t1 + 1, t2 - t1 - 1);
        std::string split_s = line.substr(t2 + 1, t3 - t2 - 1);
        std::string text = line.substr(t3 + 1);

        std::size_t id;
        try {
            id = std::stoull(id_s);
        } catch (const std::exception&) {
            throw DataError("nodes file line " + std::to_string(line_no) + ": bad node id '" + id_s + "'");
        }
        if (id != line_no - 1)
            throw DataError("nodes file line " + std::to_string(line_no) + ": node id " + id_s +
                            " does not equal line index " + std::to_string(line_no - 1));

        int label = -1;
        if (label_s != "-") {
            try {
                label = std::stoi(label_s);
            } catch (const std::exception&) {
                throw DataError("nodes file line " + std::to_string(line_no) + ": bad label '" + label_s + "'");
            }
            if (label < 0)
                throw DataError("nodes file line " + std::to_string(line_no) + ": label out of range");
        }

        std::vector<std::string> toks;
        std::istringstream ts(text);
        std::string tok;
        while (ts >> tok) toks.push_back(tok);

        g.labels.push_back(label);
        g.split.push_back(parse_split(split_s, line_no));
        g.tokens.push_back(std::move(toks));
    }
    g.num_nodes = g.labels.size();

    std::ifstream ef(edges_path);
    if (!ef) throw DataError("cannot open edges file: " + edges_path);
    LoadStats local;
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    line_no = 0;
    while (std::getline(ef, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        long long u, v;
        if (!(ls >> u >> v))
            throw DataError("edges file line " + std::to_string(line_no) + ": expected 'src dst'");
        if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= g.num_nodes ||
            static_cast<std::size_t>(v) >= g.num_nodes)
            throw DataError("edges file line " + std::to_string(line_no) +
                            ": endpoint out of range for N=" + std::to_string(g.num_nodes));
        if (u == v) {
            ++local.dropped_self_loops;
            continue;
        }
        auto key = std::minmax(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v));
        if (!seen.insert(key).second) {
            ++local.dropped_duplicate_edges;
            continue;
        }
        g.edges.emplace_back(key.first, key.second);
    }
    if (stats) *stats = local;
    g.validate();
    return g;
}

void write_graph_files(const TextAttributedGraph& graph, const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream nf(dir + "/nodes.tsv");
    if (!nf) throw DataError("cannot write " + dir + "/nodes.tsv");
    for (std::size_t i = 0; i < graph.num_nodes; ++i) {
        nf << i << '\t';
        if (graph.labels[i] < 0)
            nf << '-';
        else
            nf << graph.labels[i];
        nf << '\t' << split_name(graph.split[i]) << '\t';
        for (std::size_t t = 0; t < graph.tokens[i].size(); ++t) {
            if (t) nf << ' ';
            nf << graph.tokens[i][t];
        }
        nf << '\n';
    }
    std::ofstream ef(dir + "/edges.tsv");
    if (!ef) throw DataError("cannot write " + dir + "/edges.tsv");
    for (const auto& [u, v] : graph.edges) ef << u << ' ' << v << '\n';
}

namespace {

template <typename T>
void write_pod(std::ofstream& f, const T& x) {
    f.write(reinterpret_cast<const char*>(&x), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& f) {
    T x{};
    f.read(reinterpret_cast<char*>(&x), sizeof(T));
    return x;
}

} // namespace

void save_graph_binary(const TextAttributedGraph& graph, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open for writing: " + path);
    f.write("TAG1", 4);
    write_pod<std::uint64_t>(f, graph.num_nodes);
    write_pod<std::uint64_t>(f, graph.edges.size());
    for (const auto& [u, v] : graph.edges) {
        write_pod<std::uint32_t>(f, u);
        write_pod<std::uint32_t>(f, v);
    }
    for (std::size_t i = 0; i < graph.num_nodes; ++i) {
        write_pod<std::int32_t>(f, graph.labels[i]);
        write_pod<std::uint8_t>(f, static_cast<std::uint8_t>(graph.split[i]));
        write_pod<std::uint32_t>(f, static_cast<std::uint32_t>(graph.tokens[i].size()));
        for (const auto& tok : graph.tokens[i]) {
            write_pod<std::uint32_t>(f, static_cast<std::uint32_t>(tok.size()));
            f.write(tok.data(), static_cast<std::streamsize>(tok.size()));
        }
    }
    if (!f) throw DataError("write failed: " + path);
}

TextAttributedGraph load_graph_binary(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open: " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, "TAG1", 4) != 0) throw DataError("bad graph cache header: " + path);
    TextAttributedGraph g;
    g.num_nodes = read_pod<std::uint64_t>(f);
    std::uint64_t m = read_pod<std::uint64_t>(f);
    g.edges.reserve(m);
    for (std::uint64_t e = 0; e < m; ++e) {
        std::uint32_t u = read_pod<std::uint32_t>(f);
        std::uint32_t v = read_pod<std::uint32_t>(f);
        g.edges.emplace_back(u, v);
    }
    g.labels.resize(g.num_nodes);
    g.split.resize(g.num_nodes);
    g.tokens.resize(g.num_nodes);
    for (std::size_t i = 0; i < g.num_nodes; ++i) {
        g.labels[i] = read_pod<std::int32_t>(f);
        g.split[i] = static_cast<Split>(read_pod<std::uint8_t>(f));
        std::uint32_t nt = read_pod<std::uint32_t>(f);
        g.tokens[i].resize(nt);
        for (std::uint32_t t = 0; t < nt; ++t) {
            std::uint32_t len = read_pod<std::uint32_t>(f);
            g.tokens[i][t].resize(len);
            f.read(g.tokens[i][t].data(), len);
        }
    }
    if (!f) throw DataError("truncated graph cache: " + path);
    return g;
}

TextAttributedGraph synthetic_graph(const SyntheticSpec& spec) {
    if (spec.num_classes < 1 || spec.tokens_per_node < 1 || spec.vocab_per_class < 1 ||
        spec.shared_vocab < 1)
        throw DataError("synthetic_graph: counts must be positive");
    if (spec.intra_p < 0 || spec.intra_p > 1 || spec.inter_p < 0 || spec.inter_p > 1)
        throw DataError("synthetic_graph: probabilities must lie in [0,1]");

    const std::size_t n = spec.num_nodes;
    const std::size_t train_total = 20 * static_cast<std::size_t>(spec.num_classes);
    // Need the fixed train allocation plus at least one val and one test node.
    if (n < train_total + 2)
        throw DataError("synthetic_graph: num_nodes=" + std::to_string(n) +
                        " too small for 20 train nodes per class; need at least " +
                        std::to_string(train_total + 2));

    TextAttributedGraph g;
    g.num_nodes = n;
    g.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) g.labels[i] = static_cast<int>(i % spec.num_classes);

    // Edges: one Bernoulli draw per unordered pair, fixed (i, j) order.
    Rng edge_rng(derive_seed(spec.seed, 1, 0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double p = g.labels[i] == g.labels[j] ? spec.intra_p : spec.inter_p;
            if (edge_rng.uniform01() < p)
                g.edges.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
        }
    }

    // Tokens: 70% class vocabulary, 30% shared.
    Rng tok_rng(derive_seed(spec.seed, 2, 0));
    g.tokens.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        g.tokens[i].reserve(spec.tokens_per_node);
        for (int t = 0; t < spec.tokens_per_node; ++t) {
            if (tok_rng.uniform01() < 0.7) {
                auto w = tok_rng.below(static_cast<std::uint64_t>(spec.vocab_per_class));
                g.tokens[i].push_back("c" + std::to_string(g.labels[i]) + "_w" + std::to_string(w));
            } else {
                auto w = tok_rng.below(static_cast<std::uint64_t>(spec.shared_vocab));
                g.tokens[i].push_back("sh_w" + std::to_string(w));
            }
        }
    }

    // Splits: first 20 nodes of each class -> train; of the remaining ids in
    // ascending order, min(500, remainder/2) -> val; rest -> test.
    g.split.assign(n, Split::test);
    std::vector<int> taken(spec.num_classes, 0);
    std::vector<std::uint32_t> rest;
    for (std::size_t i = 0; i < n; ++i) {
        int c = g.labels[i];
        if (taken[c] < 20) {
            g.split[i] = Split::train;
            ++taken[c];
        } else {
            rest.push_back(static_cast<std::uint32_t>(i));
        }
    }
    std::size_t val_count = std::min<std::size_t>(500, rest.size() / 2);
    for (std::size_t r = 0; r < rest.size(); ++r)
        g.split[rest[r]] = r < val_count ? Split::val : Split::test;

    g.validate();
    return g;
}

} // namespace leading
