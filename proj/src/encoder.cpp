#include "leading/encoder.hpp"

#include "leading/errors.hpp"
#include "leading/rng.hpp"
#include "leading/tensor_io.hpp"

#include <cmath>
#include <stdexcept>

namespace leading {

void EncoderConfig::validate() const {
    if (vocab_size < 1 || d_emb < 1 || hidden < 1 || d_out < 1)
        throw DataError("encoder config: all dimensions must be >= 1");
}

std::uint32_t hash_token(std::string_view token, std::size_t vocab_size) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : token) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return static_cast<std::uint32_t>(h % vocab_size);
}

EncoderParams init_params(const EncoderConfig& cfg) {
    cfg.validate();
    EncoderParams p;
    p.cfg = cfg;
    Rng rng(cfg.init_seed);
    double s = cfg.init_scale;
    p.token_table = random_uniform(cfg.vocab_size, cfg.d_emb, -s, s, rng);
    p.w1 = random_uniform(cfg.d_emb, cfg.hidden, -s, s, rng);
    p.b1 = DenseMatrix(1, cfg.hidden);
    p.w2 = random_uniform(cfg.hidden, cfg.d_out, -s, s, rng);
    p.b2 = DenseMatrix(1, cfg.d_out);
    return p;
}

namespace {

double activate(double z, Activation act) {
    return act == Activation::relu ? (z > 0.0 ? z : 0.0) : std::tanh(z);
}

double activate_grad(double z, double a, Activation act) {
    return act == Activation::relu ? (z > 0.0 ? 1.0 : 0.0) : 1.0 - a * a;
}

template <typename RowAt>
std::pair<DenseMatrix, ActivationCache> forward(const EncoderParams& p, std::size_t n,
                                                RowAt&& row_at, bool keep_cache) {
    const auto& cfg = p.cfg;
    ActivationCache cache;
    cache.token_indices.resize(n);
    cache.pooled = DenseMatrix(n, cfg.d_emb);
    cache.pre_hidden = DenseMatrix(n, cfg.hidden);
    cache.hidden_act = DenseMatrix(n, cfg.hidden);
    DenseMatrix out(n, cfg.d_out);

    for (std::size_t i = 0; i < n; ++i) {
        const std::vector<std::string>& seq = row_at(i);
        auto& idx = cache.token_indices[i];
        idx.reserve(seq.size());
        auto pooled = cache.pooled.row(i);
        for (const auto& tok : seq) {
            std::uint32_t t = hash_token(tok, cfg.vocab_size);
            idx.push_back(t);
            const auto trow = p.token_table.row(t);
            for (std::size_t d = 0; d < cfg.d_emb; ++d) pooled[d] += trow[d];
        }
        if (!seq.empty()) {
            double inv = 1.0 / static_cast<double>(seq.size());
            for (std::size_t d = 0; d < cfg.d_emb; ++d) pooled[d] *= inv;
        }

        auto pre = cache.pre_hidden.row(i);
        auto act = cache.hidden_act.row(i);
        for (std::size_t hcol = 0; hcol < cfg.hidden; ++hcol) {
            double z = p.b1(0, hcol);
            for (std::size_t d = 0; d < cfg.d_emb; ++d) z += pooled[d] * p.w1(d, hcol);
            pre[hcol] = z;
            act[hcol] = activate(z, cfg.activation);
        }

        auto orow = out.row(i);
        for (std::size_t o = 0; o < cfg.d_out; ++o) {
            double z = p.b2(0, o);
            for (std::size_t hcol = 0; hcol < cfg.hidden; ++hcol) z += act[hcol] * p.w2(hcol, o);
            orow[o] = z;
        }
    }
    if (!keep_cache) cache = ActivationCache{};
    return {std::move(out), std::move(cache)};
}

} // namespace

DenseMatrix encode(const EncoderParams& params, const TokenSeqs& seqs) {
    return forward(params, seqs.size(), [&](std::size_t i) -> const std::vector<std::string>& {
               return seqs[i];
           }, false)
        .first;
}

DenseMatrix encode_ids(const EncoderParams& params, const TokenSeqs& all_tokens,
                       const std::vector<std::uint32_t>& ids) {
    return forward(params, ids.size(), [&](std::size_t i) -> const std::vector<std::string>& {
               return all_tokens[ids[i]];
           }, false)
        .first;
}

std::pair<DenseMatrix, ActivationCache> encode_with_cache(const EncoderParams& params,
                                                          const TokenSeqs& seqs) {
    return forward(params, seqs.size(), [&](std::size_t i) -> const std::vector<std::string>& {
        return seqs[i];
    }, true);
}

std::pair<DenseMatrix, ActivationCache> encode_ids_with_cache(const EncoderParams& params,
                                                              const TokenSeqs& all_tokens,
                                                              const std::vector<std::uint32_t>& ids) {
    return forward(params, ids.size(), [&](std::size_t i) -> const std::vector<std::string>& {
        return all_tokens[ids[i]];
    }, true);
}

EncoderGrads backward(const EncoderParams& p, const ActivationCache& cache,
                      const DenseMatrix& grad_output) {
    const auto& cfg = p.cfg;
    std::size_t n = cache.rows();
    if (grad_output.rows() != n || grad_output.cols() != cfg.d_out)
        throw std::invalid_argument("encoder backward: grad_output shape does not match cache");

    EncoderGrads g;
    g.token_table = DenseMatrix(cfg.vocab_size, cfg.d_emb);
    g.w1 = DenseMatrix(cfg.d_emb, cfg.hidden);
    g.b1 = DenseMatrix(1, cfg.hidden);
    g.w2 = DenseMatrix(cfg.hidden, cfg.d_out);
    g.b2 = DenseMatrix(1, cfg.d_out);

    std::vector<double> grad_act(cfg.hidden), grad_pre(cfg.hidden), grad_pool(cfg.d_emb);
    for (std::size_t i = 0; i < n; ++i) {
        const auto gout = grad_output.row(i);
        const auto act = cache.hidden_act.row(i);
        const auto pre = cache.pre_hidden.row(i);
        const auto pooled = cache.pooled.row(i);

        for (std::size_t o = 0; o < cfg.d_out; ++o) {
            g.b2(0, o) += gout[o];
            for (std::size_t hcol = 0; hcol < cfg.hidden; ++hcol)
                g.w2(hcol, o) += act[hcol] * gout[o];
        }
        for (std::size_t hcol = 0; hcol < cfg.hidden; ++hcol) {
            double s = 0.0;
            for (std::size_t o = 0; o < cfg.d_out; ++o) s += gout[o] * p.w2(hcol, o);
            grad_act[hcol] = s;
            grad_pre[hcol] = s * activate_grad(pre[hcol], act[hcol], cfg.activation);
            g.b1(0, hcol) += grad_pre[hcol];
        }
        for (std::size_t d = 0; d < cfg.d_emb; ++d) {
            double s = 0.0;
            for (std::size_t hcol = 0; hcol < cfg.hidden; ++hcol) {
                g.w1(d, hcol) += pooled[d] * grad_pre[hcol];
                s += grad_pre[hcol] * p.w1(d, hcol);
            }
            grad_pool[d] = s;
        }
        const auto& idx = cache.token_indices[i];
        if (!idx.empty()) {
            double inv = 1.0 / static_cast<double>(idx.size());
            for (std::uint32_t t : idx) {
                auto trow = g.token_table.row(t);
                for (std::size_t d = 0; d < cfg.d_emb; ++d) trow[d] += inv * grad_pool[d];
            }
        }
    }
    return g;
}

namespace {

struct CoordRef {
    const char* name;
    DenseMatrix EncoderParams::*member;
    DenseMatrix EncoderGrads::*grad_member;
};

constexpr CoordRef kTensors[] = {
    {"token_table", &EncoderParams::token_table, &EncoderGrads::token_table},
    {"w1", &EncoderParams::w1, &EncoderGrads::w1},
    {"b1", &EncoderParams::b1, &EncoderGrads::b1},
    {"w2", &EncoderParams::w2, &EncoderGrads::w2},
    {"b2", &EncoderParams::b2, &EncoderGrads::b2},
};

} // namespace

double finite_difference_check(const EncoderParams& params, const TokenSeqs& seqs,
                               const LossClosure& loss, double epsilon,
                               std::uint64_t sample_seed) {
    auto [out, cache] = encode_with_cache(params, seqs);
    auto [loss0, gout] = loss(out);
    (void)loss0;
    EncoderGrads grads = backward(params, cache, gout);

    EncoderParams work = params;
    Rng rng(sample_seed);
    double max_rel = 0.0;
    for (const auto& t : kTensors) {
        DenseMatrix& w = work.*(t.member);
        const DenseMatrix& g = grads.*(t.grad_member);
        std::size_t total = w.size();
        std::size_t samples = std::max<std::size_t>(1, (total + 19) / 20); // ~5%
        for (std::size_t s = 0; s < samples; ++s) {
            std::size_t c = static_cast<std::size_t>(rng.below(total));
            double saved = w.data()[c];
            w.data()[c] = saved + epsilon;
            double lp = loss(encode(work, seqs)).first;
            w.data()[c] = saved - epsilon;
            double lm = loss(encode(work, seqs)).first;
            w.data()[c] = saved;
            double numeric = (lp - lm) / (2.0 * epsilon);
            double analytic = g.data()[c];
            double rel = std::abs(analytic - numeric) / std::max(1e-8, std::abs(numeric));
            max_rel = std::max(max_rel, rel);
        }
    }
    return max_rel;
}

void save_params(const EncoderParams& params, const std::string& path) {
    TensorArchive ar;
    DenseMatrix meta(1, 8);
    meta(0, 0) = static_cast<double>(params.cfg.vocab_size);
    meta(0, 1) = static_cast<double>(params.cfg.d_emb);
    meta(0, 2) = static_cast<double>(params.cfg.hidden);
    meta(0, 3) = static_cast<double>(params.cfg.d_out);
    meta(0, 4) = params.cfg.activation == Activation::relu ? 0.0 : 1.0;
    meta(0, 5) = params.cfg.init_scale;
    meta(0, 6) = static_cast<double>(static_cast<std::uint32_t>(params.cfg.init_seed));
    meta(0, 7) = static_cast<double>(static_cast<std::uint32_t>(params.cfg.init_seed >> 32));
    ar.add("meta", meta);
    ar.add("token_table", params.token_table);
    ar.add("w1", params.w1);
    ar.add("b1", params.b1);
    ar.add("w2", params.w2);
    ar.add("b2", params.b2);
    save_archive(ar, path);
}

EncoderParams load_params(const std::string& path) {
    TensorArchive ar = load_archive(path);
    const DenseMatrix& meta = ar.get("meta");
    EncoderParams p;
    p.cfg.vocab_size = static_cast<std::size_t>(meta(0, 0));
    p.cfg.d_emb = static_cast<std::size_t>(meta(0, 1));
    p.cfg.hidden = static_cast<std::size_t>(meta(0, 2));
    p.cfg.d_out = static_cast<std::size_t>(meta(0, 3));
    p.cfg.activation = meta(0, 4) == 0.0 ? Activation::relu : Activation::tanh;
    p.cfg.init_scale = meta(0, 5);
    p.cfg.init_seed = static_cast<std::uint64_t>(meta(0, 6)) |
                      (static_cast<std::uint64_t>(meta(0, 7)) << 32);
    p.token_table = ar.get("token_table");
    p.w1 = ar.get("w1");
    p.b1 = ar.get("b1");
    p.w2 = ar.get("w2");
    p.b2 = ar.get("b2");
    return p;
}

} // namespace leading
