#pragma once

#include "leading/dense.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace leading {

enum class Activation { relu, tanh };

struct EncoderConfig {
    std::size_t vocab_size = 4096;
    std::size_t d_emb = 16;
    std::size_t hidden = 32;
    std::size_t d_out = 16;
    Activation activation = Activation::relu;
    std::uint64_t init_seed = 1;
    double init_scale = 0.1;

    void validate() const;
};

/// Differentiable bag-of-hashed-tokens encoder: embedding lookup, mean
/// pooling, then a two-layer perceptron. Rows are independent, so output
/// row i depends only on token sequence i.
struct EncoderParams {
    EncoderConfig cfg;
    DenseMatrix token_table; // V x d_emb
    DenseMatrix w1;          // d_emb x hidden
    DenseMatrix b1;          // 1 x hidden
    DenseMatrix w2;          // hidden x d_out
    DenseMatrix b2;          // 1 x d_out
};

struct EncoderGrads {
    DenseMatrix token_table;
    DenseMatrix w1;
    DenseMatrix b1;
    DenseMatrix w2;
    DenseMatrix b2;
};

/// Everything backward() needs to replay one forward pass.
struct ActivationCache {
    std::vector<std::vector<std::uint32_t>> token_indices;
    DenseMatrix pooled;     // n x d_emb
    DenseMatrix pre_hidden; // n x hidden
    DenseMatrix hidden_act; // n x hidden

    std::size_t rows() const { return token_indices.size(); }
};

using TokenSeqs = std::vector<std::vector<std::string>>;

/// FNV-1a 64-bit over the token's UTF-8 bytes, modulo vocab size.
std::uint32_t hash_token(std::string_view token, std::size_t vocab_size);

/// Weights uniform in (-init_scale, init_scale) from init_seed, biases zero.
EncoderParams init_params(const EncoderConfig& cfg);

/// Plain forward pass; retains no state. Empty sequences pool to zero.
DenseMatrix encode(const EncoderParams& params, const TokenSeqs& seqs);

/// Forward over the rows of `all_tokens` named by `ids`.
DenseMatrix encode_ids(const EncoderParams& params, const TokenSeqs& all_tokens,
                       const std::vector<std::uint32_t>& ids);

/// Bit-identical outputs to encode(), plus the backward-replay cache.
std::pair<DenseMatrix, ActivationCache> encode_with_cache(const EncoderParams& params,
                                                          const TokenSeqs& seqs);
std::pair<DenseMatrix, ActivationCache> encode_ids_with_cache(const EncoderParams& params,
                                                              const TokenSeqs& all_tokens,
                                                              const std::vector<std::uint32_t>& ids);

/// Exact reverse-mode gradients of sum(grad_output . output) w.r.t. every
/// parameter. Token-table rows accumulate through the 1/len pooling factor.
EncoderGrads backward(const EncoderParams& params, const ActivationCache& cache,
                      const DenseMatrix& grad_output);

/// Maps encoder outputs to (loss, dLoss/doutputs).
using LossClosure = std::function<std::pair<double, DenseMatrix>(const DenseMatrix&)>;

/// Central-difference check on a seeded ~5% coordinate sample per tensor
/// (at least one coordinate each). Returns the max over sampled coordinates
/// of |analytic - numeric| / max(1e-8, |numeric|).
double finite_difference_check(const EncoderParams& params, const TokenSeqs& seqs,
                               const LossClosure& loss, double epsilon,
                               std::uint64_t sample_seed = 12345);

void save_params(const EncoderParams& params, const std::string& path);
EncoderParams load_params(const std::string& path);

} // namespace leading
