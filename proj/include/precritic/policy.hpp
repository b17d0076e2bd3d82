#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <unordered_map>
#include <vector>

#include "precritic/features.hpp"
#include "precritic/rng.hpp"
#include "precritic/vocab.hpp"

namespace precritic {

// Gradient over a subset of weight columns. Columns appear in first-touch
// order, which keeps reductions deterministic.
class SparseGrad {
 public:
  explicit SparseGrad(std::size_t vocab_size = 0) : vocab_size_(vocab_size) {}

  std::size_t vocab_size() const { return vocab_size_; }
  const std::vector<std::uint32_t>& columns() const { return cols_; }
  std::span<const double> column_at(std::size_t slot) const {
    return {vals_.data() + slot * vocab_size_, vocab_size_};
  }

  // Zero-initialized on first access.
  std::span<double> column(std::uint32_t col);

  void add(const SparseGrad& other, double scale = 1.0);
  void scale(double s);
  bool empty() const { return cols_.empty(); }

  // Column-major dense copy with `columns` columns.
  std::vector<double> dense(std::size_t columns) const;

 private:
  std::size_t vocab_size_;
  std::vector<std::uint32_t> cols_;
  std::vector<double> vals_;
  std::unordered_map<std::uint32_t, std::size_t> slot_;
};

// Autoregressive linear-softmax model over a token set whose last id is EOS.
// The next-token logits at a prefix are W * [features ; bag(prefix) ; last(prefix)],
// where bag(prefix) is the 0/1 indicator of tokens already emitted and
// last(prefix) the one-hot of the most recent token (zero for the empty prefix).
class CriticPolicy {
 public:
  CriticPolicy() = default;
  CriticPolicy(std::size_t vocab_size, std::size_t feature_dim, std::uint64_t vocab_hash = 0,
               std::uint64_t feature_hash = 0);

  std::size_t vocab_size() const { return vocab_size_; }
  std::size_t feature_dim() const { return feature_dim_; }
  std::size_t columns() const { return feature_dim_ + 2 * vocab_size_; }
  std::size_t bag_column(TokenId token) const { return feature_dim_ + token; }
  std::size_t last_column(TokenId token) const { return feature_dim_ + vocab_size_ + token; }
  std::uint64_t vocab_hash() const { return vocab_hash_; }
  std::uint64_t feature_hash() const { return feature_hash_; }
  std::uint64_t version() const { return version_; }
  void set_version(std::uint64_t v) { version_ = v; }

  TokenId eos() const { return static_cast<TokenId>(vocab_size_ - 1); }

  double weight(TokenId token, std::size_t col) const { return w_[col * vocab_size_ + token]; }
  double& weight(TokenId token, std::size_t col) { return w_[col * vocab_size_ + token]; }
  std::span<const double> column(std::size_t col) const {
    return {w_.data() + col * vocab_size_, vocab_size_};
  }
  std::span<double> raw() { return w_; }
  std::span<const double> raw() const { return w_; }

  // w += scale * g; bumps the version.
  void apply(const SparseGrad& g, double scale);
  bool all_finite() const;
  // Finite check restricted to the columns `g` touches.
  bool finite_in(const SparseGrad& g) const;

  bool operator==(const CriticPolicy&) const = default;

 private:
  std::size_t vocab_size_ = 0;
  std::size_t feature_dim_ = 0;
  std::uint64_t vocab_hash_ = 0;
  std::uint64_t feature_hash_ = 0;
  std::uint64_t version_ = 0;
  std::vector<double> w_;  // column-major: w_[col * vocab_size_ + token]
};

struct CriticOutput {
  std::vector<TokenId> tokens;
  double logprob = 0.0;  // natural log, sum over emitted tokens
};

// Log-probabilities of the next token after `prefix`.
std::vector<double> next_token_logprobs(const CriticPolicy& policy, const FeatureVector& features,
                                        std::span<const TokenId> prefix);

// Ancestral sampling; stops after EOS or at max_len tokens.
CriticOutput sample(const CriticPolicy& policy, const FeatureVector& features, Rng& rng,
                    std::size_t max_len);

// Argmax decoding (ties to the lowest id).
CriticOutput greedy(const CriticPolicy& policy, const FeatureVector& features, std::size_t max_len);

// Teacher-forced log-probability. Throws std::out_of_range on a token
// outside the vocabulary or an empty sequence.
double logprob(const CriticPolicy& policy, const FeatureVector& features,
               std::span<const TokenId> tokens);

struct LogProbGrad {
  double logprob = 0.0;
  SparseGrad grad;  // d logprob / d W
};

LogProbGrad logprob_and_grad(const CriticPolicy& policy, const FeatureVector& features,
                             std::span<const TokenId> tokens);

// Binary checkpoint: magic, format version, vocab hash, feature hash, shape,
// policy version, weights. Loading rejects hash mismatches.
void save_checkpoint(const CriticPolicy& policy, const std::filesystem::path& path);
CriticPolicy load_checkpoint(const std::filesystem::path& path, std::uint64_t vocab_hash,
                             std::uint64_t feature_hash);

}  // namespace precritic
