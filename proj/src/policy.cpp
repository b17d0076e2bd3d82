#include "precritic/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace precritic {

std::span<double> SparseGrad::column(std::uint32_t col) {
  auto [it, inserted] = slot_.try_emplace(col, cols_.size());
  if (inserted) {
    cols_.push_back(col);
    vals_.resize(vals_.size() + vocab_size_, 0.0);
  }
  return {vals_.data() + it->second * vocab_size_, vocab_size_};
}

void SparseGrad::add(const SparseGrad& other, double scale) {
  if (vocab_size_ == 0) vocab_size_ = other.vocab_size_;
  for (std::size_t s = 0; s < other.cols_.size(); ++s) {
    auto dst = column(other.cols_[s]);
    auto src = other.column_at(s);
    for (std::size_t v = 0; v < vocab_size_; ++v) dst[v] += scale * src[v];
  }
}

void SparseGrad::scale(double s) {
  for (auto& v : vals_) v *= s;
}

std::vector<double> SparseGrad::dense(std::size_t columns) const {
  std::vector<double> out(columns * vocab_size_, 0.0);
  for (std::size_t s = 0; s < cols_.size(); ++s) {
    std::copy_n(vals_.begin() + s * vocab_size_, vocab_size_,
                out.begin() + cols_[s] * vocab_size_);
  }
  return out;
}

CriticPolicy::CriticPolicy(std::size_t vocab_size, std::size_t feature_dim,
                           std::uint64_t vocab_hash, std::uint64_t feature_hash)
    : vocab_size_(vocab_size),
      feature_dim_(feature_dim),
      vocab_hash_(vocab_hash),
      feature_hash_(feature_hash),
      w_((feature_dim + 2 * vocab_size) * vocab_size, 0.0) {
  if (vocab_size < 2) throw std::invalid_argument("policy needs at least two tokens");
}

void CriticPolicy::apply(const SparseGrad& g, double scale) {
  for (std::size_t s = 0; s < g.columns().size(); ++s) {
    const auto col = g.columns()[s];
    auto src = g.column_at(s);
    double* dst = w_.data() + static_cast<std::size_t>(col) * vocab_size_;
    for (std::size_t v = 0; v < vocab_size_; ++v) dst[v] += scale * src[v];
  }
  ++version_;
}

bool CriticPolicy::all_finite() const {
  return std::all_of(w_.begin(), w_.end(), [](double v) { return std::isfinite(v); });
}

bool CriticPolicy::finite_in(const SparseGrad& g) const {
  for (const auto col : g.columns()) {
    const double* w = w_.data() + static_cast<std::size_t>(col) * vocab_size_;
    if (!std::all_of(w, w + vocab_size_, [](double v) { return std::isfinite(v); })) return false;
  }
  return true;
}

namespace {

// Running logits W*[x ; bag ; last] for one feature vector.
class Decoder {
 public:
  Decoder(const CriticPolicy& policy, const FeatureVector& features)
      : policy_(policy), logits_(policy.vocab_size(), 0.0), in_bag_(policy.vocab_size(), 0) {
    if (features.dim != policy.feature_dim()) {
      throw std::invalid_argument("feature dimension does not match policy");
    }
    const auto v = policy.vocab_size();
    for (std::size_t i = 0; i < features.index.size(); ++i) {
      const auto col = policy.column(features.index[i]);
      const double x = features.value[i];
      for (std::size_t t = 0; t < v; ++t) logits_[t] += x * col[t];
    }
  }

  // Log-softmax of the current logits into `out`.
  void logprobs(std::vector<double>& out) const {
    const double mx = *std::max_element(logits_.begin(), logits_.end());
    double z = 0.0;
    for (double l : logits_) z += std::exp(l - mx);
    const double lse = mx + std::log(z);
    out.resize(logits_.size());
    for (std::size_t t = 0; t < logits_.size(); ++t) out[t] = logits_[t] - lse;
  }

  // Returns true if the token entered the bag for the first time.
  bool push(TokenId token) {
    if (last_) add_column(policy_.last_column(*last_), -1.0);
    add_column(policy_.last_column(token), 1.0);
    last_ = token;
    if (in_bag_[token]) return false;
    in_bag_[token] = 1;
    add_column(policy_.bag_column(token), 1.0);
    return true;
  }

 private:
  void add_column(std::size_t c, double sign) {
    const auto col = policy_.column(c);
    for (std::size_t t = 0; t < logits_.size(); ++t) logits_[t] += sign * col[t];
  }

 private:
  const CriticPolicy& policy_;
  std::vector<double> logits_;
  std::vector<char> in_bag_;
  std::optional<TokenId> last_;
};

void check_tokens(const CriticPolicy& policy, std::span<const TokenId> tokens) {
  if (tokens.empty()) throw std::out_of_range("empty token sequence");
  for (auto t : tokens) {
    if (t >= policy.vocab_size()) {
      throw std::out_of_range("token " + std::to_string(t) + " outside vocabulary of size " +
                              std::to_string(policy.vocab_size()));
    }
  }
}

}  // namespace

std::vector<double> next_token_logprobs(const CriticPolicy& policy, const FeatureVector& features,
                                        std::span<const TokenId> prefix) {
  Decoder dec(policy, features);
  for (auto t : prefix) {
    if (t >= policy.vocab_size()) throw std::out_of_range("prefix token outside vocabulary");
    dec.push(t);
  }
  std::vector<double> lp;
  dec.logprobs(lp);
  return lp;
}

CriticOutput sample(const CriticPolicy& policy, const FeatureVector& features, Rng& rng,
                    std::size_t max_len) {
  Decoder dec(policy, features);
  CriticOutput out;
  std::vector<double> lp;
  while (out.tokens.size() < max_len) {
    dec.logprobs(lp);
    // Inverse-CDF draw; falls back to the last token on rounding.
    const double u = uniform01(rng);
    double acc = 0.0;
    TokenId chosen = static_cast<TokenId>(lp.size() - 1);
    for (std::size_t t = 0; t < lp.size(); ++t) {
      acc += std::exp(lp[t]);
      if (u < acc) {
        chosen = static_cast<TokenId>(t);
        break;
      }
    }
    out.tokens.push_back(chosen);
    out.logprob += lp[chosen];
    if (chosen == policy.eos()) break;
    dec.push(chosen);
  }
  return out;
}

CriticOutput greedy(const CriticPolicy& policy, const FeatureVector& features,
                    std::size_t max_len) {
  Decoder dec(policy, features);
  CriticOutput out;
  std::vector<double> lp;
  while (out.tokens.size() < max_len) {
    dec.logprobs(lp);
    const auto chosen =
        static_cast<TokenId>(std::max_element(lp.begin(), lp.end()) - lp.begin());
    out.tokens.push_back(chosen);
    out.logprob += lp[chosen];
    if (chosen == policy.eos()) break;
    dec.push(chosen);
  }
  return out;
}

double logprob(const CriticPolicy& policy, const FeatureVector& features,
               std::span<const TokenId> tokens) {
  check_tokens(policy, tokens);
  Decoder dec(policy, features);
  std::vector<double> lp;
  double total = 0.0;
  for (auto t : tokens) {
    dec.logprobs(lp);
    total += lp[t];
    dec.push(t);
  }
  return total;
}

LogProbGrad logprob_and_grad(const CriticPolicy& policy, const FeatureVector& features,
                             std::span<const TokenId> tokens) {
  check_tokens(policy, tokens);
  const std::size_t v = policy.vocab_size();
  const std::size_t n = tokens.size();
  Decoder dec(policy, features);

  // delta[k] = onehot(t_k) - softmax_k, the logit gradient at position k.
  std::vector<double> delta(n * v);
  std::vector<std::size_t> first_seen(v, n);
  std::vector<double> lp;
  LogProbGrad out{0.0, SparseGrad(v)};
  for (std::size_t k = 0; k < n; ++k) {
    dec.logprobs(lp);
    const auto t = tokens[k];
    out.logprob += lp[t];
    double* d = delta.data() + k * v;
    for (std::size_t j = 0; j < v; ++j) d[j] = -std::exp(lp[j]);
    d[t] += 1.0;
    if (dec.push(t)) first_seen[t] = k;
  }
  // Suffix sums: a bag column for token b receives every delta after b was emitted.
  std::vector<double> suffix((n + 1) * v, 0.0);
  for (std::size_t k = n; k-- > 0;) {
    for (std::size_t j = 0; j < v; ++j) suffix[k * v + j] = suffix[(k + 1) * v + j] + delta[k * v + j];
  }
  for (std::size_t i = 0; i < features.index.size(); ++i) {
    auto g = out.grad.column(features.index[i]);
    const double x = features.value[i];
    for (std::size_t j = 0; j < v; ++j) g[j] = x * suffix[j];
  }
  for (std::size_t k = 0; k < n; ++k) {
    const auto t = tokens[k];
    if (first_seen[t] != k || k + 1 >= n) continue;
    auto g = out.grad.column(static_cast<std::uint32_t>(policy.bag_column(t)));
    for (std::size_t j = 0; j < v; ++j) g[j] = suffix[(k + 1) * v + j];
  }
  // A previous-token column receives the delta of the position right after it.
  for (std::size_t k = 1; k < n; ++k) {
    auto g = out.grad.column(static_cast<std::uint32_t>(policy.last_column(tokens[k - 1])));
    const double* d = delta.data() + k * v;
    for (std::size_t j = 0; j < v; ++j) g[j] += d[j];
  }
  return out;
}

}  // namespace precritic
