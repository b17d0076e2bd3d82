#pragma once

#include <random>
#include <vector>

#include "precritic/policy.hpp"

namespace testing {

// Small dense instance: 6 tokens, 5 feature dims.
inline precritic::CriticPolicy random_policy(std::uint64_t seed, std::size_t vocab = 6,
                                             std::size_t dim = 5, double scale = 1.0) {
  precritic::CriticPolicy p(vocab, dim);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, scale);
  for (auto& w : p.raw()) w = n(rng);
  return p;
}

inline precritic::FeatureVector random_features(std::uint64_t seed, std::size_t dim = 5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  precritic::FeatureVector fv;
  fv.dim = dim;
  for (std::uint32_t i = 0; i < dim; ++i) {
    if (i == 0 || u(rng) > -0.3) {
      fv.index.push_back(i);
      fv.value.push_back(u(rng));
    }
  }
  return fv;
}

inline std::vector<precritic::TokenId> random_tokens(std::uint64_t seed, std::size_t vocab,
                                                     std::size_t len) {
  std::mt19937_64 rng(seed);
  std::vector<precritic::TokenId> out(len);
  for (auto& t : out) t = static_cast<precritic::TokenId>(rng() % vocab);
  return out;
}

// Central differences of f over every weight.
template <typename F>
std::vector<double> numeric_gradient(precritic::CriticPolicy p, F f, double h = 1e-5) {
  auto w = p.raw();
  std::vector<double> g(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double orig = w[i];
    w[i] = orig + h;
    const double up = f(p);
    w[i] = orig - h;
    const double down = f(p);
    w[i] = orig;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

}  // namespace testing
