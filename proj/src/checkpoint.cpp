#include <bit>
#include <cstring>
#include <fstream>

#include "precritic/error.hpp"
#include "precritic/policy.hpp"

namespace precritic {

static_assert(std::endian::native == std::endian::little, "checkpoint format is little-endian");

namespace {

constexpr char kMagic[4] = {'P', 'C', 'R', 'T'};
constexpr std::uint32_t kFormatVersion = 1;

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::filesystem::path& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw ParseError(path.string() + ": truncated checkpoint");
  }
  return v;
}

}  // namespace

void save_checkpoint(const CriticPolicy& policy, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot write");
  out.write(kMagic, sizeof(kMagic));
  put(out, kFormatVersion);
  put(out, policy.vocab_hash());
  put(out, policy.feature_hash());
  put(out, static_cast<std::uint64_t>(policy.vocab_size()));
  put(out, static_cast<std::uint64_t>(policy.feature_dim()));
  put(out, policy.version());
  const auto w = policy.raw();
  out.write(reinterpret_cast<const char*>(w.data()),
            static_cast<std::streamsize>(w.size() * sizeof(double)));
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

CriticPolicy load_checkpoint(const std::filesystem::path& path, std::uint64_t vocab_hash,
                             std::uint64_t feature_hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open");
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw ParseError(path.string() + ": not a checkpoint");
  }
  const auto format = get<std::uint32_t>(in, path);
  if (format != kFormatVersion) {
    throw ParseError(path.string() + ": unsupported checkpoint version " + std::to_string(format));
  }
  const auto vh = get<std::uint64_t>(in, path);
  const auto fh = get<std::uint64_t>(in, path);
  if (vh != vocab_hash) throw ValidationError(path.string() + ": vocabulary hash mismatch");
  if (fh != feature_hash) throw ValidationError(path.string() + ": feature spec hash mismatch");
  const auto v = get<std::uint64_t>(in, path);
  const auto f = get<std::uint64_t>(in, path);
  const auto version = get<std::uint64_t>(in, path);
  CriticPolicy policy(v, f, vh, fh);
  policy.set_version(version);
  auto w = policy.raw();
  if (!in.read(reinterpret_cast<char*>(w.data()),
               static_cast<std::streamsize>(w.size() * sizeof(double)))) {
    throw ParseError(path.string() + ": truncated checkpoint");
  }
  if (!policy.all_finite()) throw ValidationError(path.string() + ": non-finite weights");
  return policy;
}

}  // namespace precritic
