#include "caustica/cache.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <mutex>

namespace caustica {
namespace {

constexpr char kMagic[16] = {'C', 'A', 'U', 'S', 'T', 'I', 'C', 'A', '-', 'C', 'A', 'C', 'H', 'E', 0, 0};
constexpr std::uint32_t kMaxKeyLength = 1u << 16;
constexpr std::uint32_t kMaxValues = 1u << 24;

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 1469598103934665603ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t checksum(std::string_view key, std::span<const double> values) {
  const std::uint64_t h = fnv1a(key.data(), key.size());
  return fnv1a(values.data(), values.size_bytes(), h);
}

template <typename T>
bool read_pod(std::istream& in, T& out) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&out), sizeof(T)));
}

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

}  // namespace

static_assert(std::endian::native == std::endian::little, "cache format assumes little endian");

std::string key_bits(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(v)));
  return buf;
}

ResultCache::ResultCache(std::filesystem::path file) : file_(std::move(file)) { load(); }

void ResultCache::load() {
  std::ifstream in(file_, std::ios::binary);
  if (!in) return;
  char magic[16];
  std::uint32_t version = 0, reserved = 0;
  if (!in.read(magic, sizeof magic) || !read_pod(in, version) || !read_pod(in, reserved) ||
      std::memcmp(magic, kMagic, sizeof magic) != 0) {
    warnings_.push_back("cache: unrecognized header in " + file_.string() + ", ignoring file");
    return;
  }
  if (version != kVersion) {
    warnings_.push_back("cache: version " + std::to_string(version) + " in " + file_.string() +
                        " does not match " + std::to_string(kVersion) + ", ignoring file");
    return;
  }
  file_valid_ = true;
  for (;;) {
    std::uint32_t key_len = 0;
    if (!read_pod(in, key_len)) break;
    if (key_len > kMaxKeyLength) {
      warnings_.push_back("cache: implausible key length, stopping scan");
      ++skipped_;
      break;
    }
    std::string key(key_len, '\0');
    std::uint32_t count = 0;
    if (!in.read(key.data(), key_len) || !read_pod(in, count) || count > kMaxValues) {
      if (in) warnings_.push_back("cache: implausible record size, stopping scan");
      ++skipped_;
      break;
    }
    std::vector<double> values(count);
    std::uint64_t sum = 0;
    if (!in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * sizeof(double))) ||
        !read_pod(in, sum)) {
      warnings_.push_back("cache: truncated record at end of file");
      ++skipped_;
      break;
    }
    if (sum != checksum(key, values)) {
      warnings_.push_back("cache: checksum mismatch for key " + key + ", record ignored");
      ++skipped_;
      continue;
    }
    records_.insert_or_assign(std::move(key), std::move(values));
  }
  for (const auto& w : warnings_) std::cerr << "warning: " << w << '\n';
}

std::optional<std::vector<double>> ResultCache::get(std::string_view key) const {
  std::shared_lock lock(mutex_);
  const auto it = records_.find(std::string(key));
  if (it == records_.end()) {
    misses_.fetch_add(1, std::memory_order_relaxed);
    return std::nullopt;
  }
  hits_.fetch_add(1, std::memory_order_relaxed);
  return it->second;
}

void ResultCache::put(std::string_view key, std::span<const double> values) {
  std::unique_lock lock(mutex_);
  const auto [it, inserted] = records_.try_emplace(std::string(key), values.begin(), values.end());
  if (!inserted) return;
  if (!file_.empty()) append(key, values);
}

void ResultCache::append(std::string_view key, std::span<const double> values) {
  std::ofstream out;
  if (!file_valid_) {
    if (file_.has_parent_path()) std::filesystem::create_directories(file_.parent_path());
    out.open(file_, std::ios::binary | std::ios::trunc);
    if (!out) return;
    out.write(kMagic, sizeof kMagic);
    write_pod(out, kVersion);
    write_pod(out, std::uint32_t{0});
    file_valid_ = true;
    // Records loaded before the rewrite came from a rejected file: none exist.
  } else {
    out.open(file_, std::ios::binary | std::ios::app);
    if (!out) return;
  }
  write_pod(out, static_cast<std::uint32_t>(key.size()));
  out.write(key.data(), static_cast<std::streamsize>(key.size()));
  write_pod(out, static_cast<std::uint32_t>(values.size()));
  out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size_bytes()));
  write_pod(out, checksum(key, values));
}

std::size_t ResultCache::size() const {
  std::shared_lock lock(mutex_);
  return records_.size();
}

}  // namespace caustica
