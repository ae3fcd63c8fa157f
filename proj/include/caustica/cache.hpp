#pragma once

// Persistent store for expensive spectral data (Bessel zeros in a window,
// radial eigenvalues in a window), keyed by a canonical string.
//
// File layout (little endian):
//   header  : 16-byte magic "CAUSTICA-CACHE\0\0", u32 version, u32 reserved
//   record  : u32 key length, key bytes, u32 value count, f64 values,
//             u64 FNV-1a checksum over key bytes and value bytes
// Records with a bad checksum are skipped; a truncated tail ends the scan;
// a header with another version makes the whole file invisible.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace caustica {

class ResultCache {
 public:
  static constexpr std::uint32_t kVersion = 1;

  /// In-memory only.
  ResultCache() = default;
  /// Backed by `file`; existing valid records are loaded.
  explicit ResultCache(std::filesystem::path file);

  ResultCache(const ResultCache&) = delete;
  ResultCache& operator=(const ResultCache&) = delete;

  std::optional<std::vector<double>> get(std::string_view key) const;
  void put(std::string_view key, std::span<const double> values);

  std::size_t size() const;
  std::size_t hits() const noexcept { return hits_.load(); }
  std::size_t misses() const noexcept { return misses_.load(); }
  std::size_t skipped_records() const noexcept { return skipped_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  const std::filesystem::path& path() const noexcept { return file_; }

 private:
  void load();
  void append(std::string_view key, std::span<const double> values);

  std::filesystem::path file_;
  bool file_valid_ = false;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, std::vector<double>> records_;
  mutable std::atomic<std::size_t> hits_{0};
  mutable std::atomic<std::size_t> misses_{0};
  std::size_t skipped_ = 0;
  std::vector<std::string> warnings_;
};

/// Bit-exact text form of a double for use inside cache keys.
std::string key_bits(double v);

}  // namespace caustica
