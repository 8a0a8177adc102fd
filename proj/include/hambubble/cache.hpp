#pragma once

// Bubble files and the on-disk solution cache. Files are JSON with an FNV-1a checksum
// over the canonical dump; numbers are written in shortest round-trip form, so a
// write-read cycle reproduces every double bit for bit.

#include <filesystem>
#include <string>
#include <vector>

#include "hambubble/bubble.hpp"
#include "json.hpp"

namespace hambubble {

std::uint64_t fnv1a(const std::string& bytes);

/// Hex digest of (N, p, q, tol, r_max).
std::string cache_key(int N, double p, double q, double tol, double r_max);

nlohmann::json bubble_to_json(const BubbleSolution& sol);
/// DomainError on malformed content, a checksum mismatch or a different format version.
BubbleSolution bubble_from_json(const nlohmann::json& j);

/// Written to a temporary file in the same directory, then renamed into place.
void write_bubble_file(const std::filesystem::path& path, const BubbleSolution& sol);
BubbleSolution read_bubble_file(const std::filesystem::path& path);

struct CachedBubble {
  BubbleSolution sol;
  bool hit = false;
  std::filesystem::path path;
  std::vector<std::string> warnings;
};

/// Reads the entry for the inputs if present and valid; otherwise solves and publishes it.
CachedBubble cached_ground_state(const std::filesystem::path& dir, const ExponentPair& pair, double tol,
                                 double r_max = kDefaultRMax);

}  // namespace hambubble
