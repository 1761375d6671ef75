#pragma once

// Element files and search checkpoints.

#include <cstdint>
#include <string>
#include <vector>

#include "kitaoka/qfield.hpp"

namespace kitaoka {

/// One "a,b,q" element per line; blank lines and '#' comments are skipped.
/// Throws ParseError naming the 1-based line.
std::vector<QuadRat> load_elements(const std::string& path, const FieldCtx& ctx);
std::vector<QuadRat> parse_elements(const std::string& text, const FieldCtx& ctx);

struct UnitRecord {
  std::uint64_t index = 0;
  std::uint64_t nodes = 0, prune_ring = 0, prune_psd = 0, prune_rank = 0, prune_symmetry = 0;
  bool more = false;  // witnesses beyond the stored ones were found
  std::vector<std::vector<std::string>> witnesses;  // row-major "a,b,q" entries
};

struct Checkpoint {
  static constexpr int kVersion = 1;
  std::uint64_t hash = 0;
  std::string mode;  // "first" or "all"
  std::uint64_t units = 0;
  std::vector<UnitRecord> done;
};

/// Writes to path + ".tmp" and renames over path.
void save_checkpoint(const std::string& path, const Checkpoint& cp);
/// Throws ChecksumMismatch if the stored hash or mode differ from the expected
/// ones, ParseError on malformed content.
Checkpoint load_checkpoint(const std::string& path, std::uint64_t expected_hash,
                           const std::string& expected_mode);

}  // namespace kitaoka
