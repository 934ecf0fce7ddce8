#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "qac/error.hpp"
#include "qac/ingest.hpp"

namespace qac {

struct Suggestion {
  std::string text;
  std::uint64_t count = 0;

  friend bool operator==(const Suggestion&, const Suggestion&) = default;
};

enum class SourceKind { kAnchor, kLog };

std::string_view to_string(SourceKind kind);
SourceKind parse_source_kind(std::string_view text);  // throws Error(kUsage)

struct IndexMetadata {
  SourceKind source = SourceKind::kAnchor;
  std::uint64_t min_count = 1;
  std::string denylist_digest;
  bool url_filter = true;

  friend bool operator==(const IndexMetadata&, const IndexMetadata&) = default;
};

enum class LoadFailure { kIo, kBadMagic, kVersionMismatch, kTruncated, kChecksum, kCorrupt };

std::string_view to_string(LoadFailure failure);

class IndexLoadError : public Error {
 public:
  IndexLoadError(LoadFailure failure, const std::string& what)
      : Error(failure == LoadFailure::kIo ? ErrorKind::kIo : ErrorKind::kData,
              std::string(to_string(failure)) + ": " + what),
        failure_(failure) {}
  LoadFailure failure() const noexcept { return failure_; }

 private:
  LoadFailure failure_;
};

inline constexpr std::uint32_t kIndexFormatVersion = 1;
inline constexpr std::size_t kDefaultTopK = 10;

/// Immutable prefix index over suggestions.
///
/// Entries are kept sorted by text (byte order, which for UTF-8 is code point
/// order), so the matches of a prefix form one contiguous range. A sparse
/// table over per-block maxima answers "best entry in range" queries, and the
/// top k of a range are extracted best-first by repeatedly splitting the range
/// around its best entry. Ranking is count descending, then text ascending;
/// because the array is text-sorted, the text tie-break is the leftmost
/// position.
///
/// All const member functions are safe to call concurrently.
class SuggestIndex {
 public:
  /// Throws Error(kData) if `counted` is empty or holds an invalid entry.
  static SuggestIndex build(const CountedSuggestions& counted, IndexMetadata meta);

  std::vector<Suggestion> lookup(std::string_view prefix,
                                 std::size_t k = kDefaultTopK) const;

  /// Number of entries that start with `prefix`.
  std::size_t match_count(std::string_view prefix) const;

  void save(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  static SuggestIndex load(std::istream& in);
  static SuggestIndex load(const std::filesystem::path& path);

  const IndexMetadata& metadata() const { return meta_; }
  std::size_t size() const { return counts_.size(); }
  std::string_view text(std::size_t i) const {
    return std::string_view(blob_).substr(offsets_[i], offsets_[i + 1] - offsets_[i]);
  }
  std::uint64_t count(std::size_t i) const { return counts_[i]; }

 private:
  SuggestIndex() = default;
  void finalize();

  // [first, last) of entries starting with prefix.
  std::pair<std::size_t, std::size_t> prefix_range(std::string_view prefix) const;
  bool better(std::size_t a, std::size_t b) const {
    return counts_[a] > counts_[b] || (counts_[a] == counts_[b] && a < b);
  }
  std::size_t best_in(std::size_t first, std::size_t last) const;
  std::size_t scan_best(std::size_t first, std::size_t last) const;

  IndexMetadata meta_;
  std::string blob_;
  std::vector<std::uint64_t> offsets_;  // size() + 1
  std::vector<std::uint64_t> counts_;
  // sparse_[level][b] = best entry in blocks [b, b + 2^level).
  std::vector<std::vector<std::uint32_t>> sparse_;
};

}  // namespace qac
