#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace qac {

/// Multiset of normalized suggestion strings.
struct CountedSuggestions {
  std::unordered_map<std::string, std::uint64_t> entries;

  void add(std::string text, std::uint64_t n = 1) { entries[std::move(text)] += n; }
  void merge(const CountedSuggestions& other);
  std::uint64_t total() const;
  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }

  friend bool operator==(const CountedSuggestions&, const CountedSuggestions&) = default;
};

// ---------------------------------------------------------------- anchors

struct AnchorOptions {
  /// Zero-based tab-separated column holding the anchor text; nullopt selects
  /// the last column of each line.
  std::optional<std::size_t> field;
  bool url_filter = true;
  /// Lines per parallel batch.
  std::size_t batch_lines = 1 << 16;
};

struct AnchorStats {
  std::uint64_t lines = 0;
  std::uint64_t malformed = 0;     // missing the selected column
  std::uint64_t fragments = 0;     // split_anchor output, before normalize
  std::uint64_t empty = 0;         // fragments that normalized to nothing
  std::uint64_t url_filtered = 0;
  std::uint64_t accepted = 0;

  AnchorStats& operator+=(const AnchorStats& o);
  friend bool operator==(const AnchorStats&, const AnchorStats&) = default;
};

struct AnchorResult {
  CountedSuggestions counts;
  AnchorStats stats;
};

/// Counts every cleaned anchor fragment in a tab-separated stream. Batches of
/// lines are processed by all OpenMP workers into per-worker tables that are
/// merged at the end; the result does not depend on the worker count.
AnchorResult ingest_anchors(std::istream& in, const AnchorOptions& options = {});

/// Per-line kernel shared by the parallel and serial paths.
void ingest_anchor_line(std::string_view line, const AnchorOptions& options,
                        CountedSuggestions& counts, AnchorStats& stats);

// ---------------------------------------------------------------- query log

using Timestamp = std::chrono::sys_seconds;

/// Parses "YYYY-MM-DD HH:MM:SS" or a bare "YYYY-MM-DD" (midnight).
std::optional<Timestamp> parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp ts);

struct QueryRecord {
  std::string user_id;
  std::string query;  // sanitized UTF-8, not yet normalized
  Timestamp timestamp;
};

/// Streams an AOL-style log: header line, then
/// AnonID \t Query \t QueryTime \t ItemRank \t ClickURL.
/// Rows with an empty user id or an unparseable time are counted and skipped.
class QueryLogReader {
 public:
  explicit QueryLogReader(std::istream& in);

  /// Fills `out` with the next good record; false at end of stream.
  bool next(QueryRecord& out);

  std::uint64_t rows() const { return rows_; }
  std::uint64_t skipped() const { return skipped_; }

 private:
  std::istream& in_;
  std::string line_;
  std::uint64_t line_no_ = 0;
  std::uint64_t rows_ = 0;
  std::uint64_t skipped_ = 0;
  bool header_read_ = false;
};

/// Drains a reader into memory.
std::vector<QueryRecord> read_query_log(std::istream& in, std::uint64_t* skipped = nullptr);

struct SplitSpec {
  /// Midnight UTC, 8 May 2006: the AOL log's train/test boundary.
  Timestamp cutoff = std::chrono::sys_days{std::chrono::year{2006} / 5 / 8};
  double test_user_fraction = 0.01;
  std::uint64_t seed = 20060508;
};

/// Decides whether a user id belongs to the held-out test pool.
using PoolAssigner = std::function<bool(std::string_view user_id)>;

/// Seeded hash assignment: test iff unit_hash(seed, user) < fraction.
PoolAssigner hashed_pool(const SplitSpec& spec);

struct SplitStats {
  std::uint64_t records = 0;
  std::uint64_t train = 0;         // counted into the training multiset
  std::uint64_t test = 0;          // test-side occurrences before dedup
  std::uint64_t discarded = 0;     // wrong side of the cutoff for the pool
  std::uint64_t empty = 0;
  std::uint64_t url_filtered = 0;

  SplitStats& operator+=(const SplitStats& o);
  friend bool operator==(const SplitStats&, const SplitStats&) = default;
};

struct TrainTestSplit {
  CountedSuggestions train;
  std::vector<std::string> test;  // deduplicated, sorted
  SplitStats stats;
};

/// Train = train-pool users strictly before the cutoff (with multiplicity).
/// Test = distinct queries of test-pool users at or after the cutoff.
TrainTestSplit split_train_test(std::span<const QueryRecord> records,
                                const SplitSpec& spec);
TrainTestSplit split_train_test(std::span<const QueryRecord> records,
                                const SplitSpec& spec, const PoolAssigner& pool);

/// Streaming variant; reads the log in batches so it never holds it whole.
TrainTestSplit split_train_test(QueryLogReader& reader, const SplitSpec& spec,
                                std::size_t batch_records = 1 << 16);

// ---------------------------------------------------------------- filters

CountedSuggestions apply_threshold(const CountedSuggestions& counted,
                                   std::uint64_t min_count);

/// Drops every suggestion containing any deny phrase as a substring.
CountedSuggestions apply_denylist(const CountedSuggestions& counted,
                                  std::span<const std::string> deny);

/// One phrase per line, `#` lines and blank lines ignored; phrases are
/// normalized like suggestions.
std::vector<std::string> read_denylist(std::istream& in);

/// Order-independent digest of a deny list, hex encoded; "" when empty.
std::string denylist_digest(std::span<const std::string> deny);

}  // namespace qac
