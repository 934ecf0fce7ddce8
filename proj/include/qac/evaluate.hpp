#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qac/index.hpp"

namespace qac {

enum class ProbeMode { kChar, kWord };

std::string_view to_string(ProbeMode mode);

inline constexpr int kMaxProbeLength = 5;
inline constexpr std::size_t kConditionCount = 2 * kMaxProbeLength;

struct PrefixProbe {
  ProbeMode mode;
  int length;  // 1..5
  std::string prefix;

  friend bool operator==(const PrefixProbe&, const PrefixProbe&) = default;
};

/// Condition slot of (mode, length): char 1..5 first, then word 1..5.
constexpr std::size_t condition_slot(ProbeMode mode, int length) {
  return (mode == ProbeMode::kChar ? 0 : kMaxProbeLength) + (length - 1);
}

/// Ten probes in condition order: the first 1..5 code points and the first
/// 1..5 space-separated words, each saturating at the full query.
std::vector<PrefixProbe> make_probes(std::string_view target);

/// 1 / position of the first exact match of `target`, or 0.0 if absent.
double reciprocal_rank(std::span<const Suggestion> results, std::string_view target);

/// How a query whose target is absent from the returned list enters the mean.
enum class MissPolicy {
  kZero,     // counts as RR 0
  kExclude,  // left out of the MRR mean (kept in mean_returned)
};

struct EvalRow {
  ProbeMode mode;
  int length;
  double mrr = 0.0;
  double mean_returned = 0.0;
  std::uint64_t query_count = 0;
  std::uint64_t hits = 0;  // queries with RR > 0
};

struct EvalReport {
  std::array<EvalRow, kConditionCount> rows;
  IndexMetadata index;
  std::uint64_t index_entries = 0;
  std::size_t k = kDefaultTopK;
  MissPolicy miss_policy = MissPolicy::kZero;
};

/// Per query, per condition: reciprocal rank and number of results returned.
struct QueryOutcome {
  std::array<double, kConditionCount> rr{};
  std::array<std::uint32_t, kConditionCount> returned{};
};

/// Scores one query under all ten conditions.
QueryOutcome score_query(const SuggestIndex& index, std::string_view target, std::size_t k);

/// Runs the ten-condition protocol over the test set. Queries are scored in
/// parallel; the means are summed in query order afterwards, so the report is
/// bit-identical for any worker count. Throws Error(kData) for an empty test
/// set or k == 0.
EvalReport evaluate(const SuggestIndex& index, std::span<const std::string> test_queries,
                    std::size_t k = kDefaultTopK, MissPolicy policy = MissPolicy::kZero);

/// Folds per-query outcomes (in order) into a report's rows.
void aggregate(std::span<const QueryOutcome> outcomes, MissPolicy policy, EvalReport& report);

enum class ReportFormat { kText, kCsv, kJson };

ReportFormat parse_report_format(std::string_view text);  // throws Error(kUsage)

void render_report(const EvalReport& report, ReportFormat format, std::ostream& out);
std::string render_report(const EvalReport& report, ReportFormat format);

/// One query per line; each is normalized, blank results skipped, duplicates
/// kept in first-seen order only once.
std::vector<std::string> read_test_queries(std::istream& in);

}  // namespace qac
