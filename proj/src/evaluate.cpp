#include "qac/evaluate.hpp"

#include <cstdio>
#include <istream>
#include <json.hpp>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "qac/normalize.hpp"

namespace qac {

std::string_view to_string(ProbeMode mode) {
  return mode == ProbeMode::kChar ? "char" : "word";
}

std::vector<PrefixProbe> make_probes(std::string_view target) {
  std::vector<PrefixProbe> probes;
  probes.reserve(kConditionCount);
  for (int len = 1; len <= kMaxProbeLength; ++len) {
    probes.push_back({ProbeMode::kChar, len,
                      std::string(target.substr(0, codepoint_prefix_bytes(target, len)))});
  }
  // End of the n-th word is the n-th space (or the end of the query).
  std::size_t end = 0;
  for (int len = 1; len <= kMaxProbeLength; ++len) {
    if (end < target.size()) {
      const auto space = target.find(' ', len == 1 ? 0 : end + 1);
      end = space == std::string_view::npos ? target.size() : space;
    }
    probes.push_back({ProbeMode::kWord, len, std::string(target.substr(0, end))});
  }
  return probes;
}

double reciprocal_rank(std::span<const Suggestion> results, std::string_view target) {
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i].text == target) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

QueryOutcome score_query(const SuggestIndex& index, std::string_view target, std::size_t k) {
  QueryOutcome outcome;
  std::string last_prefix;
  std::vector<Suggestion> results;
  bool have_results = false;
  for (const auto& probe : make_probes(target)) {
    // Saturated probes repeat the previous prefix.
    if (!have_results || probe.prefix != last_prefix) {
      results = index.lookup(probe.prefix, k);
      last_prefix = probe.prefix;
      have_results = true;
    }
    const auto slot = condition_slot(probe.mode, probe.length);
    outcome.rr[slot] = reciprocal_rank(results, target);
    outcome.returned[slot] = static_cast<std::uint32_t>(results.size());
  }
  return outcome;
}

void aggregate(std::span<const QueryOutcome> outcomes, MissPolicy policy, EvalReport& report) {
  for (std::size_t slot = 0; slot < kConditionCount; ++slot) {
    auto& row = report.rows[slot];
    row.mode = slot < kMaxProbeLength ? ProbeMode::kChar : ProbeMode::kWord;
    row.length = static_cast<int>(slot % kMaxProbeLength) + 1;
    double rr_sum = 0.0;
    double returned_sum = 0.0;
    std::uint64_t hits = 0;
    for (const auto& o : outcomes) {
      rr_sum += o.rr[slot];
      returned_sum += o.returned[slot];
      if (o.rr[slot] > 0.0) ++hits;
    }
    const auto n = static_cast<double>(outcomes.size());
    row.query_count = outcomes.size();
    row.hits = hits;
    row.mean_returned = outcomes.empty() ? 0.0 : returned_sum / n;
    if (policy == MissPolicy::kZero) {
      row.mrr = outcomes.empty() ? 0.0 : rr_sum / n;
    } else {
      row.mrr = hits == 0 ? 0.0 : rr_sum / static_cast<double>(hits);
    }
  }
  report.miss_policy = policy;
}

EvalReport evaluate(const SuggestIndex& index, std::span<const std::string> test_queries,
                    std::size_t k, MissPolicy policy) {
  if (test_queries.empty()) throw Error(ErrorKind::kData, "empty test query set");
  if (k == 0) throw Error(ErrorKind::kUsage, "k must be at least 1");

  std::vector<QueryOutcome> outcomes(test_queries.size());
  const auto n = static_cast<std::ptrdiff_t>(test_queries.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    outcomes[i] = score_query(index, test_queries[i], k);
  }

  EvalReport report;
  report.index = index.metadata();
  report.index_entries = index.size();
  report.k = k;
  aggregate(outcomes, policy, report);
  return report;
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "text") return ReportFormat::kText;
  if (text == "csv") return ReportFormat::kCsv;
  if (text == "json") return ReportFormat::kJson;
  throw Error(ErrorKind::kUsage, "unknown report format '" + std::string(text) + "'");
}

void render_report(const EvalReport& report, ReportFormat format, std::ostream& out) {
  char buf[128];
  switch (format) {
    case ReportFormat::kText:
      out << "Prefix  MRR    Returned\n";
      for (const auto& row : report.rows) {
        std::snprintf(buf, sizeof buf, "%d %s  %.3f  %.2f\n", row.length,
                      std::string(to_string(row.mode)).c_str(), row.mrr, row.mean_returned);
        out << buf;
      }
      break;
    case ReportFormat::kCsv:
      out << "mode,length,mrr,mean_returned,n\n";
      for (const auto& row : report.rows) {
        std::snprintf(buf, sizeof buf, "%s,%d,%.17g,%.17g,%llu\n",
                      std::string(to_string(row.mode)).c_str(), row.length, row.mrr,
                      row.mean_returned, static_cast<unsigned long long>(row.query_count));
        out << buf;
      }
      break;
    case ReportFormat::kJson: {
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& row : report.rows) {
        rows.push_back({{"mode", to_string(row.mode)},
                        {"length", row.length},
                        {"mrr", row.mrr},
                        {"mean_returned", row.mean_returned},
                        {"n", row.query_count},
                        {"hits", row.hits}});
      }
      nlohmann::json doc = {
          {"k", report.k},
          {"miss_policy", report.miss_policy == MissPolicy::kZero ? "zero" : "exclude"},
          {"index",
           {{"source", to_string(report.index.source)},
            {"min_count", report.index.min_count},
            {"denylist_digest", report.index.denylist_digest},
            {"url_filter", report.index.url_filter},
            {"entry_count", report.index_entries}}},
          {"rows", rows}};
      out << doc.dump(2) << '\n';
      break;
    }
  }
}

std::string render_report(const EvalReport& report, ReportFormat format) {
  std::ostringstream out;
  render_report(report, format, out);
  return out.str();
}

std::vector<std::string> read_test_queries(std::istream& in) {
  if (!in) throw Error(ErrorKind::kIo, "test query stream not readable");
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  std::string line;
  while (std::getline(in, line)) {
    auto q = normalize(sanitize_utf8(line));
    if (q && seen.insert(*q).second) out.push_back(std::move(*q));
  }
  if (in.bad()) throw Error(ErrorKind::kIo, "failed reading test queries");
  return out;
}

}  // namespace qac
