#include "qac/reference.hpp"

#include <algorithm>
#include <istream>
#include <set>

#include "qac/normalize.hpp"

namespace qac::reference {

AnchorResult ingest_anchors_serial(std::istream& in, const AnchorOptions& options) {
  AnchorResult result;
  std::string line;
  while (std::getline(in, line)) {
    ingest_anchor_line(line, options, result.counts, result.stats);
  }
  return result;
}

TrainTestSplit split_train_test_serial(std::span<const QueryRecord> records,
                                       const SplitSpec& spec, const PoolAssigner& pool) {
  TrainTestSplit out;
  std::set<std::string> test;
  for (const auto& rec : records) {
    ++out.stats.records;
    const bool test_user = pool(rec.user_id);
    const bool train_side = !test_user && rec.timestamp < spec.cutoff;
    const bool test_side = test_user && rec.timestamp >= spec.cutoff;
    if (!train_side && !test_side) {
      ++out.stats.discarded;
      continue;
    }
    const auto text = normalize(rec.query);
    if (!text) {
      ++out.stats.empty;
    } else if (contains_url_substring(*text)) {
      ++out.stats.url_filtered;
    } else if (test_side) {
      ++out.stats.test;
      test.insert(*text);
    } else {
      ++out.stats.train;
      out.train.add(*text);
    }
  }
  out.test.assign(test.begin(), test.end());
  return out;
}

std::vector<Suggestion> to_suggestions(const CountedSuggestions& counted) {
  std::vector<Suggestion> out;
  out.reserve(counted.size());
  for (const auto& [text, n] : counted.entries) out.push_back({text, n});
  return out;
}

std::vector<Suggestion> brute_force_lookup(std::span<const Suggestion> entries,
                                           std::string_view prefix, std::size_t k) {
  std::vector<Suggestion> hits;
  for (const auto& e : entries) {
    if (e.text.compare(0, prefix.size(), prefix) == 0) hits.push_back(e);
  }
  std::sort(hits.begin(), hits.end(), [](const Suggestion& a, const Suggestion& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.text < b.text;
  });
  if (hits.size() > k) hits.resize(k);
  return hits;
}

std::vector<std::string> probes_for(std::string_view target) {
  std::vector<std::string> out;
  // Code point boundaries: indices of non-continuation bytes.
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < target.size(); ++i) {
    if ((static_cast<unsigned char>(target[i]) & 0xC0) != 0x80) starts.push_back(i);
  }
  starts.push_back(target.size());
  for (std::size_t n = 1; n <= 5; ++n) {
    out.emplace_back(target.substr(0, starts[std::min(n, starts.size() - 1)]));
  }
  std::vector<std::string> words;
  std::string cur;
  for (char c : target) {
    if (c == ' ') {
      words.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  words.push_back(cur);
  for (std::size_t n = 1; n <= 5; ++n) {
    std::string p;
    for (std::size_t w = 0; w < std::min(n, words.size()); ++w) {
      if (w) p.push_back(' ');
      p += words[w];
    }
    out.push_back(p);
  }
  return out;
}

EvalReport evaluate_brute_force(std::span<const Suggestion> entries,
                                std::span<const std::string> test_queries, std::size_t k,
                                MissPolicy policy) {
  std::vector<std::vector<std::string>> probes;
  for (const auto& q : test_queries) probes.push_back(probes_for(q));

  EvalReport report;
  report.k = k;
  report.index_entries = entries.size();
  report.miss_policy = policy;
  for (std::size_t c = 0; c < kConditionCount; ++c) {
    auto& row = report.rows[c];
    row.mode = c < 5 ? ProbeMode::kChar : ProbeMode::kWord;
    row.length = static_cast<int>(c % 5) + 1;
    double rr_sum = 0, returned_sum = 0;
    std::uint64_t hits = 0;
    for (std::size_t q = 0; q < test_queries.size(); ++q) {
      const auto results = brute_force_lookup(entries, probes[q][c], k);
      returned_sum += static_cast<double>(results.size());
      for (std::size_t pos = 0; pos < results.size(); ++pos) {
        if (results[pos].text == test_queries[q]) {
          rr_sum += 1.0 / static_cast<double>(pos + 1);
          ++hits;
          break;
        }
      }
    }
    const auto n = static_cast<double>(test_queries.size());
    row.query_count = test_queries.size();
    row.hits = hits;
    row.mean_returned = returned_sum / n;
    row.mrr = policy == MissPolicy::kZero ? rr_sum / n
                                          : (hits ? rr_sum / static_cast<double>(hits) : 0.0);
  }
  return report;
}

EvalReport evaluate_serial(const SuggestIndex& index, std::span<const std::string> test_queries,
                           std::size_t k, MissPolicy policy) {
  std::vector<QueryOutcome> outcomes;
  outcomes.reserve(test_queries.size());
  for (const auto& q : test_queries) outcomes.push_back(score_query(index, q, k));
  EvalReport report;
  report.index = index.metadata();
  report.index_entries = index.size();
  report.k = k;
  aggregate(outcomes, policy, report);
  return report;
}

}  // namespace qac::reference
