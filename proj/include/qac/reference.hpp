#pragma once

// Serial, straightforward implementations of the parallel and indexed code
// paths. Tests compare against these; the benchmark measures against them.
// Nothing here shares code with the paths it checks beyond normalize().

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qac/evaluate.hpp"
#include "qac/index.hpp"
#include "qac/ingest.hpp"

namespace qac::reference {

/// One map, one line at a time.
AnchorResult ingest_anchors_serial(std::istream& in, const AnchorOptions& options = {});

TrainTestSplit split_train_test_serial(std::span<const QueryRecord> records,
                                       const SplitSpec& spec, const PoolAssigner& pool);

std::vector<Suggestion> to_suggestions(const CountedSuggestions& counted);

/// Filter by prefix, sort by (count desc, text asc), truncate to k.
std::vector<Suggestion> brute_force_lookup(std::span<const Suggestion> entries,
                                           std::string_view prefix, std::size_t k);

/// Probe generation written independently of make_probes().
std::vector<std::string> probes_for(std::string_view target);

/// Whole protocol against a linear scan, condition-major loops.
EvalReport evaluate_brute_force(std::span<const Suggestion> entries,
                                std::span<const std::string> test_queries, std::size_t k,
                                MissPolicy policy = MissPolicy::kZero);

/// Same index as evaluate(), single thread.
EvalReport evaluate_serial(const SuggestIndex& index, std::span<const std::string> test_queries,
                           std::size_t k, MissPolicy policy = MissPolicy::kZero);

}  // namespace qac::reference
