#include "qac/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <unordered_set>

#include "parallel.hpp"
#include "qac/error.hpp"
#include "qac/hash.hpp"
#include "qac/normalize.hpp"

namespace qac {
namespace {

std::string_view chomp(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

// Field `index` of a tab-separated line, nullopt if the line is too short.
std::optional<std::string_view> tsv_field(std::string_view line, std::size_t index) {
  std::size_t start = 0;
  for (std::size_t i = 0; i < index; ++i) {
    const auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) return std::nullopt;
    start = tab + 1;
  }
  const auto end = line.find('\t', start);
  return line.substr(start, end == std::string_view::npos ? line.size() - start
                                                           : end - start);
}

bool read_digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
  if (pos + n > s.size()) return false;
  for (std::size_t i = pos; i < pos + n; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return std::from_chars(s.data() + pos, s.data() + pos + n, out).ec == std::errc{};
}

void throw_if_bad(std::istream& in, std::uint64_t line_no) {
  if (in.bad()) throw IngestError("read failure", line_no);
}

}  // namespace

void CountedSuggestions::merge(const CountedSuggestions& other) {
  entries.reserve(entries.size() + other.entries.size());
  for (const auto& [text, n] : other.entries) entries[text] += n;
}

std::uint64_t CountedSuggestions::total() const {
  std::uint64_t sum = 0;
  for (const auto& [_, n] : entries) sum += n;
  return sum;
}

AnchorStats& AnchorStats::operator+=(const AnchorStats& o) {
  lines += o.lines;
  malformed += o.malformed;
  fragments += o.fragments;
  empty += o.empty;
  url_filtered += o.url_filtered;
  accepted += o.accepted;
  return *this;
}

void ingest_anchor_line(std::string_view line, const AnchorOptions& options,
                        CountedSuggestions& counts, AnchorStats& stats) {
  ++stats.lines;
  line = chomp(line);
  std::string_view field;
  if (options.field) {
    const auto f = tsv_field(line, *options.field);
    if (!f) {
      ++stats.malformed;
      return;
    }
    field = *f;
  } else {
    const auto tab = line.rfind('\t');
    field = tab == std::string_view::npos ? line : line.substr(tab + 1);
  }

  for (const auto& fragment : split_anchor(sanitize_utf8(field))) {
    ++stats.fragments;
    auto text = normalize(fragment);
    if (!text) {
      ++stats.empty;
      continue;
    }
    if (options.url_filter && contains_url_substring(*text)) {
      ++stats.url_filtered;
      continue;
    }
    ++stats.accepted;
    counts.add(std::move(*text));
  }
}

AnchorResult ingest_anchors(std::istream& in, const AnchorOptions& options) {
  if (!in) throw IngestError("anchor stream not readable", 0);

  const int workers = detail::worker_count();
  std::vector<CountedSuggestions> local_counts(workers);
  std::vector<AnchorStats> local_stats(workers);

  const std::size_t batch_lines = std::max<std::size_t>(options.batch_lines, 1);
  std::vector<std::string> batch;
  batch.reserve(batch_lines);
  std::uint64_t line_no = 0;
  bool more = true;
  while (more) {
    batch.clear();
    std::string line;
    while (batch.size() < batch_lines && std::getline(in, line)) {
      ++line_no;
      batch.push_back(std::move(line));
    }
    throw_if_bad(in, line_no + 1);
    more = batch.size() == batch_lines;

    const auto n = static_cast<std::ptrdiff_t>(batch.size());
#pragma omp parallel for schedule(dynamic, 1024)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const int w = detail::worker_id();
      ingest_anchor_line(batch[i], options, local_counts[w], local_stats[w]);
    }
  }

  AnchorResult result;
  result.counts = std::move(local_counts[0]);
  result.stats = local_stats[0];
  for (int w = 1; w < workers; ++w) {
    result.counts.merge(local_counts[w]);
    result.stats += local_stats[w];
  }
  return result;
}

// ---------------------------------------------------------------- query log

std::optional<Timestamp> parse_timestamp(std::string_view s) {
  using namespace std::chrono;
  int y, mo, d, h = 0, mi = 0, sec = 0;
  if (s.size() != 10 && s.size() != 19) return std::nullopt;
  if (!read_digits(s, 0, 4, y) || s[4] != '-' || !read_digits(s, 5, 2, mo) ||
      s[7] != '-' || !read_digits(s, 8, 2, d)) {
    return std::nullopt;
  }
  if (s.size() == 19) {
    if (s[10] != ' ' || !read_digits(s, 11, 2, h) || s[13] != ':' ||
        !read_digits(s, 14, 2, mi) || s[16] != ':' || !read_digits(s, 17, 2, sec)) {
      return std::nullopt;
    }
    if (h > 23 || mi > 59 || sec > 59) return std::nullopt;
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec};
}

std::string format_timestamp(Timestamp ts) {
  using namespace std::chrono;
  const auto days = floor<std::chrono::days>(ts);
  const year_month_day ymd{days};
  const hh_mm_ss tod{ts - days};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02d:%02d:%02d",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<int>(tod.hours().count()),
                static_cast<int>(tod.minutes().count()),
                static_cast<int>(tod.seconds().count()));
  return buf;
}

QueryLogReader::QueryLogReader(std::istream& in) : in_(in) {
  if (!in_) throw IngestError("query log stream not readable", 0);
}

bool QueryLogReader::next(QueryRecord& out) {
  if (!header_read_) {
    header_read_ = true;
    if (!std::getline(in_, line_)) {
      throw_if_bad(in_, 1);
      return false;
    }
    ++line_no_;
  }
  while (std::getline(in_, line_)) {
    ++line_no_;
    ++rows_;
    const auto line = chomp(line_);
    const auto user = tsv_field(line, 0);
    const auto query = tsv_field(line, 1);
    const auto time = tsv_field(line, 2);
    if (!user || !query || !time || user->empty()) {
      ++skipped_;
      continue;
    }
    const auto ts = parse_timestamp(*time);
    if (!ts) {
      ++skipped_;
      continue;
    }
    out.user_id.assign(*user);
    out.query = sanitize_utf8(*query);
    out.timestamp = *ts;
    return true;
  }
  throw_if_bad(in_, line_no_ + 1);
  return false;
}

std::vector<QueryRecord> read_query_log(std::istream& in, std::uint64_t* skipped) {
  QueryLogReader reader(in);
  std::vector<QueryRecord> records;
  QueryRecord rec;
  while (reader.next(rec)) records.push_back(rec);
  if (skipped) *skipped = reader.skipped();
  return records;
}

PoolAssigner hashed_pool(const SplitSpec& spec) {
  return [seed = spec.seed, fraction = spec.test_user_fraction](std::string_view user) {
    return unit_hash(seed, user) < fraction;
  };
}

SplitStats& SplitStats::operator+=(const SplitStats& o) {
  records += o.records;
  train += o.train;
  test += o.test;
  discarded += o.discarded;
  empty += o.empty;
  url_filtered += o.url_filtered;
  return *this;
}

namespace {

struct SplitAccumulator {
  CountedSuggestions train;
  std::unordered_set<std::string> test;
  SplitStats stats;
};

void split_record(const QueryRecord& rec, const SplitSpec& spec,
                  const PoolAssigner& pool, SplitAccumulator& acc) {
  ++acc.stats.records;
  const bool test_user = pool(rec.user_id);
  const bool before = rec.timestamp < spec.cutoff;
  if (test_user == before) {
    ++acc.stats.discarded;
    return;
  }
  auto text = normalize(rec.query);
  if (!text) {
    ++acc.stats.empty;
    return;
  }
  if (contains_url_substring(*text)) {
    ++acc.stats.url_filtered;
    return;
  }
  if (test_user) {
    ++acc.stats.test;
    acc.test.insert(std::move(*text));
  } else {
    ++acc.stats.train;
    acc.train.add(std::move(*text));
  }
}

void split_batch(std::span<const QueryRecord> records, const SplitSpec& spec,
                 const PoolAssigner& pool, std::vector<SplitAccumulator>& local) {
  const auto n = static_cast<std::ptrdiff_t>(records.size());
#pragma omp parallel for schedule(dynamic, 1024)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    split_record(records[i], spec, pool, local[detail::worker_id()]);
  }
}

TrainTestSplit finish(std::vector<SplitAccumulator>& local) {
  TrainTestSplit out;
  std::unordered_set<std::string> test;
  for (auto& acc : local) {
    out.train.merge(acc.train);
    out.stats += acc.stats;
    test.merge(acc.test);
  }
  out.test.assign(test.begin(), test.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace

TrainTestSplit split_train_test(std::span<const QueryRecord> records,
                                const SplitSpec& spec, const PoolAssigner& pool) {
  std::vector<SplitAccumulator> local(detail::worker_count());
  split_batch(records, spec, pool, local);
  return finish(local);
}

TrainTestSplit split_train_test(std::span<const QueryRecord> records,
                                const SplitSpec& spec) {
  return split_train_test(records, spec, hashed_pool(spec));
}

TrainTestSplit split_train_test(QueryLogReader& reader, const SplitSpec& spec,
                                std::size_t batch_records) {
  const auto pool = hashed_pool(spec);
  std::vector<SplitAccumulator> local(detail::worker_count());
  std::vector<QueryRecord> batch(std::max<std::size_t>(batch_records, 1));
  for (;;) {
    std::size_t n = 0;
    while (n < batch.size() && reader.next(batch[n])) ++n;
    split_batch(std::span(batch).first(n), spec, pool, local);
    if (n < batch.size()) break;
  }
  return finish(local);
}

// ---------------------------------------------------------------- filters

CountedSuggestions apply_threshold(const CountedSuggestions& counted,
                                   std::uint64_t min_count) {
  CountedSuggestions out;
  for (const auto& [text, n] : counted.entries) {
    if (n >= min_count) out.entries.emplace(text, n);
  }
  return out;
}

CountedSuggestions apply_denylist(const CountedSuggestions& counted,
                                  std::span<const std::string> deny) {
  CountedSuggestions out;
  for (const auto& [text, n] : counted.entries) {
    const bool hit = std::any_of(deny.begin(), deny.end(), [&](const std::string& d) {
      return text.find(d) != std::string::npos;
    });
    if (!hit) out.entries.emplace(text, n);
  }
  return out;
}

std::vector<std::string> read_denylist(std::istream& in) {
  if (!in) throw IngestError("deny list not readable", 0);
  std::vector<std::string> out;
  std::string line;
  std::uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = chomp(line);
    if (!view.empty() && view.front() == '#') continue;
    if (auto phrase = normalize(sanitize_utf8(view))) out.push_back(std::move(*phrase));
  }
  throw_if_bad(in, line_no + 1);
  return out;
}

std::string denylist_digest(std::span<const std::string> deny) {
  if (deny.empty()) return {};
  std::vector<std::string> sorted(deny.begin(), deny.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& phrase : sorted) {
    h = fnv1a64(phrase, h);
    h = fnv1a64(std::string_view("\n", 1), h);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace qac
