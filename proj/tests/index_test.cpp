#include "qac/index.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <thread>

#include "qac/reference.hpp"
#include "support.hpp"

namespace qac {
namespace {

CountedSuggestions counted(std::initializer_list<std::pair<const std::string, std::uint64_t>> e) {
  CountedSuggestions c;
  c.entries = e;
  return c;
}

std::vector<std::string> texts(const std::vector<Suggestion>& results) {
  std::vector<std::string> out;
  for (const auto& s : results) out.push_back(s.text);
  return out;
}

SuggestIndex app_index() {
  return SuggestIndex::build(counted({{"apple", 5}, {"app", 3}, {"application", 3}}), {});
}

TEST(Build, Cardinality) {
  EXPECT_EQ(SuggestIndex::build(counted({{"a", 1}}), {}).size(), 1u);
  EXPECT_EQ(app_index().size(), 3u);
}

TEST(Build, RejectsEmptyAndInvalid) {
  EXPECT_THROW(SuggestIndex::build({}, {}), Error);
  EXPECT_THROW(SuggestIndex::build(counted({{"a", 0}}), {}), Error);
  EXPECT_THROW(SuggestIndex::build(counted({{"", 2}}), {}), Error);
}

TEST(Lookup, Examples) {
  const auto index = app_index();
  EXPECT_EQ(index.lookup("app", 10),
            (std::vector<Suggestion>{{"apple", 5}, {"app", 3}, {"application", 3}}));
  EXPECT_TRUE(index.lookup("zzz", 10).empty());
  EXPECT_EQ(texts(index.lookup("", 2)), (std::vector<std::string>{"apple", "app"}));
}

TEST(Lookup, PrefixSemantics) {
  const auto index = SuggestIndex::build(
      counted({{"george", 2}, {"georgetown", 9}, {"george washington", 4}, {"geo", 1}}), {});
  EXPECT_EQ(texts(index.lookup("george")),
            (std::vector<std::string>{"georgetown", "george washington", "george"}));
  EXPECT_EQ(texts(index.lookup("george ")), (std::vector<std::string>{"george washington"}));
  EXPECT_EQ(index.match_count("geo"), 4u);
  EXPECT_TRUE(index.lookup("george", 0).empty());
  EXPECT_TRUE(index.lookup("georgetownx").empty());
}

TEST(Lookup, CodePointOrderForTies) {
  // "z" (0x7A) sorts before "é" (0xC3 0xA9) by code point.
  const auto index = SuggestIndex::build(counted({{"aé", 1}, {"az", 1}, {"a", 1}}), {});
  EXPECT_EQ(texts(index.lookup("a")), (std::vector<std::string>{"a", "az", "aé"}));
}

void expect_matches_oracle(const SuggestIndex& index, const std::vector<Suggestion>& entries,
                           std::mt19937_64& rng, int prefixes) {
  std::vector<std::string> all;
  for (const auto& e : entries) all.push_back(e.text);
  for (int i = 0; i < prefixes; ++i) {
    const auto p = testing::random_prefix(rng, all);
    for (std::size_t k : {1u, 5u, 10u, 1000u}) {
      ASSERT_EQ(index.lookup(p, k), reference::brute_force_lookup(entries, p, k))
          << "prefix '" << p << "' k " << k;
    }
  }
}

TEST(Lookup, MatchesBruteForceOnRandomIndexes) {
  std::mt19937_64 rng(41);
  for (std::size_t n : {1u, 2u, 63u, 64u, 65u, 129u, 300u, 5000u}) {
    const auto c = testing::random_counted(rng, n, 8, n < 100 ? 3 : 50);
    const auto index = SuggestIndex::build(c, {});
    expect_matches_oracle(index, reference::to_suggestions(c), rng, 200);
  }
}

TEST(Lookup, MonotoneUnderPrefixExtension) {
  std::mt19937_64 rng(43);
  const auto c = testing::random_counted(rng, 3000, 8, 20);
  const auto index = SuggestIndex::build(c, {});
  for (const auto& [target, _] : c.entries) {
    std::size_t prev_rank = SIZE_MAX, prev_size = SIZE_MAX;
    for (std::size_t len = 0; len <= target.size(); ++len) {
      const auto results = index.lookup(std::string_view(target).substr(0, len), 10000);
      const auto it = std::find_if(results.begin(), results.end(),
                                   [&](const Suggestion& s) { return s.text == target; });
      ASSERT_NE(it, results.end());
      const auto rank = static_cast<std::size_t>(it - results.begin());
      ASSERT_LE(rank, prev_rank);
      ASSERT_LE(results.size(), prev_size);
      prev_rank = rank;
      prev_size = results.size();
    }
  }
}

TEST(Lookup, ConcurrentReadersSeeIdenticalResults) {
  std::mt19937_64 rng(47);
  const auto c = testing::random_counted(rng, 5000);
  const auto index = SuggestIndex::build(c, {});
  std::vector<std::string> prefixes = {"", "a", "ab", "b c", "dd", "c"};
  std::vector<std::vector<Suggestion>> expected;
  for (const auto& p : prefixes) expected.push_back(index.lookup(p));

  std::vector<std::thread> threads;
  std::atomic<int> mismatches{0};
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int rep = 0; rep < 500; ++rep) {
        for (std::size_t i = 0; i < prefixes.size(); ++i) {
          if (index.lookup(prefixes[i]) != expected[i]) ++mismatches;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(mismatches, 0);
}

// ------------------------------------------------------------ serialization

std::string saved(const SuggestIndex& index) {
  std::ostringstream out;
  index.save(out);
  return out.str();
}

SuggestIndex loaded(const std::string& bytes) {
  std::istringstream in(bytes);
  return SuggestIndex::load(in);
}

LoadFailure failure_of(const std::string& bytes) {
  try {
    loaded(bytes);
  } catch (const IndexLoadError& e) {
    return e.failure();
  }
  ADD_FAILURE() << "load succeeded";
  return LoadFailure::kIo;
}

TEST(Serialize, RoundTripSmall) {
  IndexMetadata meta{SourceKind::kLog, 3, "00ff00ff00ff00ff", true};
  const auto index = SuggestIndex::build(counted({{"apple", 5}, {"app", 3}, {"application", 3}}), meta);
  const auto copy = loaded(saved(index));
  EXPECT_EQ(copy.metadata(), meta);
  EXPECT_EQ(copy.size(), 3u);
  for (const char* p : {"", "a", "app", "appl", "x"}) {
    for (std::size_t k : {1u, 2u, 10u}) EXPECT_EQ(copy.lookup(p, k), index.lookup(p, k));
  }
  EXPECT_EQ(saved(copy), saved(index));
}

TEST(Serialize, RoundTripLargeRandom) {
  std::mt19937_64 rng(53);
  const auto c = testing::random_counted(rng, 10000);
  const auto index = SuggestIndex::build(c, {});
  const auto copy = loaded(saved(index));
  std::vector<std::string> all;
  for (const auto& [t, _] : c.entries) all.push_back(t);
  for (int i = 0; i < 1000; ++i) {
    const auto p = testing::random_prefix(rng, all);
    ASSERT_EQ(copy.lookup(p, 10), index.lookup(p, 10)) << p;
  }
}

TEST(Serialize, BuildIsByteDeterministic) {
  std::mt19937_64 rng(59);
  const auto c = testing::random_counted(rng, 2000);
  CountedSuggestions shuffled;
  std::vector<std::pair<std::string, std::uint64_t>> items(c.entries.begin(), c.entries.end());
  std::shuffle(items.begin(), items.end(), rng);
  for (auto& [t, n] : items) shuffled.entries.emplace(t, n);
  EXPECT_EQ(saved(SuggestIndex::build(c, {})), saved(SuggestIndex::build(shuffled, {})));
}

TEST(Serialize, DistinctErrorsForDamagedFiles) {
  const auto bytes = saved(app_index());

  EXPECT_EQ(failure_of(bytes.substr(0, bytes.size() - 1)), LoadFailure::kTruncated);
  EXPECT_EQ(failure_of(bytes.substr(0, 30)), LoadFailure::kTruncated);
  EXPECT_EQ(failure_of(bytes.substr(0, 10)), LoadFailure::kTruncated);
  EXPECT_EQ(failure_of(bytes.substr(0, 3)), LoadFailure::kTruncated);
  EXPECT_EQ(failure_of(""), LoadFailure::kTruncated);

  auto flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x20;
  EXPECT_EQ(failure_of(flipped), LoadFailure::kChecksum);

  auto version = bytes;
  version[8] = 9;
  EXPECT_EQ(failure_of(version), LoadFailure::kVersionMismatch);

  auto magic = bytes;
  magic[0] = 'X';
  EXPECT_EQ(failure_of(magic), LoadFailure::kBadMagic);
  EXPECT_EQ(failure_of("hello world, not an index"), LoadFailure::kBadMagic);

  EXPECT_EQ(failure_of(bytes + "x"), LoadFailure::kCorrupt);
}

TEST(Serialize, MissingFileIsIoError) {
  try {
    SuggestIndex::load(std::filesystem::path("/nonexistent/index.qac"));
    FAIL();
  } catch (const IndexLoadError& e) {
    EXPECT_EQ(e.failure(), LoadFailure::kIo);
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

TEST(Serialize, FileRoundTrip) {
  testing::TempDir dir;
  const auto index = app_index();
  index.save(dir / "a.qac");
  EXPECT_EQ(SuggestIndex::load(dir / "a.qac").lookup("a"), index.lookup("a"));
  EXPECT_THROW(index.save(std::filesystem::path("/nonexistent/dir/a.qac")), Error);
}

}  // namespace
}  // namespace qac
