#include "qac/index.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <json.hpp>
#include <limits>
#include <queue>

namespace qac {
namespace {

constexpr std::size_t kBlock = 64;
constexpr std::array<char, 8> kMagic{'Q', 'A', 'C', 'I', 'D', 'X', '\r', '\n'};
constexpr std::size_t kHeaderBytes = 8 + 4 + 8;
constexpr std::size_t kTrailerBytes = 4;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint64_t get_le(std::string_view bytes, std::size_t pos, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
  }
  return v;
}

std::uint32_t crc_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks for multi-gigabyte buffers.
  constexpr std::size_t kChunk = 1u << 30;
  for (std::size_t pos = 0; pos < bytes.size(); pos += kChunk) {
    const auto n = std::min(kChunk, bytes.size() - pos);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + pos),
                static_cast<uInt>(n));
  }
  return static_cast<std::uint32_t>(crc);
}

// Bounds-checked cursor over the payload; overrun means a corrupt file
// because the outer length and checksum have already been verified.
class Reader {
 public:
  Reader(std::string_view bytes, std::size_t pos, std::size_t end)
      : bytes_(bytes), pos_(pos), end_(end) {}

  std::uint64_t u32() { return fixed(4); }
  std::uint64_t u64() { return fixed(8); }
  std::string_view take(std::uint64_t n) {
    need(n);
    auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  bool at_end() const { return pos_ == end_; }

 private:
  std::uint64_t fixed(int width) {
    need(width);
    auto v = get_le(bytes_, pos_, width);
    pos_ += width;
    return v;
  }
  void need(std::uint64_t n) const {
    if (n > end_ - pos_) throw IndexLoadError(LoadFailure::kCorrupt, "payload overrun");
  }

  std::string_view bytes_;
  std::size_t pos_;
  std::size_t end_;
};

nlohmann::json metadata_json(const IndexMetadata& meta) {
  return {{"source", to_string(meta.source)},
          {"min_count", meta.min_count},
          {"denylist_digest", meta.denylist_digest},
          {"url_filter", meta.url_filter}};
}

IndexMetadata metadata_from_json(const nlohmann::json& j) {
  IndexMetadata meta;
  meta.source = parse_source_kind(j.at("source").get<std::string>());
  meta.min_count = j.at("min_count").get<std::uint64_t>();
  meta.denylist_digest = j.at("denylist_digest").get<std::string>();
  meta.url_filter = j.at("url_filter").get<bool>();
  return meta;
}

}  // namespace

std::string_view to_string(SourceKind kind) {
  return kind == SourceKind::kAnchor ? "anchor" : "log";
}

SourceKind parse_source_kind(std::string_view text) {
  if (text == "anchor") return SourceKind::kAnchor;
  if (text == "log") return SourceKind::kLog;
  throw Error(ErrorKind::kUsage, "unknown source kind '" + std::string(text) + "'");
}

std::string_view to_string(LoadFailure failure) {
  switch (failure) {
    case LoadFailure::kIo: return "io error";
    case LoadFailure::kBadMagic: return "not an index file";
    case LoadFailure::kVersionMismatch: return "format version mismatch";
    case LoadFailure::kTruncated: return "truncated index file";
    case LoadFailure::kChecksum: return "checksum mismatch";
    case LoadFailure::kCorrupt: return "corrupt index file";
  }
  return "unknown";
}

SuggestIndex SuggestIndex::build(const CountedSuggestions& counted, IndexMetadata meta) {
  if (counted.empty()) throw Error(ErrorKind::kData, "cannot build an empty index");
  if (counted.size() >= std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorKind::kData, "too many entries for one index");
  }

  std::vector<std::pair<std::string_view, std::uint64_t>> sorted;
  sorted.reserve(counted.size());
  std::size_t bytes = 0;
  for (const auto& [text, n] : counted.entries) {
    if (text.empty() || n == 0) {
      throw Error(ErrorKind::kData, "invalid suggestion entry '" + text + "'");
    }
    sorted.emplace_back(text, n);
    bytes += text.size();
  }
  std::sort(sorted.begin(), sorted.end());

  SuggestIndex index;
  index.meta_ = std::move(meta);
  index.blob_.reserve(bytes);
  index.offsets_.reserve(sorted.size() + 1);
  index.counts_.reserve(sorted.size());
  index.offsets_.push_back(0);
  for (const auto& [text, n] : sorted) {
    index.blob_.append(text);
    index.offsets_.push_back(index.blob_.size());
    index.counts_.push_back(n);
  }
  index.finalize();
  return index;
}

void SuggestIndex::finalize() {
  const std::size_t blocks = (counts_.size() + kBlock - 1) / kBlock;
  sparse_.clear();
  std::vector<std::uint32_t> level0(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    level0[b] = static_cast<std::uint32_t>(
        scan_best(b * kBlock, std::min(counts_.size(), (b + 1) * kBlock)));
  }
  sparse_.push_back(std::move(level0));
  for (std::size_t width = 2; width <= blocks; width *= 2) {
    const auto& prev = sparse_.back();
    std::vector<std::uint32_t> next(blocks - width + 1);
    for (std::size_t b = 0; b < next.size(); ++b) {
      const auto lhs = prev[b];
      const auto rhs = prev[b + width / 2];
      next[b] = better(rhs, lhs) ? rhs : lhs;
    }
    sparse_.push_back(std::move(next));
  }
}

std::size_t SuggestIndex::scan_best(std::size_t first, std::size_t last) const {
  std::size_t best = first;
  for (std::size_t i = first + 1; i < last; ++i) {
    if (counts_[i] > counts_[best]) best = i;
  }
  return best;
}

std::size_t SuggestIndex::best_in(std::size_t first, std::size_t last) const {
  const std::size_t bf = first / kBlock;
  const std::size_t bl = (last - 1) / kBlock;
  if (bl - bf <= 1) return scan_best(first, last);

  std::size_t best = scan_best(first, (bf + 1) * kBlock);
  const std::size_t lo = bf + 1;
  const std::size_t span = bl - lo;
  const auto level = static_cast<std::size_t>(std::bit_width(span) - 1);
  for (std::size_t cand : {std::size_t{sparse_[level][lo]},
                           std::size_t{sparse_[level][bl - (std::size_t{1} << level)]},
                           scan_best(bl * kBlock, last)}) {
    if (better(cand, best)) best = cand;
  }
  return best;
}

std::pair<std::size_t, std::size_t> SuggestIndex::prefix_range(std::string_view prefix) const {
  std::size_t lo = 0, hi = size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (text(mid) < prefix) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  std::size_t first = lo;
  hi = size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (text(mid).starts_with(prefix)) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return {first, lo};
}

std::size_t SuggestIndex::match_count(std::string_view prefix) const {
  const auto [first, last] = prefix_range(prefix);
  return last - first;
}

std::vector<Suggestion> SuggestIndex::lookup(std::string_view prefix, std::size_t k) const {
  std::vector<Suggestion> out;
  const auto [first, last] = prefix_range(prefix);
  if (first == last || k == 0) return out;

  struct Range {
    std::size_t best, first, last;
  };
  auto worse = [this](const Range& a, const Range& b) { return better(b.best, a.best); };
  std::priority_queue<Range, std::vector<Range>, decltype(worse)> heap(worse);
  heap.push({best_in(first, last), first, last});

  out.reserve(std::min(k, last - first));
  while (!heap.empty() && out.size() < k) {
    const Range r = heap.top();
    heap.pop();
    out.push_back({std::string(text(r.best)), counts_[r.best]});
    if (r.first < r.best) heap.push({best_in(r.first, r.best), r.first, r.best});
    if (r.best + 1 < r.last) heap.push({best_in(r.best + 1, r.last), r.best + 1, r.last});
  }
  return out;
}

// ------------------------------------------------------------ serialization

void SuggestIndex::save(std::ostream& out) const {
  std::string payload;
  const auto meta = metadata_json(meta_).dump();
  payload.reserve(4 + meta.size() + 8 + blob_.size() + 12 * size());
  put_u32(payload, static_cast<std::uint32_t>(meta.size()));
  payload.append(meta);
  put_u64(payload, size());
  for (std::size_t i = 0; i < size(); ++i) {
    const auto t = text(i);
    put_u32(payload, static_cast<std::uint32_t>(t.size()));
    payload.append(t);
    put_u64(payload, counts_[i]);
  }

  std::string header(kMagic.begin(), kMagic.end());
  put_u32(header, kIndexFormatVersion);
  put_u64(header, payload.size());

  uLong crc = crc_of(header);
  crc = crc32_combine(crc, crc_of(payload), static_cast<z_off_t>(payload.size()));
  std::string trailer;
  put_u32(trailer, static_cast<std::uint32_t>(crc));

  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  out.write(trailer.data(), static_cast<std::streamsize>(trailer.size()));
  if (!out) throw Error(ErrorKind::kIo, "failed to write index");
}

void SuggestIndex::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  save(out);
  out.close();
  if (!out) throw Error(ErrorKind::kIo, "failed to write " + path.string());
}

SuggestIndex SuggestIndex::load(std::istream& in) {
  if (!in) throw IndexLoadError(LoadFailure::kIo, "stream not readable");
  std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (in.bad()) throw IndexLoadError(LoadFailure::kIo, "read failure");
  const std::string_view view(bytes);

  const auto magic_len = std::min(view.size(), kMagic.size());
  if (std::memcmp(view.data(), kMagic.data(), magic_len) != 0) {
    throw IndexLoadError(LoadFailure::kBadMagic, "magic bytes do not match");
  }
  if (view.size() < kHeaderBytes) {
    throw IndexLoadError(LoadFailure::kTruncated, "header incomplete");
  }
  const auto version = get_le(view, 8, 4);
  if (version != kIndexFormatVersion) {
    throw IndexLoadError(LoadFailure::kVersionMismatch,
                         "file has version " + std::to_string(version) + ", expected " +
                             std::to_string(kIndexFormatVersion));
  }
  const auto payload_len = get_le(view, 12, 8);
  const auto available = view.size() - kHeaderBytes;
  if (available < kTrailerBytes || payload_len > available - kTrailerBytes) {
    throw IndexLoadError(LoadFailure::kTruncated,
                         "expected " + std::to_string(payload_len) + " payload bytes");
  }
  const std::size_t end = kHeaderBytes + payload_len;
  if (view.size() != end + kTrailerBytes) {
    throw IndexLoadError(LoadFailure::kCorrupt, "trailing bytes after checksum");
  }
  if (crc_of(view.substr(0, end)) != get_le(view, end, 4)) {
    throw IndexLoadError(LoadFailure::kChecksum, "crc32 does not match contents");
  }

  Reader r(view, kHeaderBytes, end);
  SuggestIndex index;
  try {
    index.meta_ = metadata_from_json(nlohmann::json::parse(r.take(r.u32())));
  } catch (const nlohmann::json::exception& e) {
    throw IndexLoadError(LoadFailure::kCorrupt, std::string("metadata: ") + e.what());
  } catch (const Error& e) {
    throw IndexLoadError(LoadFailure::kCorrupt, std::string("metadata: ") + e.what());
  }

  const auto n = r.u64();
  if (n == 0 || n >= std::numeric_limits<std::uint32_t>::max() || n > payload_len / 12) {
    throw IndexLoadError(LoadFailure::kCorrupt, "bad entry count");
  }
  index.offsets_.reserve(n + 1);
  index.counts_.reserve(n);
  index.offsets_.push_back(0);
  std::string_view prev;
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto t = r.take(r.u32());
    const auto c = r.u64();
    if (t.empty() || c == 0 || (i > 0 && !(prev < t))) {
      throw IndexLoadError(LoadFailure::kCorrupt, "entry " + std::to_string(i) + " invalid");
    }
    index.blob_.append(t);
    index.offsets_.push_back(index.blob_.size());
    index.counts_.push_back(c);
    prev = t;
  }
  if (!r.at_end()) throw IndexLoadError(LoadFailure::kCorrupt, "unread payload bytes");
  index.finalize();
  return index;
}

SuggestIndex SuggestIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IndexLoadError(LoadFailure::kIo, "cannot open " + path.string());
  return load(in);
}

}  // namespace qac
