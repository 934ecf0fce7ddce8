#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qac/evaluate.hpp"
#include "qac/index.hpp"
#include "qac/ingest.hpp"
#include "qac/server.hpp"

namespace qac::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kIo = 3 };

int exit_code_for(ErrorKind kind);

struct BuildConfig {
  SourceKind source = SourceKind::kAnchor;
  std::vector<std::filesystem::path> inputs;
  std::optional<std::uint64_t> min_count;  // 15 for anchors, 1 for logs
  std::optional<std::filesystem::path> denylist;
  std::optional<std::size_t> anchor_field;  // zero-based; last column if unset
  bool url_filter = true;                   // anchors only; logs always filter
  SplitSpec split;
  std::filesystem::path output;
  std::optional<std::filesystem::path> test_output;  // required for logs
};

inline constexpr std::uint64_t kAnchorMinCount = 15;

std::uint64_t effective_min_count(const BuildConfig& config);

int cmd_build(const BuildConfig& config, std::ostream& out, std::ostream& err);

struct EvaluateConfig {
  std::filesystem::path index;
  std::filesystem::path test_queries;
  std::size_t k = kDefaultTopK;
  ReportFormat format = ReportFormat::kText;
  MissPolicy miss_policy = MissPolicy::kZero;
};

int cmd_evaluate(const EvaluateConfig& config, std::ostream& out, std::ostream& err);

struct ServeConfig {
  std::filesystem::path index;
  ServerOptions server;
  ServiceOptions service;
  bool handle_signals = true;
};

/// Loads the index, binds, then blocks serving until SIGINT/SIGTERM (or until
/// `on_ready`'s server is stopped). Load and bind failures return before any
/// socket is opened for serving.
int cmd_serve(const ServeConfig& config, std::ostream& log,
              const std::function<void(SuggestServer&)>& on_ready = {});

/// Parses argv and dispatches build | evaluate | serve.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace qac::cli
