#include "qac/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <pthread.h>
#include <thread>

namespace qac::cli {
namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  return in;
}

void check_distinct_paths(const BuildConfig& config) {
  namespace fs = std::filesystem;
  auto same = [](const fs::path& a, const fs::path& b) {
    return fs::weakly_canonical(a) == fs::weakly_canonical(b);
  };
  for (const auto& in : config.inputs) {
    if (same(in, config.output) || (config.test_output && same(in, *config.test_output))) {
      throw Error(ErrorKind::kUsage, "output path collides with input " + in.string());
    }
  }
  if (config.test_output && same(config.output, *config.test_output)) {
    throw Error(ErrorKind::kUsage, "index and test-query outputs must differ");
  }
}

int report_error(const std::exception& e, std::ostream& err) {
  err << "error: " << e.what() << '\n';
  if (const auto* q = dynamic_cast<const Error*>(&e)) return exit_code_for(q->kind());
  return kData;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage: return kUsage;
    case ErrorKind::kData: return kData;
    case ErrorKind::kIo: return kIo;
  }
  return kData;
}

std::uint64_t effective_min_count(const BuildConfig& config) {
  if (config.min_count) return *config.min_count;
  return config.source == SourceKind::kAnchor ? kAnchorMinCount : 1;
}

int cmd_build(const BuildConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.inputs.empty()) throw Error(ErrorKind::kUsage, "no input files");
    const auto min_count = effective_min_count(config);
    if (min_count < 1) throw Error(ErrorKind::kUsage, "min-count must be at least 1");
    if (config.source == SourceKind::kLog) {
      if (!config.test_output) throw Error(ErrorKind::kUsage, "log builds need --test-output");
      const double f = config.split.test_user_fraction;
      if (!(f >= 0.0 && f <= 1.0)) throw Error(ErrorKind::kUsage, "test fraction must be in [0, 1]");
    }
    check_distinct_paths(config);

    std::vector<std::string> deny;
    if (config.denylist) {
      auto in = open_input(*config.denylist);
      deny = read_denylist(in);
    }

    CountedSuggestions counted;
    std::vector<std::string> test;
    if (config.source == SourceKind::kAnchor) {
      AnchorOptions options;
      options.field = config.anchor_field;
      options.url_filter = config.url_filter;
      AnchorStats stats;
      for (const auto& path : config.inputs) {
        auto in = open_input(path);
        auto result = ingest_anchors(in, options);
        counted.merge(result.counts);
        stats += result.stats;
      }
      out << "lines " << stats.lines << ", malformed " << stats.malformed << ", fragments "
          << stats.fragments << ", empty " << stats.empty << ", url-filtered "
          << stats.url_filtered << ", accepted " << stats.accepted << '\n';
    } else {
      SplitStats stats;
      std::uint64_t bad_rows = 0;
      for (const auto& path : config.inputs) {
        auto in = open_input(path);
        QueryLogReader reader(in);
        auto split = split_train_test(reader, config.split);
        counted.merge(split.train);
        stats += split.stats;
        bad_rows += reader.skipped();
        test.insert(test.end(), split.test.begin(), split.test.end());
      }
      std::sort(test.begin(), test.end());
      test.erase(std::unique(test.begin(), test.end()), test.end());
      out << "records " << stats.records << ", bad rows " << bad_rows << ", train "
          << stats.train << ", test " << stats.test << " (" << test.size()
          << " unique), discarded " << stats.discarded << ", empty " << stats.empty
          << ", url-filtered " << stats.url_filtered << '\n';
    }

    const auto unique_before = counted.size();
    counted = apply_denylist(apply_threshold(counted, min_count), deny);
    out << "unique " << unique_before << ", kept " << counted.size() << " (min count "
        << min_count << ", " << deny.size() << " deny phrases)\n";
    if (counted.empty()) throw Error(ErrorKind::kData, "empty index after filtering");

    IndexMetadata meta;
    meta.source = config.source;
    meta.min_count = min_count;
    meta.denylist_digest = denylist_digest(deny);
    meta.url_filter = config.source == SourceKind::kLog || config.url_filter;
    const auto index = SuggestIndex::build(counted, meta);
    index.save(config.output);

    if (config.test_output) {
      std::ofstream test_out(*config.test_output, std::ios::binary | std::ios::trunc);
      for (const auto& q : test) test_out << q << '\n';
      test_out.close();
      if (!test_out) throw Error(ErrorKind::kIo, "failed to write " + config.test_output->string());
      out << "wrote " << test.size() << " test queries to " << config.test_output->string() << '\n';
    }
    out << "wrote " << index.size() << " entries to " << config.output.string() << '\n';
    return kOk;
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
}

int cmd_evaluate(const EvaluateConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const auto index = SuggestIndex::load(config.index);
    auto in = open_input(config.test_queries);
    const auto queries = read_test_queries(in);
    const auto report = evaluate(index, queries, config.k, config.miss_policy);
    render_report(report, config.format, out);
    return kOk;
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
}

int cmd_serve(const ServeConfig& config, std::ostream& log,
              const std::function<void(SuggestServer&)>& on_ready) {
  try {
    if (config.service.default_k < 1 || config.service.default_k > config.service.max_k) {
      throw Error(ErrorKind::kUsage, "default k must be in [1, max k]");
    }
    auto index = std::make_shared<const SuggestIndex>(SuggestIndex::load(config.index));
    SuggestService service(config.service);
    service.set_index(index);

    // Block the signals before any server thread exists so only the waiter
    // below receives them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    if (config.handle_signals) pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    SuggestServer server(service, config.server);
    const int port = server.bind();
    const auto& meta = index->metadata();
    log << "serving " << index->size() << " " << to_string(meta.source)
        << " suggestions (min count " << meta.min_count << ", format v" << kIndexFormatVersion
        << ") on http://" << config.server.host << ":" << port << std::endl;

    std::thread waiter;
    std::atomic<bool> signalled{false};
    std::atomic<bool> finished{false};
    if (config.handle_signals) {
      waiter = std::thread([&server, &signalled, &finished, signals] {
        int sig = 0;
        sigwait(&signals, &sig);
        signalled = true;
        // The signal may land before the accept loop starts.
        while (!finished) {
          server.stop();
          std::this_thread::sleep_for(std::chrono::milliseconds(10));
        }
      });
    }
    std::thread ready;
    if (on_ready) {
      ready = std::thread([&server, &on_ready, &finished] {
        while (!server.running() && !finished) std::this_thread::yield();
        if (!finished) on_ready(server);
      });
    }
    server.run();
    finished = true;
    if (ready.joinable()) ready.join();
    if (waiter.joinable()) {
      if (!signalled) pthread_kill(waiter.native_handle(), SIGTERM);
      waiter.join();
    }
    log << "shut down" << std::endl;
    return kOk;
  } catch (const std::exception& e) {
    return report_error(e, log);
  }
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Frequency-ranked query autocompletion from anchor texts or query logs"};
  app.set_config("--config", "", "Read options from a TOML/INI file");
  app.require_subcommand(1);

  BuildConfig build;
  std::string source = "anchor";
  std::string cutoff = "2006-05-08";
  std::vector<std::string> inputs;
  std::string output, test_output, denylist;
  std::size_t anchor_field = 0;
  std::uint64_t min_count = 0;
  bool no_url_filter = false;
  auto* b = app.add_subcommand("build", "Ingest a source and write a suggestion index");
  b->add_option("--source", source, "anchor | log")->check(CLI::IsMember({"anchor", "log"}));
  b->add_option("--input,-i", inputs, "Input file(s)")->required();
  b->add_option("--output,-o", output, "Index file to write")->required();
  auto* min_opt = b->add_option("--min-count", min_count,
                                "Minimum occurrences kept (default 15 anchor, 1 log)")
                      ->check(CLI::PositiveNumber);
  auto* deny_opt = b->add_option("--deny", denylist, "Deny-list file, one phrase per line");
  auto* field_opt = b->add_option("--anchor-field", anchor_field,
                                  "Zero-based tab column with the anchor text (default: last)");
  b->add_flag("--no-url-filter", no_url_filter, "Keep anchor fragments that look like URLs");
  b->add_option("--cutoff", cutoff, "Train/test boundary, YYYY-MM-DD[ HH:MM:SS] UTC")
      ->capture_default_str();
  b->add_option("--test-fraction", build.split.test_user_fraction, "Share of users held out")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  b->add_option("--seed", build.split.seed, "Seed for the user split")->capture_default_str();
  auto* test_opt = b->add_option("--test-output", test_output, "Held-out query file (log only)");

  EvaluateConfig eval;
  std::string index_path, test_path, format = "text", miss = "zero";
  auto* e = app.add_subcommand("evaluate", "Compute MRR over char and word prefixes");
  e->add_option("--index", index_path, "Index file")->required()->envname("QAC_INDEX");
  e->add_option("--test", test_path, "Test queries, one per line")->required();
  e->add_option("-k", eval.k, "Completions per prefix")->check(CLI::PositiveNumber)->capture_default_str();
  e->add_option("--format", format, "text | csv | json")
      ->check(CLI::IsMember({"text", "csv", "json"}))
      ->capture_default_str();
  e->add_option("--misses", miss, "zero | exclude")
      ->check(CLI::IsMember({"zero", "exclude"}))
      ->capture_default_str();

  ServeConfig serve;
  std::string serve_index;
  auto* s = app.add_subcommand("serve", "Serve completions over HTTP");
  s->add_option("--index", serve_index, "Index file")->required()->envname("QAC_INDEX");
  s->add_option("--host", serve.server.host, "Listen address")->envname("QAC_HOST")->capture_default_str();
  s->add_option("--port", serve.server.port, "Listen port")->envname("QAC_PORT")->capture_default_str();
  s->add_option("--default-k", serve.service.default_k, "k when the request omits it")
      ->envname("QAC_DEFAULT_K")
      ->capture_default_str();
  s->add_option("--max-k", serve.service.max_k, "Largest k a request may ask for")
      ->envname("QAC_MAX_K")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& pe) {
    return app.exit(pe, out, err) == 0 ? kOk : kUsage;
  }

  if (b->parsed()) {
    build.source = parse_source_kind(source);
    for (const auto& in : inputs) build.inputs.emplace_back(in);
    build.output = output;
    if (min_opt->count()) build.min_count = min_count;
    if (deny_opt->count()) build.denylist = denylist;
    if (field_opt->count()) build.anchor_field = anchor_field;
    if (test_opt->count()) build.test_output = test_output;
    build.url_filter = !no_url_filter;
    const auto ts = parse_timestamp(cutoff);
    if (!ts) {
      err << "error: bad --cutoff '" << cutoff << "'\n";
      return kUsage;
    }
    build.split.cutoff = *ts;
    return cmd_build(build, out, err);
  }
  if (e->parsed()) {
    eval.index = index_path;
    eval.test_queries = test_path;
    eval.format = parse_report_format(format);
    eval.miss_policy = miss == "zero" ? MissPolicy::kZero : MissPolicy::kExclude;
    return cmd_evaluate(eval, out, err);
  }
  serve.index = serve_index;
  return cmd_serve(serve, err);
}

}  // namespace qac::cli
