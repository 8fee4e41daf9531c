#include "vlmc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "vlmc/counts.hpp"
#include "vlmc/error.hpp"
#include "vlmc/io.hpp"
#include "vlmc/sampler.hpp"
#include "vlmc/stats.hpp"

namespace vlmc {

ProbabilisticContextTree reference_tree() {
  auto row = [](double p1) {
    Eigen::VectorXd r(2);
    r << 1.0 - p1, p1;
    return r;
  };
  return ProbabilisticContextTree(Alphabet::binary(),
                                  {{Word{1}, row(0.3)}, {Word{1, 0}, row(0.8)}, {Word{0, 0}, row(0.2)}});
}

ProbabilisticContextTree iid_tree(std::size_t alphabet_size) {
  if (alphabet_size < 2 || alphabet_size > 256) throw PreconditionError("i.i.d. builtin needs 2..256 symbols");
  std::vector<std::string> labels;
  for (std::size_t a = 0; a < alphabet_size; ++a)
    labels.push_back(alphabet_size <= 10 ? std::to_string(a) : "s" + std::to_string(a));
  const Eigen::VectorXd uniform =
      Eigen::VectorXd::Constant(static_cast<Eigen::Index>(alphabet_size), 1.0 / static_cast<double>(alphabet_size));
  std::vector<std::pair<Word, Eigen::VectorXd>> rows;
  for (std::size_t a = 0; a < alphabet_size; ++a) rows.emplace_back(Word{static_cast<Symbol>(a)}, uniform);
  return ProbabilisticContextTree(Alphabet(std::move(labels)), std::move(rows));
}

namespace {

double parse_number(std::string_view text, const std::string& what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw PreconditionError(what + ": not a number '" + std::string(text) + "'");
  return v;
}

std::uint64_t parse_count(std::string_view text, const std::string& what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec == std::errc() && ptr == text.data() + text.size()) return v;
  // Allow 1e5-style integers.
  const double d = parse_number(text, what);
  if (!(d >= 0.0) || d != std::floor(d) || d > 1.8e19)
    throw PreconditionError(what + ": not a non-negative integer '" + std::string(text) + "'");
  return static_cast<std::uint64_t>(d);
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = text.find(sep, start);
    out.push_back(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

ProbabilisticContextTree resolve_tree_source(const std::string& source, const std::string& base_dir) {
  const std::string prefix = "builtin:";
  if (source.rfind(prefix, 0) != 0) {
    std::filesystem::path path(source);
    if (path.is_relative() && !base_dir.empty()) path = std::filesystem::path(base_dir) / path;
    return load_tree(path.string());
  }
  const auto parts = split(std::string_view(source).substr(prefix.size()), ':');
  const std::string_view name = parts[0];
  if (name == "ref" && parts.size() == 1) return reference_tree();
  if (name == "iid" && parts.size() == 1) return iid_tree(2);
  if (name == "iid" && parts.size() == 2) return iid_tree(parse_count(parts[1], "builtin:iid size"));
  if (name == "renewal-const" && parts.size() == 2)
    return renewal_tree(RenewalSpec::constant(parse_number(parts[1], "renewal constant")), 2);
  if (name == "renewal-geom" && parts.size() == 3)
    return renewal_tree(RenewalSpec::geometric(parse_number(parts[1], "renewal c"), parse_number(parts[2], "renewal r")),
                        2);
  throw PreconditionError("unknown builtin tree '" + source + "'");
}

std::vector<Word> minimal_contexts(const ProbabilisticContextTree& pct, std::size_t depth) {
  if (const auto& spec = pct.family()) {
    const ProbabilisticContextTree m = renewal_tree(*spec, depth);
    bool constant = spec->tail == RenewalSpec::Tail::kConstant || spec->r == 1.0;
    for (double q : spec->head) constant = constant && q == spec->c;
    if (constant) return {};
    return m.tree().contexts();
  }
  const std::size_t A = pct.alphabet().size();
  std::map<Word, Eigen::VectorXd> current;
  for (std::size_t i = 0; i < pct.tree().size(); ++i) current.emplace(pct.tree().contexts()[i], pct.row(i));
  bool changed = true;
  while (changed && !current.empty()) {
    changed = false;
    std::map<Word, std::vector<Word>> by_parent;
    for (const auto& [w, row] : current) by_parent[Word(w.begin() + 1, w.end())].push_back(w);
    for (const auto& [parent, children] : by_parent) {
      if (children.size() != A) continue;
      const Eigen::VectorXd& first = current.at(children.front());
      bool same = true;
      for (const auto& c : children) same = same && (current.at(c) - first).cwiseAbs().maxCoeff() <= 1e-12;
      if (!same) continue;
      const Eigen::VectorXd row = first;
      for (const auto& c : children) current.erase(c);
      // The root stands for the i.i.d. law: no context at all.
      if (!parent.empty()) current.emplace(parent, row);
      changed = true;
      break;
    }
  }
  std::vector<Word> out;
  for (const auto& [w, row] : current) out.push_back(w);
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

std::string algorithm_name(Algorithm algo) {
  switch (algo) {
    case Algorithm::kContext:
      return "context";
    case Algorithm::kContextFixed:
      return "context-fixed";
    case Algorithm::kDelta:
      return "delta";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  if (name == "context") return Algorithm::kContext;
  if (name == "context-fixed") return Algorithm::kContextFixed;
  if (name == "delta") return Algorithm::kDelta;
  return std::nullopt;
}

void ExperimentConfig::check() const {
  if (replicas < 1) throw PreconditionError("replicas must be >= 1");
  if (n_grid.empty()) throw PreconditionError("n_grid must not be empty");
  for (std::size_t i = 1; i < n_grid.size(); ++i)
    if (n_grid[i] <= n_grid[i - 1]) throw PreconditionError("n_grid must be strictly increasing");
  if (truncate < 1) throw PreconditionError("truncate must be >= 1");
  if (workers < 1) throw PreconditionError("workers must be >= 1");
  if (algorithm == Algorithm::kDelta)
    delta.check();
  else
    context.check();
}

ExperimentConfig parse_experiment_config(std::istream& is, const std::string& source, const std::string& base_dir) {
  ExperimentConfig cfg;
  std::map<std::string, ContextConfig> context_sections{{"context", {}}, {"context-fixed", {}}};
  std::string section;
  std::map<std::string, std::size_t> seen;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    return PreconditionError(source + ": line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(is, line)) {
    ++line_no;
    std::string_view text = line;
    if (auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw fail("malformed section header");
      section = std::string(trim(text.substr(1, text.size() - 2)));
      if (section != "context" && section != "context-fixed" && section != "delta")
        throw fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw fail("expected key = value");
    const std::string key(trim(text.substr(0, eq)));
    const std::string_view value = trim(text.substr(eq + 1));
    const std::string qualified = section.empty() ? key : section + "." + key;
    if (!seen.emplace(qualified, line_no).second) throw fail("duplicate key '" + qualified + "'");
    try {
      if (section.empty()) {
        if (key == "tree") {
          cfg.tree_source = std::string(value);
        } else if (key == "n_grid") {
          cfg.n_grid.clear();
          for (auto item : split(value, ',')) cfg.n_grid.push_back(parse_count(trim(item), "n_grid"));
        } else if (key == "replicas") {
          cfg.replicas = parse_count(value, key);
        } else if (key == "algorithm") {
          auto algo = parse_algorithm(value);
          if (!algo) throw PreconditionError("unknown algorithm '" + std::string(value) + "'");
          cfg.algorithm = *algo;
        } else if (key == "truncate") {
          cfg.truncate = parse_count(value, key);
        } else if (key == "seed") {
          cfg.seed = parse_count(value, key);
        } else if (key == "workers") {
          cfg.workers = parse_count(value, key);
        } else if (key == "record_wall_time") {
          if (value != "true" && value != "false") throw PreconditionError("record_wall_time must be true or false");
          cfg.record_wall_time = value == "true";
        } else {
          throw PreconditionError("unknown key '" + key + "'");
        }
      } else if (section == "delta") {
        if (key == "delta")
          cfg.delta.delta = parse_number(value, key);
        else if (key == "k")
          cfg.delta.k = parse_count(value, key);
        else
          throw PreconditionError("unknown key '" + qualified + "'");
      } else {
        ContextConfig& c = context_sections.at(section);
        if (key == "c1")
          c.c1 = parse_number(value, key);
        else if (key == "c2_count")
          c.c2_count = parse_number(value, key);
        else if (key == "c2_prune")
          c.c2_prune = parse_number(value, key);
        else
          throw PreconditionError("unknown key '" + qualified + "'");
      }
    } catch (const PreconditionError& e) {
      throw fail(e.what());
    }
  }
  if (is.bad()) throw IoError(source, "read failed");
  if (cfg.algorithm == Algorithm::kContext) {
    cfg.context = context_sections.at("context");
    cfg.context.depth_mode = DepthMode::kRandom;
  } else if (cfg.algorithm == Algorithm::kContextFixed) {
    cfg.context = context_sections.at("context-fixed");
    cfg.context.depth_mode = DepthMode::kDeterministic;
  }
  cfg.tree = resolve_tree_source(cfg.tree_source, base_dir);
  cfg.check();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open for reading");
  return parse_experiment_config(in, path, std::filesystem::path(path).parent_path().string());
}

std::string format_row(const ReplicaRow& row) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu,%zu,%s,%d,%ld,%d,%.3f", row.n, row.replica, algorithm_name(row.algo).c_str(),
                row.recovered, row.tree_size, row.ell_mismatch, row.wall_ms);
  return buf;
}

namespace {

// Everything about an experiment that does not depend on the replica.
struct Prepared {
  const ExperimentConfig& cfg;
  ChainSampler sampler;
  ContextTree reference;  // minimal true tree, truncated at K

  explicit Prepared(const ExperimentConfig& c)
      : cfg(c), sampler(c.tree), reference(truncate_tree(ContextTree(minimal_contexts(c.tree, c.truncate + 1)),
                                                         c.truncate)) {}
};

std::size_t matched_length(const ContextTree& tree, WordView past) {
  auto idx = tree.match(past);
  return idx ? tree.contexts()[*idx].size() : 0;
}

ReplicaRow run_prepared(const Prepared& prep, std::size_t n_index, std::size_t replica) {
  const ExperimentConfig& cfg = prep.cfg;
  ReplicaRow row;
  row.n = cfg.n_grid.at(n_index);
  row.replica = replica;
  row.algo = cfg.algorithm;
  const auto start = std::chrono::steady_clock::now();
  try {
    Philox rng(cfg.seed, static_cast<std::uint32_t>(n_index), static_cast<std::uint32_t>(replica));
    const SymbolSequence sample = prep.sampler.sample(row.n, rng);
    EstimatedTree estimate;
    bool mismatch = false;
    if (cfg.algorithm == Algorithm::kDelta) {
      estimate = estimate_tree_delta(sample, cfg.delta);
      const ContextTree truncated = truncate_tree(estimate.tree(), cfg.truncate);
      mismatch = matched_length(truncated, sample.symbols) != matched_length(prep.reference, sample.symbols);
    } else {
      estimate = empirical_tree_rissanen(sample, cfg.context);
      const auto truth = context_of(cfg.tree, sample.symbols);
      mismatch = !truth || ell_hat(sample, cfg.context) != truth->size();
    }
    row.tree_size = static_cast<long>(estimate.contexts.size());
    row.recovered = compare_trees(estimate.tree(), prep.reference, cfg.truncate).equal ? 1 : 0;
    row.ell_mismatch = mismatch ? 1 : 0;
  } catch (const std::exception& e) {
    row.recovered = -1;
    row.tree_size = -1;
    row.ell_mismatch = -1;
    row.error = e.what();
  }
  if (cfg.record_wall_time)
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

}  // namespace

ReplicaRow run_replica(const ExperimentConfig& cfg, std::size_t n_index, std::size_t replica) {
  cfg.check();
  return run_prepared(Prepared(cfg), n_index, replica);
}

ExperimentReport run_recovery_experiment(const ExperimentConfig& cfg, std::ostream* csv) {
  cfg.check();
  const Prepared prep(cfg);
  const std::size_t total = cfg.n_grid.size() * cfg.replicas;
  std::vector<std::optional<ReplicaRow>> slots(total);
  std::atomic<std::size_t> next{0};
  std::mutex mutex;
  std::size_t flushed = 0;
  if (csv) *csv << kReportHeader << '\n';

  auto work = [&] {
    for (std::size_t task = next++; task < total; task = next++) {
      ReplicaRow row = run_prepared(prep, task / cfg.replicas, task % cfg.replicas);
      std::lock_guard lock(mutex);
      slots[task] = std::move(row);
      while (flushed < total && slots[flushed]) {
        if (csv) *csv << format_row(*slots[flushed]) << '\n' << std::flush;
        ++flushed;
      }
    }
  };
  const std::size_t threads = std::min(cfg.workers, total);
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  }

  ExperimentReport report;
  report.rows.reserve(total);
  for (auto& slot : slots) report.rows.push_back(std::move(*slot));
  report.summary = summarize(report.rows);
  return report;
}

std::vector<GridSummary> summarize(const std::vector<ReplicaRow>& rows) {
  std::map<std::size_t, GridSummary> by_n;
  std::map<std::size_t, std::size_t> recovered, mismatched;
  for (const auto& r : rows) {
    GridSummary& s = by_n[r.n];
    s.n = r.n;
    if (r.recovered < 0) {
      ++s.failed;
      continue;
    }
    ++s.completed;
    recovered[r.n] += static_cast<std::size_t>(r.recovered);
    mismatched[r.n] += static_cast<std::size_t>(r.ell_mismatch);
  }
  std::vector<GridSummary> out;
  for (auto& [n, s] : by_n) {
    if (s.completed > 0) {
      s.recovery = static_cast<double>(recovered[n]) / static_cast<double>(s.completed);
      s.ell_mismatch = static_cast<double>(mismatched[n]) / static_cast<double>(s.completed);
      s.recovery_se = binomial_se(s.recovery, s.completed);
      s.ell_mismatch_se = binomial_se(s.ell_mismatch, s.completed);
    }
    out.push_back(s);
  }
  return out;
}

void write_report(std::ostream& os, const ExperimentReport& report) {
  os << kReportHeader << '\n';
  for (const auto& row : report.rows) os << format_row(row) << '\n';
}

void export_report(const ExperimentReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  write_report(out, report);
  out.flush();
  if (!out) throw IoError(path, "write failed");
}

NullCalibrationReport run_null_calibration(const NullCalibrationConfig& cfg) {
  if (cfg.replicas < 1) throw PreconditionError("replicas must be >= 1");
  if (cfg.node.empty()) throw PreconditionError("calibration node must be non-empty");
  const ChainSampler sampler(cfg.tree);
  const double A = static_cast<double>(cfg.tree.alphabet().size());
  NullCalibrationReport report;
  report.dof = (A - 1.0) * (A - 1.0);
  report.lambdas.reserve(cfg.replicas);
  for (std::size_t r = 0; r < cfg.replicas; ++r) {
    Philox rng(cfg.seed, 0, static_cast<std::uint32_t>(r));
    const SymbolSequence sample = sampler.sample(cfg.n, rng);
    const CountTrie trie = build_counts(sample, std::min(cfg.n, cfg.node.size() + 2));
    report.lambdas.push_back(lambda_stat(trie, cfg.node));
  }
  double sum = 0.0;
  for (double v : report.lambdas) sum += v;
  report.mean = sum / static_cast<double>(report.lambdas.size());
  if (report.lambdas.size() >= 2) {
    const double dof = report.dof;
    report.ks = ks_distance(report.lambdas, [dof](double x) { return chi_square_cdf(x, dof); });
  }
  return report;
}

}  // namespace vlmc
