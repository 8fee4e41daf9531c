#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vlmc/context_tree.hpp"
#include "vlmc/estimators.hpp"

namespace vlmc {

/// Tree with contexts 1, 10, 00 and p(1|1) = 0.3, p(1|10) = 0.8, p(1|00) = 0.2.
ProbabilisticContextTree reference_tree();
/// Uniform i.i.d. source over `alphabet_size` symbols, written as the
/// depth-one tree with identical rows.
ProbabilisticContextTree iid_tree(std::size_t alphabet_size = 2);

/// builtin:ref, builtin:iid, builtin:iid:<|A|>, builtin:renewal-const:<c>,
/// builtin:renewal-geom:<c>:<r>, or a tree file path (relative paths are
/// resolved against `base_dir`).
ProbabilisticContextTree resolve_tree_source(const std::string& source, const std::string& base_dir = "");

/// The smallest context set describing the same chain: sibling contexts
/// {a w : a in A} with identical rows are merged into w, repeatedly. An
/// i.i.d. source reduces to the empty set. Renewal families are materialized
/// to `depth` first.
std::vector<Word> minimal_contexts(const ProbabilisticContextTree& pct, std::size_t depth);

enum class Algorithm { kContext, kContextFixed, kDelta };

std::string algorithm_name(Algorithm algo);
std::optional<Algorithm> parse_algorithm(std::string_view name);

struct ExperimentConfig {
  std::string tree_source = "builtin:ref";
  ProbabilisticContextTree tree = reference_tree();
  std::vector<std::size_t> n_grid;
  std::size_t replicas = 1;
  Algorithm algorithm = Algorithm::kDelta;
  ContextConfig context;  // used by context and context-fixed
  DeltaConfig delta;
  std::size_t truncate = 2;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  /// Off by default so that reports are byte-reproducible (wall_ms = 0).
  bool record_wall_time = false;

  void check() const;
};

/// Flat key = value document; top-level keys first, then optional
/// [context], [context-fixed] and [delta] sections. '#' starts a comment.
/// Unknown keys and malformed values throw PreconditionError with the line.
ExperimentConfig parse_experiment_config(std::istream& is, const std::string& source,
                                         const std::string& base_dir = "");
ExperimentConfig load_experiment_config(const std::string& path);

struct ReplicaRow {
  std::size_t n = 0;
  std::size_t replica = 0;
  Algorithm algo = Algorithm::kDelta;
  int recovered = -1;       // -1 marks a failed replica
  long tree_size = -1;
  int ell_mismatch = -1;
  double wall_ms = 0.0;
  std::string error;
};

struct GridSummary {
  std::size_t n = 0;
  std::size_t completed = 0;
  std::size_t failed = 0;
  double recovery = 0.0;
  double recovery_se = 0.0;
  double ell_mismatch = 0.0;
  double ell_mismatch_se = 0.0;
};

struct ExperimentReport {
  std::vector<ReplicaRow> rows;  // sorted by (n, replica)
  std::vector<GridSummary> summary;
};

inline constexpr const char* kReportHeader = "n,replica,algo,recovered,tree_size,ell_mismatch,wall_ms";

/// The CSV line for one row (no newline).
std::string format_row(const ReplicaRow& row);

/// One replica: sample from stream (seed, n index, replica), estimate,
/// compare tau_hat|_K with the minimal true tree truncated at K, and compare
/// the estimated context length of the whole sample with the true one.
ReplicaRow run_replica(const ExperimentConfig& cfg, std::size_t n_index, std::size_t replica);

/// Runs the whole grid on cfg.workers threads. When `csv` is given the header
/// and rows are written to it in canonical order as soon as they are
/// contiguous. Failed replicas are recorded, never rethrown.
ExperimentReport run_recovery_experiment(const ExperimentConfig& cfg, std::ostream* csv = nullptr);

std::vector<GridSummary> summarize(const std::vector<ReplicaRow>& rows);

void write_report(std::ostream& os, const ExperimentReport& report);
void export_report(const ExperimentReport& report, const std::string& path);

struct NullCalibrationConfig {
  ProbabilisticContextTree tree = iid_tree(2);
  std::size_t n = 10000;
  std::size_t replicas = 500;
  Word node = {0};  // string at which the likelihood ratio is evaluated
  std::uint64_t seed = 0;
};

struct NullCalibrationReport {
  std::vector<double> lambdas;
  double mean = 0.0;
  double dof = 1.0;
  std::optional<double> ks;  // absent with fewer than two replicas
};

/// Empirical law of the likelihood ratio at a fixed node against the
/// chi-square law with (|A| - 1)^2 degrees of freedom ((|A| - 1) when binary).
NullCalibrationReport run_null_calibration(const NullCalibrationConfig& cfg);

}  // namespace vlmc
