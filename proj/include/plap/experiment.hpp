#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "plap/solver.hpp"

namespace plap {

/// Sections of `key = value` lines; values of grid axes are comma lists.
struct IniFile {
  std::map<std::string, std::map<std::string, std::string>> sections;

  std::optional<std::string> get(const std::string& section, const std::string& key) const;
};

IniFile parse_ini(std::istream& in);

enum class ExperimentModel { er, configuration, multipartite_er, complete, triangular_link };

const char* to_string(ExperimentModel m);

/// How the grid's density value turns into an edge probability.
enum class RhoRule {
  literal,       // rho
  log_scaled,    // c log(m) / m
  power,         // m^c / m^2
};

/// One point of the parameter grid. Unused axes stay 0.
struct Cell {
  int m = 0;
  int k = 0;
  int part_size = 0;
  int degree = 0;
  double rho_value = 0.0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

struct ExperimentConfig {
  ExperimentModel model = ExperimentModel::er;
  int trials = 1;
  std::uint64_t seed = 0;
  std::vector<int> m;
  std::vector<int> k;
  std::vector<int> part_size;
  std::vector<int> degree;
  std::vector<double> rho;
  RhoRule rho_rule = RhoRule::literal;
  /// Exponents evaluated on every sampled graph.
  std::vector<double> p{2.0};
  SolverOptions solver;
  /// Worker threads over trials; the solver itself runs single-threaded.
  int threads = 1;
  std::string csv_path;
  std::string json_path;
  std::string summary_path;
  /// When set, each summary row carries 1 - C p^4 / (rho m)^{1/(2p^2)}.
  std::optional<double> envelope_C;

  /// Cartesian product of the axes the model uses, in a fixed order.
  std::vector<Cell> grid() const;
  /// The edge probability of a cell (0 for models without one).
  double effective_rho(const Cell& c) const;
};

/// Reads `[experiment]`, `[grid]`, `[solver]` and `[output]`; throws
/// ConfigError on missing axes, empty lists or unknown keys.
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig load_experiment_config(const std::string& path);

struct PEstimate {
  double p = 2.0;
  double lambda = 0.0;
  std::string method;
  bool converged = true;

  friend bool operator==(const PEstimate&, const PEstimate&) = default;
};

struct TrialRecord {
  int cell = 0;
  int trial = 0;
  Cell coords;
  double rho = 0.0;
  /// Stream id of the trial's random source.
  std::uint64_t stream = 0;
  /// "ok" or "failed: <message>".
  std::string status = "ok";
  int vertices = 0;
  long long edges = 0;
  int min_degree = 0;
  int max_degree = 0;
  /// Pairs with two or more edges / three or more edges; for link graphs
  /// summed over the three classes.
  long long multi_pairs = 0;
  long long triple_pairs = 0;
  int max_multiplicity = 0;
  /// Relators of the sampled presentation; -1 for graph models.
  long long relators = -1;
  std::vector<PEstimate> estimates;
  /// Excluded from the CSV so reruns are byte-identical.
  double wall_seconds = 0.0;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// Samples the trial's object and evaluates every p. Solver failures are
/// recorded in `status`, not thrown.
TrialRecord run_trial(const ExperimentConfig& config, int cell_index, int trial);

struct SummaryRow {
  int cell = 0;
  Cell coords;
  double rho = 0.0;
  double p = 2.0;
  int count = 0;
  int failed = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double q10 = 0.0;
  double q50 = 0.0;
  double q90 = 0.0;
  std::optional<double> envelope;
};

/// Per (cell, p) statistics over successful trials; quantiles by linear
/// interpolation between order statistics.
std::vector<SummaryRow> summarize(const ExperimentConfig& config, const std::vector<TrialRecord>& records);

/// Column order of the trial CSV (one row per trial and p).
std::vector<std::string> csv_header();
void write_csv(std::ostream& out, const std::vector<TrialRecord>& records);
/// Parses rows written by write_csv; rows are grouped back into records.
/// A truncated final line is ignored.
std::vector<TrialRecord> read_csv(std::istream& in);
std::vector<std::string> summary_header();
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> read_summary_csv(std::istream& in);
/// True when `rows` equals the summary recomputed from `records`.
bool summary_consistent(const ExperimentConfig& config, const std::vector<TrialRecord>& records,
                        const std::vector<SummaryRow>& rows);

std::string records_to_json(const std::vector<TrialRecord>& records);
std::vector<TrialRecord> records_from_json(const std::string& text);

struct ExperimentResult {
  std::vector<TrialRecord> records;
  std::vector<SummaryRow> summary;
  int failed_trials = 0;
  int resumed_trials = 0;
};

/// Runs every (cell, trial), writing the CSV in (cell, trial) order as the
/// prefix completes. With `resume`, trials already present in the CSV are
/// kept verbatim and skipped. Throws InputError when an output path cannot
/// be written.
ExperimentResult run_experiment(const ExperimentConfig& config, bool resume = false);

/// A double with 17 significant digits (%.17g), enough to round-trip.
std::string format_real(double v);

}  // namespace plap
