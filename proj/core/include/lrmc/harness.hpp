#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lrmc/estimators.hpp"
#include "lrmc/markov.hpp"
#include "lrmc/types.hpp"

namespace lrmc {

// One simulation sweep: for every (seed, C) a rank-r chain on p states is
// generated, n(C) = ceil(C^2 r p log p) transitions are sampled, and every
// estimator in the list is fitted and scored against the truth.
struct ExperimentConfig {
  Index p = 50;
  Index r = 3;
  std::vector<double> c_values = {4.0, 8.0, 16.0};  // sampling constants C
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<EstimatorSpec> estimators;  // empty selects all four defaults
  TrajectoryMode mode = TrajectoryMode::chain;
  std::string output_path = "results.csv";
  Index threads = 0;  // worker cap; 0 picks the hardware count

  std::int64_t n_for(double C) const;
};

struct ResultRow {
  std::string estimator;
  double C = 0.0;
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  double eta_f = 0.0;
  double eta_u = 0.0;
  double eta_v = 0.0;
  double kl = 0.0;
  double wall_seconds = 0.0;  // informational; kept out of the budget CSV
  bool failed = false;
  std::string flag;  // failure reason, empty when clean
};

// Runs the sweep with a bounded worker pool.  Rows come back sorted by
// (estimator, C, seed) and are bit-reproducible for a fixed config: every
// random stream is derived from (seed, C) alone, independent of scheduling.
// Failures are recorded in their row and do not stop the run.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

// Canonical results table.  Deliberately excludes wall_seconds so repeated
// runs of the same config emit byte-identical files; timings go to the
// companion writer below.
void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_results_csv(const std::string& path,
                       const std::vector<ResultRow>& rows);
void write_timings_csv(const std::string& path,
                       const std::vector<ResultRow>& rows);

enum class Measure { eta_f, eta_u, eta_v, kl };

// Per (estimator, C) aggregates of one measure across seeds; flagged rows are
// excluded from the statistics and surface in the failures column.
struct PlotRow {
  std::string estimator;
  double C = 0.0;
  std::int64_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single seed
  Index count = 0;
  Index failures = 0;
};

std::vector<PlotRow> emit_plot_data(const std::vector<ResultRow>& rows,
                                    Measure measure);
void write_plot_csv(const std::string& path, const std::vector<PlotRow>& rows);

// Flat "key = value" config file covering exactly the ExperimentConfig fields;
// '#' starts a comment.  Estimator entries are mle | svd | nu | nu:<lambda> |
// rank.  Unknown keys or malformed values throw with a one-line message.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(std::istream& in);

// The four default estimators (mle, svd, nu with cross-validation, rank)
// configured for the given dimensions.
std::vector<EstimatorSpec> default_estimators(Index r);

}  // namespace lrmc
