#include "lrmc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "lrmc/metrics.hpp"
#include "lrmc/rng.hpp"

namespace lrmc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Round-trip decimal formatting, shared by all CSV writers.
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sanitize_flag(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

// Stream tags; estimator fits must not perturb the data streams, so the
// trajectory and cross-validation streams hang off (seed, C index) only.
std::uint64_t traj_tag(std::size_t c_index) { return 0x74726100u + c_index; }
std::uint64_t cv_tag(std::size_t c_index) { return 0x63760000u + c_index; }

void validate_config(const ExperimentConfig& config) {
  if (config.p < 2) throw std::invalid_argument("config: p must be at least 2");
  if (config.r < 1 || config.r > config.p)
    throw std::invalid_argument("config: r must lie in [1, p]");
  if (config.c_values.empty())
    throw std::invalid_argument("config: C_values must be nonempty");
  for (double c : config.c_values)
    if (!(c > 0.0)) throw std::invalid_argument("config: C values must be positive");
  if (config.seeds.empty())
    throw std::invalid_argument("config: seeds must be nonempty");
  if (config.threads < 0)
    throw std::invalid_argument("config: threads must be nonnegative");
}

}  // namespace

std::int64_t ExperimentConfig::n_for(double C) const {
  double n = C * C * static_cast<double>(r) * static_cast<double>(p) *
             std::log(static_cast<double>(p));
  return static_cast<std::int64_t>(std::ceil(n));
}

std::vector<EstimatorSpec> default_estimators(Index r) {
  std::vector<EstimatorSpec> specs(4);
  specs[0].kind = EstimatorKind::mle;
  specs[1].kind = EstimatorKind::svd;
  specs[2].kind = EstimatorKind::nu;
  specs[3].kind = EstimatorKind::rank;
  for (EstimatorSpec& s : specs) s.rank = r;
  return specs;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  std::vector<EstimatorSpec> estimators =
      config.estimators.empty() ? default_estimators(config.r)
                                : config.estimators;

  struct Group {
    std::size_t c_index;
    std::size_t seed_index;
  };
  std::vector<Group> groups;
  for (std::size_t ci = 0; ci < config.c_values.size(); ++ci)
    for (std::size_t si = 0; si < config.seeds.size(); ++si)
      groups.push_back({ci, si});

  std::vector<std::vector<ResultRow>> slots(groups.size());

  auto run_group = [&](const Group& g) {
    const double C = config.c_values[g.c_index];
    const std::uint64_t seed = config.seeds[g.seed_index];
    const std::int64_t n = config.n_for(C);
    std::vector<ResultRow> rows;
    rows.reserve(estimators.size());

    auto base_row = [&](const EstimatorSpec& spec) {
      ResultRow row;
      row.estimator = estimator_name(spec.kind);
      row.C = C;
      row.n = n;
      row.seed = seed;
      row.eta_f = row.eta_u = row.eta_v = row.kl = kNaN;
      return row;
    };

    try {
      TransitionMatrix P = generate_latent_lowrank(config.p, config.r, seed);
      StationaryDistribution mu = stationary_distribution(P);
      Trajectory traj =
          simulate(P, n, config.mode, mix_seed(seed, traj_tag(g.c_index)));
      for (const EstimatorSpec& base : estimators) {
        ResultRow row = base_row(base);
        auto t0 = std::chrono::steady_clock::now();
        try {
          EstimatorSpec spec = base;
          spec.cv_seed = mix_seed(seed, cv_tag(g.c_index));
          auto [Phat, report] = estimate(spec, traj);
          EvalResult eval = evaluate_estimate(P, mu, Phat, config.r);
          row.eta_f = eval.eta_f;
          row.eta_u = eval.eta_u;
          row.eta_v = eval.eta_v;
          row.kl = eval.kl;
          if (!report.rank_feasible) {
            row.failed = true;
            row.flag = "rank_infeasible";
          } else if (!report.solver_converged) {
            row.failed = true;
            row.flag = "not_converged";
          }
        } catch (const std::exception& e) {
          row.failed = true;
          row.flag = sanitize_flag(e.what());
        }
        row.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        rows.push_back(std::move(row));
      }
    } catch (const std::exception& e) {
      for (const EstimatorSpec& base : estimators) {
        ResultRow row = base_row(base);
        row.failed = true;
        row.flag = sanitize_flag(e.what());
        rows.push_back(std::move(row));
      }
    }
    return rows;
  };

  Index workers = config.threads > 0
                      ? config.threads
                      : static_cast<Index>(std::thread::hardware_concurrency());
  workers = std::clamp<Index>(workers, 1, static_cast<Index>(groups.size()));

  std::atomic<std::size_t> next{0};
  auto drain = [&] {
    for (std::size_t g; (g = next.fetch_add(1)) < groups.size();)
      slots[g] = run_group(groups[g]);
  };
  std::vector<std::thread> pool;
  for (Index t = 1; t < workers; ++t) pool.emplace_back(drain);
  drain();
  for (std::thread& t : pool) t.join();

  std::vector<ResultRow> rows;
  for (std::vector<ResultRow>& part : slots)
    for (ResultRow& row : part) rows.push_back(std::move(row));
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.estimator, a.C, a.seed) <
           std::tie(b.estimator, b.C, b.seed);
  });
  return rows;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "estimator,C,n,seed,eta_f,eta_u,eta_v,kl,flag\n";
  for (const ResultRow& r : rows) {
    out << r.estimator << ',' << fmt(r.C) << ',' << r.n << ',' << r.seed << ','
        << fmt(r.eta_f) << ',' << fmt(r.eta_u) << ',' << fmt(r.eta_v) << ','
        << fmt(r.kl) << ',' << r.flag << '\n';
  }
}

namespace {
std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}
}  // namespace

void write_results_csv(const std::string& path,
                       const std::vector<ResultRow>& rows) {
  auto out = open_out(path);
  write_results_csv(out, rows);
}

void write_timings_csv(const std::string& path,
                       const std::vector<ResultRow>& rows) {
  auto out = open_out(path);
  out << "estimator,C,n,seed,wall_seconds\n";
  for (const ResultRow& r : rows)
    out << r.estimator << ',' << fmt(r.C) << ',' << r.n << ',' << r.seed << ','
        << fmt(r.wall_seconds) << '\n';
}

std::vector<PlotRow> emit_plot_data(const std::vector<ResultRow>& rows,
                                    Measure measure) {
  auto pick = [measure](const ResultRow& r) {
    switch (measure) {
      case Measure::eta_f: return r.eta_f;
      case Measure::eta_u: return r.eta_u;
      case Measure::eta_v: return r.eta_v;
      case Measure::kl: return r.kl;
    }
    throw std::invalid_argument("unknown measure");
  };
  std::map<std::pair<std::string, double>, PlotRow> agg;
  std::map<std::pair<std::string, double>, std::vector<double>> values;
  for (const ResultRow& r : rows) {
    auto key = std::make_pair(r.estimator, r.C);
    PlotRow& p = agg[key];
    p.estimator = r.estimator;
    p.C = r.C;
    p.n = r.n;
    if (r.failed) {
      ++p.failures;
    } else {
      values[key].push_back(pick(r));
    }
  }
  std::vector<PlotRow> out;
  for (auto& [key, p] : agg) {
    const std::vector<double>& v = values[key];
    p.count = static_cast<Index>(v.size());
    if (!v.empty()) {
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      double var = 0.0;
      for (double x : v) var += (x - mean) * (x - mean);
      p.mean = mean;
      p.stddev =
          v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
    }
    out.push_back(p);
  }
  return out;
}

void write_plot_csv(const std::string& path, const std::vector<PlotRow>& rows) {
  auto out = open_out(path);
  out << "estimator,C,n,mean,stddev,count,failures\n";
  for (const PlotRow& r : rows)
    out << r.estimator << ',' << fmt(r.C) << ',' << r.n << ',' << fmt(r.mean)
        << ',' << fmt(r.stddev) << ',' << r.count << ',' << r.failures << '\n';
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::stringstream ss(value);
  T out;
  ss >> out;
  if (ss.fail() || !ss.eof())
    throw std::runtime_error("config: bad value for " + key + ": '" + value + "'");
  return out;
}

EstimatorSpec parse_estimator_token(const std::string& token) {
  EstimatorSpec spec;
  std::size_t colon = token.find(':');
  if (colon == std::string::npos) {
    spec.kind = estimator_from_name(token);
    return spec;
  }
  std::string name = token.substr(0, colon);
  if (name != "nu")
    throw std::runtime_error(
        "config: only the nu estimator takes a parameter, got '" + token + "'");
  spec.kind = EstimatorKind::nu;
  spec.lambda = parse_number<double>("estimators", token.substr(colon + 1));
  if (*spec.lambda <= 0.0)
    throw std::runtime_error("config: nu lambda must be positive");
  return spec;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config;
  config.estimators.clear();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key == "p") {
      config.p = parse_number<Index>(key, value);
    } else if (key == "r") {
      config.r = parse_number<Index>(key, value);
    } else if (key == "C_values") {
      config.c_values.clear();
      for (const std::string& item : split_list(value))
        config.c_values.push_back(parse_number<double>(key, item));
    } else if (key == "seeds") {
      config.seeds.clear();
      for (const std::string& item : split_list(value))
        config.seeds.push_back(parse_number<std::uint64_t>(key, item));
    } else if (key == "estimators") {
      config.estimators.clear();
      for (const std::string& item : split_list(value))
        config.estimators.push_back(parse_estimator_token(item));
    } else if (key == "mode") {
      if (value == "chain")
        config.mode = TrajectoryMode::chain;
      else if (value == "iid-pairs")
        config.mode = TrajectoryMode::iid_pairs;
      else
        throw std::runtime_error("config: mode must be chain or iid-pairs");
    } else if (key == "output_path") {
      config.output_path = value;
    } else if (key == "threads") {
      config.threads = parse_number<Index>(key, value);
    } else {
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": unknown key '" + key + "'");
    }
  }
  for (EstimatorSpec& spec : config.estimators) spec.rank = config.r;
  for (std::size_t i = 0; i < config.estimators.size(); ++i)
    for (std::size_t j = i + 1; j < config.estimators.size(); ++j)
      if (config.estimators[i].kind == config.estimators[j].kind)
        throw std::runtime_error("config: duplicate estimator entries");
  validate_config(config);
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  return parse_config(in);
}

}  // namespace lrmc
