#include "lrmc/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace lrmc {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return in;
}

std::vector<std::vector<double>> read_csv_rows(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t pos = 0;
      double v;
      try {
        v = std::stod(cell, &pos);
      } catch (const std::exception&) {
        throw std::runtime_error("matrix csv: bad cell '" + cell + "'");
      }
      if (pos != cell.size())
        throw std::runtime_error("matrix csv: bad cell '" + cell + "'");
      row.push_back(v);
    }
    if (row.empty()) throw std::runtime_error("matrix csv: empty row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("matrix csv: no data");
  for (const auto& row : rows)
    if (row.size() != rows.front().size())
      throw std::runtime_error("matrix csv: ragged rows");
  return rows;
}

}  // namespace

void write_matrix_csv(std::ostream& out, const Matrix& M) {
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      if (j > 0) out << ',';
      out << fmt(M(i, j));
    }
    out << '\n';
  }
}

void write_matrix_csv(const std::string& path, const Matrix& M) {
  auto out = open_out(path);
  write_matrix_csv(out, M);
}

Matrix read_matrix_csv(std::istream& in) {
  auto rows = read_csv_rows(in);
  Matrix M(static_cast<Index>(rows.size()),
           static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < M.rows(); ++i)
    for (Index j = 0; j < M.cols(); ++j)
      M(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return M;
}

Matrix read_matrix_csv(const std::string& path) {
  auto in = open_in(path);
  return read_matrix_csv(in);
}

CountMatrix read_count_matrix_csv(const std::string& path) {
  Matrix M = read_matrix_csv(path);
  CountMatrix C(M.rows(), M.cols());
  for (Index i = 0; i < M.rows(); ++i)
    for (Index j = 0; j < M.cols(); ++j) {
      double v = M(i, j);
      auto rounded = static_cast<std::int64_t>(v + 0.5);
      if (v < 0.0 || std::abs(v - static_cast<double>(rounded)) > 1e-9)
        throw std::runtime_error("count csv: entries must be nonnegative integers");
      C(i, j) = rounded;
    }
  return C;
}

void write_trajectory(std::ostream& out, const Trajectory& traj) {
  out << "mode="
      << (traj.mode == TrajectoryMode::chain ? "chain" : "iid-pairs")
      << " p=" << traj.num_states << '\n';
  if (traj.mode == TrajectoryMode::chain) {
    for (std::int32_t s : traj.states) out << s << '\n';
  } else {
    for (const auto& [a, b] : traj.pairs) out << a << ' ' << b << '\n';
  }
}

void write_trajectory(const std::string& path, const Trajectory& traj) {
  auto out = open_out(path);
  write_trajectory(out, traj);
}

Trajectory read_trajectory(std::istream& in) {
  std::string header;
  if (!std::getline(in, header))
    throw std::runtime_error("trajectory: missing header");
  Trajectory traj;
  long long p = -1;
  {
    std::stringstream ss(header);
    std::string token;
    bool have_mode = false;
    while (ss >> token) {
      if (token.rfind("mode=", 0) == 0) {
        std::string mode = token.substr(5);
        if (mode == "chain")
          traj.mode = TrajectoryMode::chain;
        else if (mode == "iid-pairs")
          traj.mode = TrajectoryMode::iid_pairs;
        else
          throw std::runtime_error("trajectory: unknown mode '" + mode + "'");
        have_mode = true;
      } else if (token.rfind("p=", 0) == 0) {
        p = std::stoll(token.substr(2));
      } else {
        throw std::runtime_error("trajectory: unexpected header token '" +
                                 token + "'");
      }
    }
    if (!have_mode || p < 1)
      throw std::runtime_error(
          "trajectory: header must be 'mode=<chain|iid-pairs> p=<p>'");
  }
  traj.num_states = static_cast<Index>(p);

  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    long long a, b;
    if (traj.mode == TrajectoryMode::chain) {
      if (!(ss >> a) || (ss >> std::ws, !ss.eof()))
        throw std::runtime_error("trajectory: bad state line '" + line + "'");
      if (a < 0 || a >= p)
        throw std::runtime_error("trajectory: state index out of range");
      traj.states.push_back(static_cast<std::int32_t>(a));
    } else {
      if (!(ss >> a >> b) || (ss >> std::ws, !ss.eof()))
        throw std::runtime_error("trajectory: bad pair line '" + line + "'");
      if (a < 0 || a >= p || b < 0 || b >= p)
        throw std::runtime_error("trajectory: state index out of range");
      traj.pairs.emplace_back(static_cast<std::int32_t>(a),
                              static_cast<std::int32_t>(b));
    }
  }
  if (traj.num_transitions() < 1)
    throw std::runtime_error("trajectory: no transitions");
  return traj;
}

Trajectory read_trajectory(const std::string& path) {
  auto in = open_in(path);
  return read_trajectory(in);
}

void write_solver_report_csv(std::ostream& out, const SolverReport& report) {
  out << "iteration,lagrangian,primal_feas,dual_feas,sigma\n";
  for (const SolverIterate& it : report.history)
    out << it.iteration << ',' << fmt(it.lagrangian) << ',' << fmt(it.primal_feas)
        << ',' << fmt(it.dual_feas) << ',' << fmt(it.sigma) << '\n';
}

void write_solver_report_csv(const std::string& path,
                             const SolverReport& report) {
  auto out = open_out(path);
  write_solver_report_csv(out, report);
}

void write_dc_report_csv(std::ostream& out, const DcReport& report) {
  out << "iteration,stage,objective,step_norm,rank\n";
  for (const DcIterate& it : report.history)
    out << it.iteration << ',' << it.stage << ',' << fmt(it.objective) << ','
        << fmt(it.step_norm) << ',' << it.rank << '\n';
}

void write_dc_report_csv(const std::string& path, const DcReport& report) {
  auto out = open_out(path);
  write_dc_report_csv(out, report);
}

}  // namespace lrmc
