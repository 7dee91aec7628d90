#pragma once

#include <iosfwd>
#include <string>

#include "lrmc/admm.hpp"
#include "lrmc/dc.hpp"
#include "lrmc/markov.hpp"
#include "lrmc/types.hpp"

namespace lrmc {

// Matrices travel as plain CSV, one row per line, entries printed with enough
// digits to round-trip doubles exactly.
void write_matrix_csv(std::ostream& out, const Matrix& M);
void write_matrix_csv(const std::string& path, const Matrix& M);
Matrix read_matrix_csv(std::istream& in);
Matrix read_matrix_csv(const std::string& path);

CountMatrix read_count_matrix_csv(const std::string& path);

// Trajectory files carry one header line "mode=<chain|iid-pairs> p=<p>"; chain
// files then hold one state index per line, pair files one "from to" pair per
// line.
void write_trajectory(std::ostream& out, const Trajectory& traj);
void write_trajectory(const std::string& path, const Trajectory& traj);
Trajectory read_trajectory(std::istream& in);
Trajectory read_trajectory(const std::string& path);

// Per-iteration inner-solver trace.
void write_solver_report_csv(std::ostream& out, const SolverReport& report);
void write_solver_report_csv(const std::string& path, const SolverReport& report);

// Per-iteration outer-loop trace.
void write_dc_report_csv(std::ostream& out, const DcReport& report);
void write_dc_report_csv(const std::string& path, const DcReport& report);

}  // namespace lrmc
