#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "eed2d/algorithms.hpp"
#include "eed2d/params.hpp"

namespace eed2d {

enum class SweepVariable { p_max_dbm, antennas, eta, r_min, sigma_eps2 };
enum class CsiMode { perfect, imperfect };

const char* to_string(SweepVariable v);
const char* to_string(CsiMode mode);
SweepVariable parse_sweep_variable(const std::string& name);
Access parse_access(const std::string& name);
Algorithm parse_algorithm(const std::string& name);
CsiMode parse_csi_mode(const std::string& name);

struct ExperimentConfig {
  SweepVariable sweep = SweepVariable::p_max_dbm;
  std::vector<double> values{20.0};
  SystemParams params;
  int trials = 100;
  std::uint64_t master_seed = 1;
  std::vector<Access> schemes{Access::noma};
  std::vector<Algorithm> algorithms{Algorithm::alt};
  CsiMode csi = CsiMode::perfect;
  double sigma_eps2 = 0.0;  // error variance in imperfect mode (unless swept)
  double xi = 0.1;          // exhaustive-search step
  std::string output;       // CSV path; empty means none
  bool record_timing = true;

  void validate() const;
  /// Params of one sweep point.
  SystemParams params_at(double value) const;
  double sigma_eps2_at(double value) const;
};

/// Flat key = value file (TOML scalars and arrays). Unknown keys are errors.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

struct ResultRow {
  int trial = 0;
  std::uint64_t seed = 0;
  std::string sweep_name;
  double sweep_value = 0.0;
  Access scheme = Access::noma;
  Algorithm algorithm = Algorithm::alt;
  bool feasible = false;
  double ee = 0.0;
  double tau = 0.0;
  int iterations = 0;
  double wall_ms = 0.0;

  bool operator==(const ResultRow&) const = default;
};

struct ResultsTable {
  std::vector<ResultRow> rows;
};

/// One trial at one sweep point, for every configured scheme and algorithm.
std::vector<ResultRow> run_point(const ExperimentConfig& config, int trial, double value);

/// Rows ordered by (trial, sweep index, scheme, algorithm). Trials run on OpenMP threads.
ResultsTable run_sweep(const ExperimentConfig& config);
/// Same table, computed on the calling thread only.
ResultsTable run_sweep_serial(const ExperimentConfig& config);

inline constexpr const char* kCsvHeader =
    "trial,seed,sweep_name,sweep_value,scheme,algorithm,feasible,ee,tau,iterations,wall_ms";

/// Throws InvalidArgument for an empty table (nothing is written) and Error on I/O failure.
void write_csv(const ResultsTable& table, const std::string& path);
void write_csv(const ResultsTable& table, std::ostream& out);
ResultsTable read_csv(const std::string& path);
ResultsTable read_csv(std::istream& in);

struct SummaryRow {
  double sweep_value = 0.0;
  Access scheme = Access::noma;
  Algorithm algorithm = Algorithm::alt;
  int feasible = 0;
  int total = 0;
  double mean = 0.0;  // over feasible rows
  double stddev = 0.0;
};

/// Mean and sample standard deviation of EE per (sweep value, scheme, algorithm), in order of
/// first appearance. Infeasible rows are counted but excluded from the statistics.
std::vector<SummaryRow> summarize(const ResultsTable& table);

/// gnuplot script plotting mean EE +- std against the sweep value per (scheme, algorithm).
void emit_plot_script(const ResultsTable& table, const std::string& path);

}  // namespace eed2d
