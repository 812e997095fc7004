#include "eed2d/experiments.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "eed2d/channel_model.hpp"
#include "eed2d/errors.hpp"
#include "eed2d/rng.hpp"

namespace eed2d {

const char* to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::p_max_dbm: return "p_max_dbm";
    case SweepVariable::antennas: return "m";
    case SweepVariable::eta: return "eta";
    case SweepVariable::r_min: return "r_min";
    case SweepVariable::sigma_eps2: return "sigma_eps2";
  }
  return "?";
}

const char* to_string(CsiMode mode) { return mode == CsiMode::perfect ? "perfect" : "imperfect"; }

SweepVariable parse_sweep_variable(const std::string& name) {
  for (SweepVariable v : {SweepVariable::p_max_dbm, SweepVariable::antennas, SweepVariable::eta,
                          SweepVariable::r_min, SweepVariable::sigma_eps2})
    if (name == to_string(v)) return v;
  if (name == "antennas") return SweepVariable::antennas;
  throw InvalidArgument("unknown sweep variable '" + name + "'");
}

Access parse_access(const std::string& name) {
  if (name == "noma") return Access::noma;
  if (name == "oma") return Access::oma;
  throw InvalidArgument("unknown scheme '" + name + "'");
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "alt") return Algorithm::alt;
  if (name == "exhaustive") return Algorithm::exhaustive;
  throw InvalidArgument("unknown algorithm '" + name + "'");
}

CsiMode parse_csi_mode(const std::string& name) {
  if (name == "perfect") return CsiMode::perfect;
  if (name == "imperfect") return CsiMode::imperfect;
  throw InvalidArgument("unknown csi mode '" + name + "'");
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
  if (values.empty()) throw InvalidArgument("sweep value list is empty");
  if (schemes.empty() || algorithms.empty())
    throw InvalidArgument("at least one scheme and one algorithm are required");
  if (!(xi > 0.0)) throw InvalidArgument("xi must be > 0");
  if (!(sigma_eps2 >= 0.0)) throw InvalidArgument("sigma_eps2 must be >= 0");
  for (double v : values) {
    params_at(v).validate();
    if (!(sigma_eps2_at(v) >= 0.0)) throw InvalidArgument("sigma_eps2 must be >= 0");
  }
}

SystemParams ExperimentConfig::params_at(double value) const {
  SystemParams p = params;
  switch (sweep) {
    case SweepVariable::p_max_dbm: p.p_max = dbm_to_watt(value); break;
    case SweepVariable::antennas:
      if (value != std::round(value)) throw InvalidArgument("antenna counts must be integers");
      p.antennas = static_cast<int>(value);
      break;
    case SweepVariable::eta: p.eta = value; break;
    case SweepVariable::r_min: p.r_min = value; break;
    case SweepVariable::sigma_eps2: break;
  }
  return p;
}

double ExperimentConfig::sigma_eps2_at(double value) const {
  return sweep == SweepVariable::sigma_eps2 ? value : sigma_eps2;
}

std::vector<ResultRow> run_point(const ExperimentConfig& config, int trial, double value) {
  const std::uint64_t seed = trial_seed(config.master_seed, static_cast<std::uint64_t>(trial));
  const SystemParams params = config.params_at(value);
  ChannelSet channels = draw_trial_channels(params, seed);
  std::optional<CsiErrorRealization> error;
  if (config.csi == CsiMode::imperfect) {
    Rng rng = make_rng(seed, Stream::csi_error);
    auto [estimated, realization] = apply_csi_error(channels, config.sigma_eps2_at(value), rng);
    channels = std::move(estimated);
    error = std::move(realization);
  }

  std::vector<ResultRow> rows;
  for (Access scheme : config.schemes) {
    const Scenario scenario(channels, params, scheme, error);
    for (Algorithm algorithm : config.algorithms) {
      ResultRow row;
      row.trial = trial;
      row.seed = seed;
      row.sweep_name = to_string(config.sweep);
      row.sweep_value = value;
      row.scheme = scheme;
      row.algorithm = algorithm;
      const auto start = std::chrono::steady_clock::now();
      try {
        Solution sol;
        if (algorithm == Algorithm::alt) {
          sol = alternating_optimize(scenario);
        } else {
          ExhaustiveOptions opts;
          opts.xi = config.xi;
          sol = exhaustive_tau_optimize(scenario, opts);
        }
        row.feasible = true;
        row.ee = sol.ee;
        row.tau = sol.tau.tau();
        row.iterations = sol.iterations;
      } catch (const Infeasible&) {
        row.feasible = false;
      }
      if (config.record_timing)
        row.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

namespace {

ResultsTable merge(std::vector<std::vector<ResultRow>>& slots) {
  ResultsTable table;
  for (auto& slot : slots)
    for (auto& row : slot) table.rows.push_back(std::move(row));
  return table;
}

}  // namespace

ResultsTable run_sweep(const ExperimentConfig& config) {
  config.validate();
  const int n_values = static_cast<int>(config.values.size());
  const int jobs = config.trials * n_values;
  std::vector<std::vector<ResultRow>> slots(static_cast<std::size_t>(jobs));
#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j < jobs; ++j)
    slots[static_cast<std::size_t>(j)] =
        run_point(config, j / n_values, config.values[static_cast<std::size_t>(j % n_values)]);
  return merge(slots);
}

ResultsTable run_sweep_serial(const ExperimentConfig& config) {
  config.validate();
  const int n_values = static_cast<int>(config.values.size());
  std::vector<std::vector<ResultRow>> slots;
  for (int trial = 0; trial < config.trials; ++trial)
    for (int v = 0; v < n_values; ++v)
      slots.push_back(run_point(config, trial, config.values[static_cast<std::size_t>(v)]));
  return merge(slots);
}

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw InvalidArgument("bad number '" + s + "' in CSV");
  return v;
}

template <typename Int>
Int parse_int(const std::string& s) {
  Int v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw InvalidArgument("bad integer '" + s + "' in CSV");
  return v;
}

}  // namespace

void write_csv(const ResultsTable& table, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const ResultRow& r : table.rows) {
    out << r.trial << ',' << r.seed << ',' << r.sweep_name << ',' << format_double(r.sweep_value)
        << ',' << to_string(r.scheme) << ',' << to_string(r.algorithm) << ','
        << (r.feasible ? "true" : "false") << ',' << format_double(r.ee) << ','
        << format_double(r.tau) << ',' << r.iterations << ',' << format_double(r.wall_ms)
        << '\n';
  }
}

void write_csv(const ResultsTable& table, const std::string& path) {
  if (table.rows.empty()) throw InvalidArgument("refusing to write an empty results table");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_csv(table, out);
  if (!out) throw Error("write to '" + path + "' failed");
}

ResultsTable read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw InvalidArgument("unexpected CSV header");
  ResultsTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 11) throw InvalidArgument("CSV row with " + std::to_string(f.size()) + " fields");
    ResultRow r;
    r.trial = parse_int<int>(f[0]);
    r.seed = parse_int<std::uint64_t>(f[1]);
    r.sweep_name = f[2];
    r.sweep_value = parse_double(f[3]);
    r.scheme = parse_access(f[4]);
    r.algorithm = parse_algorithm(f[5]);
    if (f[6] != "true" && f[6] != "false") throw InvalidArgument("bad feasible flag");
    r.feasible = f[6] == "true";
    r.ee = parse_double(f[7]);
    r.tau = parse_double(f[8]);
    r.iterations = parse_int<int>(f[9]);
    r.wall_ms = parse_double(f[10]);
    table.rows.push_back(std::move(r));
  }
  return table;
}

ResultsTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_csv(in);
}

std::vector<SummaryRow> summarize(const ResultsTable& table) {
  using Key = std::tuple<double, Access, Algorithm>;
  std::map<Key, std::size_t> index;
  std::vector<SummaryRow> out;
  std::vector<std::vector<double>> samples;
  for (const ResultRow& r : table.rows) {
    const Key key{r.sweep_value, r.scheme, r.algorithm};
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, out.size()).first;
      out.push_back({r.sweep_value, r.scheme, r.algorithm, 0, 0, 0.0, 0.0});
      samples.emplace_back();
    }
    SummaryRow& s = out[it->second];
    ++s.total;
    if (r.feasible) {
      ++s.feasible;
      samples[it->second].push_back(r.ee);
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& xs = samples[i];
    if (xs.empty()) continue;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    out[i].mean = mean;
    out[i].stddev = xs.size() > 1 ? std::sqrt(var / static_cast<double>(xs.size() - 1)) : 0.0;
  }
  return out;
}

void emit_plot_script(const ResultsTable& table, const std::string& path) {
  if (table.rows.empty()) throw InvalidArgument("refusing to plot an empty results table");
  const std::vector<SummaryRow> summary = summarize(table);
  std::map<std::pair<Access, Algorithm>, std::vector<const SummaryRow*>> series;
  for (const SummaryRow& s : summary)
    if (s.feasible > 0) series[{s.scheme, s.algorithm}].push_back(&s);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << "# mean EE +- std per scheme/algorithm\n";
  out << "set xlabel '" << table.rows.front().sweep_name << "'\n";
  out << "set ylabel 'energy efficiency (bits/Hz/J)'\n";
  out << "set key best\n";
  out << "set grid\n";
  int block = 0;
  std::vector<std::string> plots;
  for (const auto& [key, rows] : series) {
    const std::string name = "$s" + std::to_string(block++);
    out << name << " << EOD\n";
    for (const SummaryRow* s : rows)
      out << format_double(s->sweep_value) << ' ' << format_double(s->mean) << ' '
          << format_double(s->stddev) << '\n';
    out << "EOD\n";
    plots.push_back(name + " using 1:2:3 with yerrorlines title '" + to_string(key.first) + " " +
                    to_string(key.second) + "'");
  }
  out << "plot ";
  for (std::size_t i = 0; i < plots.size(); ++i) out << (i ? ", \\\n     " : "") << plots[i];
  out << '\n';
  if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace eed2d
