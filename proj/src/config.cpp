#include <charconv>
#include <fstream>
#include <functional>
#include <map>

#include "CLI11.hpp"
#include "eed2d/errors.hpp"
#include "eed2d/experiments.hpp"

namespace eed2d {

namespace {

using Inputs = std::vector<std::string>;

const std::string& single(const std::string& key, const Inputs& in) {
  if (in.size() != 1) throw InvalidArgument("key '" + key + "' expects a single value");
  return in.front();
}

double to_double(const std::string& key, const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw InvalidArgument("key '" + key + "': '" + s + "' is not a number");
  return v;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& s) {
  Int v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw InvalidArgument("key '" + key + "': '" + s + "' is not an integer");
  return v;
}

bool to_bool(const std::string& key, const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw InvalidArgument("key '" + key + "': '" + s + "' is not a boolean");
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const Inputs&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"sweep", [](auto& c, auto& k, auto& in) { c.sweep = parse_sweep_variable(single(k, in)); }},
      {"values",
       [](auto& c, auto& k, auto& in) {
         c.values.clear();
         for (const auto& s : in) c.values.push_back(to_double(k, s));
       }},
      {"users", [](auto& c, auto& k, auto& in) { c.params.users = to_int<int>(k, single(k, in)); }},
      {"antennas",
       [](auto& c, auto& k, auto& in) { c.params.antennas = to_int<int>(k, single(k, in)); }},
      {"p_max_dbm",
       [](auto& c, auto& k, auto& in) { c.params.p_max = dbm_to_watt(to_double(k, single(k, in))); }},
      {"sigma2_dbm",
       [](auto& c, auto& k, auto& in) { c.params.sigma2 = dbm_to_watt(to_double(k, single(k, in))); }},
      {"eta", [](auto& c, auto& k, auto& in) { c.params.eta = to_double(k, single(k, in)); }},
      {"p_c", [](auto& c, auto& k, auto& in) { c.params.p_c = to_double(k, single(k, in)); }},
      {"r_min", [](auto& c, auto& k, auto& in) { c.params.r_min = to_double(k, single(k, in)); }},
      {"trials", [](auto& c, auto& k, auto& in) { c.trials = to_int<int>(k, single(k, in)); }},
      {"seed",
       [](auto& c, auto& k, auto& in) { c.master_seed = to_int<std::uint64_t>(k, single(k, in)); }},
      {"schemes",
       [](auto& c, auto&, auto& in) {
         c.schemes.clear();
         for (const auto& s : in) c.schemes.push_back(parse_access(s));
       }},
      {"algorithms",
       [](auto& c, auto&, auto& in) {
         c.algorithms.clear();
         for (const auto& s : in) c.algorithms.push_back(parse_algorithm(s));
       }},
      {"csi", [](auto& c, auto& k, auto& in) { c.csi = parse_csi_mode(single(k, in)); }},
      {"sigma_eps2", [](auto& c, auto& k, auto& in) { c.sigma_eps2 = to_double(k, single(k, in)); }},
      {"xi", [](auto& c, auto& k, auto& in) { c.xi = to_double(k, single(k, in)); }},
      {"output", [](auto& c, auto& k, auto& in) { c.output = single(k, in); }},
      {"record_timing",
       [](auto& c, auto& k, auto& in) { c.record_timing = to_bool(k, single(k, in)); }},
  };
  return table;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config;
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::Error& e) {
    throw InvalidArgument(std::string("config syntax: ") + e.what());
  }
  for (const CLI::ConfigItem& item : items) {
    if (!item.parents.empty())
      throw InvalidArgument("config sections are not supported ('" + item.fullname() + "')");
    const auto it = setters().find(item.name);
    if (it == setters().end()) throw InvalidArgument("unknown config key '" + item.name + "'");
    it->second(config, item.name, item.inputs);
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path + "'");
  return parse_config(in);
}

}  // namespace eed2d
