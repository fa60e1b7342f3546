#ifndef UAVMEC__CONFIG_HPP_
#define UAVMEC__CONFIG_HPP_

/**
 * @file
 * @brief Scenario configuration and its flat key/value file format.
 *
 * A config file holds one `key = value` pair per line. `#` starts a comment.
 * Scalars are plain numbers, 2-D points are `x,y`, point lists are
 * `x1,y1; x2,y2; ...`. Per-user quantities accept either a single value
 * (applied to every user) or exactly K comma-separated values.
 *
 * | key          | meaning                                   | unit        |
 * |--------------|-------------------------------------------|-------------|
 * | K            | number of ground users                    |             |
 * | N            | number of slots                           |             |
 * | delta        | slot length                               | s           |
 * | h            | UAV altitude                              | m           |
 * | v_m          | UAV speed limit                           | m/s         |
 * | p_I, p_F     | UAV start / destination                   | m           |
 * | ue_positions | initial user positions (K points)         | m           |
 * | alpha        | Gauss-Markov memory                       |             |
 * | v_bar        | asymptotic mean velocity (point)          | m/s         |
 * | sigma_bar    | asymptotic velocity std per component     | m/s         |
 * | W, N0        | bandwidth, noise power                    | Hz, W       |
 * | P_k          | user transmit power (per user)            | W           |
 * | g0           | reference channel gain (linear)           |             |
 * | iota_tilde   | path-loss exponent                        |             |
 * | kappa        | NLoS attenuation (linear)                 |             |
 * | a, b         | LoS sigmoid parameters                    |             |
 * | rho          | task arrival probability (per user)       |             |
 * | I            | task size (per user)                      | bits        |
 * | C            | CPU cycles per bit (per user)             |             |
 * | gamma_c      | effective switched capacitance            |             |
 * | f_max        | max CPU frequency (per user)              | Hz          |
 * | w            | energy weight (per user)                  |             |
 * | C1..C4, v_tip| rotary-wing propulsion constants          |             |
 * | E_u          | average per-slot UAV energy budget        | J           |
 * | V            | drift-plus-penalty weight                 |             |
 * | s_q, s_u     | data / energy queue scaling               |             |
 * | sca_eps      | SCA objective-change tolerance            |             |
 * | sca_max_iter | SCA iteration cap                         |             |
 * | seed         | master random seed                        |             |
 */

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavmec {

using Vec2 = Eigen::Vector2d;

/// Rotary-wing propulsion model constants.
struct PropulsionParams
{
  double blade_profile = 80.0;  ///< C1, W
  double induced       = 22.0;  ///< C2
  double hover_velocity4 = 263.4;  ///< C3, (m/s)^4
  double parasite      = 0.0092;  ///< C4
  double tip_speed     = 120.0;  ///< v_tip, m/s
};

struct ScenarioConfig
{
  int num_users   = 4;
  int num_slots   = 200;
  double slot_length = 1.0;
  double altitude    = 100.0;
  double max_speed   = 25.0;
  Vec2 uav_start{0.0, 0.0};
  Vec2 uav_end{600.0, 0.0};
  std::vector<Vec2> user_start{{200.0, 100.0}, {200.0, 200.0}, {200.0, 300.0}, {200.0, 400.0}};

  double mobility_memory = 0.4;
  Vec2 mean_velocity{1.0, 0.0};
  double velocity_std = 2.0;

  double bandwidth         = 1e6;
  double noise_power       = 1e-12;
  double reference_gain    = 1e-5;
  double pathloss_exponent = 2.2;
  double nlos_attenuation  = 0.2;
  double los_a             = 9.61;
  double los_b             = 0.16;

  std::vector<double> transmit_power{0.1, 0.1, 0.1, 0.1};
  std::vector<double> arrival_prob{0.8, 0.8, 0.8, 0.8};
  std::vector<double> task_bits{2.2e6, 2.2e6, 2.2e6, 2.2e6};
  std::vector<double> cycles_per_bit{1000.0, 1000.0, 1000.0, 1000.0};
  std::vector<double> max_cpu_freq{1e9, 1e9, 1e9, 1e9};
  std::vector<double> energy_weight{0.25, 0.25, 0.25, 0.25};  ///< 1/K unless set
  double capacitance = 1e-28;

  PropulsionParams propulsion{};

  double uav_energy_budget = 170.0;
  double tradeoff_weight   = 50.0;
  double data_queue_scale  = 1e-6;
  double energy_queue_scale = 0.1;

  double sca_tolerance   = 0.01;
  int sca_max_iterations = 50;

  std::uint64_t seed = 1;
};

/// Raised for unparsable files and violated invariants; `key()` names the offending entry.
class ConfigError : public std::runtime_error
{
public:
  ConfigError(std::string key, const std::string & what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key))
  {}
  const std::string & key() const noexcept { return key_; }

private:
  std::string key_;
};

namespace detail {

inline std::string trim(const std::string & s)
{
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split(const std::string & s, char sep)
{
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  return out;
}

inline double parse_number(const std::string & key, const std::string & text)
{
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (trim(text.substr(used)).empty() && std::isfinite(value)) return value;
  } catch (const std::exception &) {
  }
  throw ConfigError(key, "cannot parse number '" + text + "'");
}

inline std::vector<double> parse_list(const std::string & key, const std::string & text)
{
  std::vector<double> out;
  for (const auto & item : split(text, ',')) out.push_back(parse_number(key, item));
  return out;
}

inline Vec2 parse_point(const std::string & key, const std::string & text)
{
  const auto values = parse_list(key, text);
  if (values.size() != 2) throw ConfigError(key, "expected a point 'x,y'");
  return {values[0], values[1]};
}

inline int parse_count(const std::string & key, const std::string & text)
{
  const double v = parse_number(key, text);
  if (v != std::floor(v) || v < 0 || v > 1e9) throw ConfigError(key, "expected a non-negative integer");
  return static_cast<int>(v);
}

}  // namespace detail

/// Checks every documented invariant, throwing ConfigError naming the first violated key.
inline void validate(const ScenarioConfig & c)
{
  auto require = [](bool ok, const char * key, const char * what) {
    if (!ok) throw ConfigError(key, what);
  };
  const auto K = static_cast<std::size_t>(c.num_users);
  require(c.num_users >= 1, "K", "must be at least 1");
  require(c.num_slots >= 1, "N", "must be at least 1");
  require(c.slot_length > 0, "delta", "must be > 0");
  require(c.altitude > 0, "h", "must be > 0");
  require(c.max_speed > 0, "v_m", "must be > 0");
  require(c.user_start.size() == K, "ue_positions", "must list exactly K points");
  require(c.mobility_memory >= 0 && c.mobility_memory <= 1, "alpha", "must lie in [0,1]");
  require(c.velocity_std >= 0, "sigma_bar", "must be >= 0");
  require(c.bandwidth > 0, "W", "must be > 0");
  require(c.noise_power > 0, "N0", "must be > 0");
  require(c.reference_gain > 0, "g0", "must be > 0");
  require(c.pathloss_exponent >= 2, "iota_tilde", "must be >= 2");
  require(c.nlos_attenuation > 0 && c.nlos_attenuation <= 1, "kappa", "must lie in (0,1]");
  require(c.los_a > 0, "a", "must be > 0");
  require(c.los_b > 0, "b", "must be > 0");
  auto per_user = [&](const std::vector<double> & v, const char * key, auto pred, const char * what) {
    require(v.size() == K, key, "must have exactly K entries");
    for (double x : v) require(pred(x), key, what);
  };
  per_user(c.transmit_power, "P_k", [](double x) { return x >= 0; }, "must be >= 0");
  per_user(c.arrival_prob, "rho", [](double x) { return x >= 0 && x <= 1; }, "must lie in [0,1]");
  per_user(c.task_bits, "I", [](double x) { return x >= 0; }, "must be >= 0");
  per_user(c.cycles_per_bit, "C", [](double x) { return x > 0; }, "must be > 0");
  per_user(c.max_cpu_freq, "f_max", [](double x) { return x >= 0; }, "must be >= 0");
  per_user(c.energy_weight, "w", [](double x) { return x >= 0; }, "must be >= 0");
  require(c.capacitance >= 0, "gamma_c", "must be >= 0");
  require(c.propulsion.blade_profile >= 0, "C1", "must be >= 0");
  require(c.propulsion.induced >= 0, "C2", "must be >= 0");
  require(c.propulsion.hover_velocity4 > 0, "C3", "must be > 0");
  require(c.propulsion.parasite >= 0, "C4", "must be >= 0");
  require(c.propulsion.tip_speed > 0, "v_tip", "must be > 0");
  require(c.uav_energy_budget >= 0, "E_u", "must be >= 0");
  require(c.tradeoff_weight >= 0, "V", "must be >= 0");
  require(c.data_queue_scale > 0, "s_q", "must be > 0");
  require(c.energy_queue_scale > 0, "s_u", "must be > 0");
  require(c.sca_tolerance > 0, "sca_eps", "must be > 0");
  require(c.sca_max_iterations >= 1, "sca_max_iter", "must be >= 1");
  require((c.uav_end - c.uav_start).norm() <= c.max_speed * c.num_slots * c.slot_length * (1 + 1e-12),
          "p_F", "destination is unreachable within N slots at speed v_m");
}

/// Parses config text. Absent keys keep their defaults; unknown keys are rejected.
inline ScenarioConfig parse_config(const std::string & text)
{
  ScenarioConfig c;
  std::map<std::string, std::string> entries;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", "line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    auto key = detail::trim(line.substr(0, eq));
    auto value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(key, "line " + std::to_string(lineno) + ": empty key or value");
    }
    if (!entries.emplace(key, value).second) throw ConfigError(key, "duplicate key");
  }

  using Setter = std::function<void(const std::string &, const std::string &)>;
  std::map<std::string, std::vector<double>> per_user_raw;
  auto scalar = [](double & field) -> Setter {
    return [&field](const std::string & k, const std::string & v) { field = detail::parse_number(k, v); };
  };
  auto point = [](Vec2 & field) -> Setter {
    return [&field](const std::string & k, const std::string & v) { field = detail::parse_point(k, v); };
  };
  auto per_user = [&per_user_raw](const std::string & k, const std::string & v) {
    per_user_raw[k] = detail::parse_list(k, v);
  };

  const std::map<std::string, Setter> setters{
    {"K", [&](auto & k, auto & v) { c.num_users = detail::parse_count(k, v); }},
    {"N", [&](auto & k, auto & v) { c.num_slots = detail::parse_count(k, v); }},
    {"delta", scalar(c.slot_length)},
    {"h", scalar(c.altitude)},
    {"v_m", scalar(c.max_speed)},
    {"p_I", point(c.uav_start)},
    {"p_F", point(c.uav_end)},
    {"ue_positions",
     [&](auto & k, auto & v) {
       c.user_start.clear();
       for (const auto & item : detail::split(v, ';')) c.user_start.push_back(detail::parse_point(k, item));
     }},
    {"alpha", scalar(c.mobility_memory)},
    {"v_bar", point(c.mean_velocity)},
    {"sigma_bar", scalar(c.velocity_std)},
    {"W", scalar(c.bandwidth)},
    {"N0", scalar(c.noise_power)},
    {"g0", scalar(c.reference_gain)},
    {"iota_tilde", scalar(c.pathloss_exponent)},
    {"kappa", scalar(c.nlos_attenuation)},
    {"a", scalar(c.los_a)},
    {"b", scalar(c.los_b)},
    {"P_k", per_user},
    {"rho", per_user},
    {"I", per_user},
    {"C", per_user},
    {"f_max", per_user},
    {"w", per_user},
    {"gamma_c", scalar(c.capacitance)},
    {"C1", scalar(c.propulsion.blade_profile)},
    {"C2", scalar(c.propulsion.induced)},
    {"C3", scalar(c.propulsion.hover_velocity4)},
    {"C4", scalar(c.propulsion.parasite)},
    {"v_tip", scalar(c.propulsion.tip_speed)},
    {"E_u", scalar(c.uav_energy_budget)},
    {"V", scalar(c.tradeoff_weight)},
    {"s_q", scalar(c.data_queue_scale)},
    {"s_u", scalar(c.energy_queue_scale)},
    {"sca_eps", scalar(c.sca_tolerance)},
    {"sca_max_iter", [&](auto & k, auto & v) { c.sca_max_iterations = detail::parse_count(k, v); }},
    {"seed",
     [&](auto & k, auto & v) {
       const double s = detail::parse_number(k, v);
       if (s < 0 || s != std::floor(s) || s > 9.0e15) throw ConfigError(k, "expected a non-negative integer");
       c.seed = static_cast<std::uint64_t>(s);
     }},
  };

  for (const auto & [key, value] : entries) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(key, "unknown key");
    it->second(key, value);
  }

  // Per-user vectors are resolved once K is final.
  const auto K = static_cast<std::size_t>(c.num_users);
  auto resolve = [&](const char * key, std::vector<double> & field) {
    const auto it = per_user_raw.find(key);
    if (it == per_user_raw.end()) {
      if (field.size() != K) field.assign(K, field.empty() ? 0.0 : field.front());
      return;
    }
    if (it->second.size() == 1) {
      field.assign(K, it->second.front());
    } else if (it->second.size() == K) {
      field = it->second;
    } else {
      throw ConfigError(key, "expected 1 or K values");
    }
  };
  resolve("P_k", c.transmit_power);
  resolve("rho", c.arrival_prob);
  resolve("I", c.task_bits);
  resolve("C", c.cycles_per_bit);
  resolve("f_max", c.max_cpu_freq);
  if (per_user_raw.count("w") == 0) c.energy_weight.assign(K, 1.0 / static_cast<double>(K));
  resolve("w", c.energy_weight);

  validate(c);
  return c;
}

inline ScenarioConfig load_config(const std::string & path)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace uavmec

#endif  // UAVMEC__CONFIG_HPP_
