#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "bouss/dynamics.hpp"
#include "bouss/grid.hpp"

namespace bouss {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scenario { stable, bubble, custom };
enum class ProfileKind { linear, tabulated };

struct RunConfig {
  int kmax = 21;
  int n2 = 129;

  Scenario scenario = Scenario::stable;
  double eps = 1e-2;
  std::uint64_t seed = 1;
  BubbleShape bubble;
  std::string initial_file;  // custom scenario; random perturbation when empty

  ProfileKind profile = ProfileKind::linear;
  double alpha = 1.0;
  std::string profile_file;

  double dt = 1e-2;
  double cfl_target = 0.5;
  double t_final = 200.0;
  int output_every = 100;
  int checkpoint_every = 0;  // steps; 0 writes only the final checkpoint

  std::string out_dir = "out";

  std::optional<double> c1;
  double fit_t_lo = 25.0;
  double fit_t_hi = 0.0;  // 0 means t_final
  double t_burn = 10.0;
  double window = 10.0;

  std::int64_t total_steps() const;
  double fit_hi() const { return fit_t_hi > 0.0 ? fit_t_hi : t_final; }
};

// Sections [grid] [scenario] [profile] [time] [output] [analysis]; unknown
// sections or keys are errors. Relative paths resolve against base_dir.
RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);
std::string config_to_ini(const RunConfig& c);

std::string to_string(Scenario s);
std::string to_string(ProfileKind p);

}  // namespace bouss
