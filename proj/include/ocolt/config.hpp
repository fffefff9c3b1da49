#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ocolt/errors.hpp"
#include "ocolt/problem.hpp"

namespace ocolt {

// Inline problem description for runs that do not draw the instance from a
// seed. Boxes and balls only, linear constraints only at the config level.
struct InstanceConfig {
  std::string set_kind = "box";  // box | ball
  std::vector<double> lower, upper;
  std::vector<double> center;
  double radius = 0.0;
  std::vector<std::vector<double>> A;
  std::vector<double> b;
  std::optional<double> D, beta, G, R, epsilon;
  std::vector<double> slater_point;

  bool operator==(const InstanceConfig&) const = default;
};

struct RunConfig {
  std::string command = "run";  // run | compare | tune | replicate-paper | doubling
  std::uint64_t seed = 42;
  std::vector<std::uint64_t> seeds;  // defaults to {seed}
  long T = 5000;
  int n = 2;
  int m = 3;
  std::string algorithm = "vq";  // vq | ogd-proj | primal-dual
  double theta_exp = 0.5;
  std::vector<double> compare_theta_exps = {0.5, 2.0 / 3.0};
  std::optional<double> gamma, alpha, eta;  // overrides of the schedule
  std::string out_dir = "out";
  bool plots = true;
  std::string tune_mode = "minimax";
  std::optional<double> cap;
  std::optional<InstanceConfig> instance;

  bool operator==(const RunConfig&) const = default;

  std::vector<std::uint64_t> effective_seeds() const {
    return seeds.empty() ? std::vector<std::uint64_t>{seed} : seeds;
  }
};

namespace config_detail {

inline void reject_unknown_keys(const nlohmann::json& j,
                                const std::set<std::string>& allowed,
                                const std::string& path) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key))
      throw ConfigError("unknown configuration key: " + path + key);
  }
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

template <typename T>
void read_opt(const nlohmann::json& j, const char* key,
              std::optional<T>& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

inline InstanceConfig parse_instance(const nlohmann::json& j) {
  reject_unknown_keys(j,
                      {"set", "lower", "upper", "center", "radius", "A", "b",
                       "D", "beta", "G", "R", "epsilon", "slater_point"},
                      "instance.");
  InstanceConfig ic;
  read(j, "set", ic.set_kind);
  read(j, "lower", ic.lower);
  read(j, "upper", ic.upper);
  read(j, "center", ic.center);
  read(j, "radius", ic.radius);
  read(j, "A", ic.A);
  read(j, "b", ic.b);
  read_opt(j, "D", ic.D);
  read_opt(j, "beta", ic.beta);
  read_opt(j, "G", ic.G);
  read_opt(j, "R", ic.R);
  read_opt(j, "epsilon", ic.epsilon);
  read(j, "slater_point", ic.slater_point);
  if (ic.set_kind != "box" && ic.set_kind != "ball")
    throw ConfigError("instance.set must be box or ball");
  return ic;
}

inline nlohmann::json instance_to_json(const InstanceConfig& ic) {
  nlohmann::json j;
  j["set"] = ic.set_kind;
  if (!ic.lower.empty()) j["lower"] = ic.lower;
  if (!ic.upper.empty()) j["upper"] = ic.upper;
  if (!ic.center.empty()) j["center"] = ic.center;
  if (ic.radius != 0.0) j["radius"] = ic.radius;
  if (!ic.A.empty()) j["A"] = ic.A;
  if (!ic.b.empty()) j["b"] = ic.b;
  if (ic.D) j["D"] = *ic.D;
  if (ic.beta) j["beta"] = *ic.beta;
  if (ic.G) j["G"] = *ic.G;
  if (ic.R) j["R"] = *ic.R;
  if (ic.epsilon) j["epsilon"] = *ic.epsilon;
  if (!ic.slater_point.empty()) j["slater_point"] = ic.slater_point;
  return j;
}

}  // namespace config_detail

inline void validate_config(const RunConfig& c) {
  static const std::set<std::string> commands = {
      "run", "compare", "tune", "replicate-paper", "doubling"};
  if (!commands.count(c.command))
    throw ConfigError("command must be one of run, compare, tune, "
                      "replicate-paper, doubling; got: " + c.command);
  if (c.T < 1) throw ConfigError("T must be >= 1");
  if (c.n < 1 || c.m < 1) throw ConfigError("n and m must be >= 1");
  if (c.effective_seeds().empty()) throw ConfigError("seeds must be nonempty");
  if (c.algorithm != "vq" && c.algorithm != "ogd-proj" &&
      c.algorithm != "primal-dual")
    throw ConfigError("algorithm must be vq, ogd-proj or primal-dual");
  if (!(c.theta_exp > 0.0 && c.theta_exp < 1.0))
    throw ConfigError("theta_exp must lie in (0, 1)");
  for (const double theta : c.compare_theta_exps)
    if (!(theta > 0.0 && theta < 1.0))
      throw ConfigError("compare_theta_exps entries must lie in (0, 1)");
  if (c.tune_mode != "minimax" && c.tune_mode != "regret-subject-to-violation" &&
      c.tune_mode != "violation-subject-to-regret")
    throw ConfigError("tune_mode must be minimax, regret-subject-to-violation "
                      "or violation-subject-to-regret");
  if (c.out_dir.empty()) throw ConfigError("out_dir must not be empty");
}

// Parses a JSON config document. Unknown keys are rejected with their path;
// silent typos in hyperparameter names would quietly corrupt benchmark runs.
inline RunConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  config_detail::reject_unknown_keys(
      j,
      {"command", "seed", "seeds", "T", "n", "m", "algorithm", "theta_exp",
       "compare_theta_exps", "gamma", "alpha", "eta", "out_dir", "plots",
       "tune_mode", "cap", "instance"},
      "");
  RunConfig c;
  try {
    config_detail::read(j, "command", c.command);
    config_detail::read(j, "seed", c.seed);
    config_detail::read(j, "seeds", c.seeds);
    config_detail::read(j, "T", c.T);
    config_detail::read(j, "n", c.n);
    config_detail::read(j, "m", c.m);
    config_detail::read(j, "algorithm", c.algorithm);
    config_detail::read(j, "theta_exp", c.theta_exp);
    config_detail::read(j, "compare_theta_exps", c.compare_theta_exps);
    config_detail::read_opt(j, "gamma", c.gamma);
    config_detail::read_opt(j, "alpha", c.alpha);
    config_detail::read_opt(j, "eta", c.eta);
    config_detail::read(j, "out_dir", c.out_dir);
    config_detail::read(j, "plots", c.plots);
    config_detail::read(j, "tune_mode", c.tune_mode);
    config_detail::read_opt(j, "cap", c.cap);
    if (j.contains("instance"))
      c.instance = config_detail::parse_instance(j.at("instance"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config field has wrong type: ") + e.what());
  }
  validate_config(c);
  return c;
}

inline std::string serialize_config(const RunConfig& c) {
  nlohmann::json j;
  j["command"] = c.command;
  j["seed"] = c.seed;
  if (!c.seeds.empty()) j["seeds"] = c.seeds;
  j["T"] = c.T;
  j["n"] = c.n;
  j["m"] = c.m;
  j["algorithm"] = c.algorithm;
  j["theta_exp"] = c.theta_exp;
  j["compare_theta_exps"] = c.compare_theta_exps;
  if (c.gamma) j["gamma"] = *c.gamma;
  if (c.alpha) j["alpha"] = *c.alpha;
  if (c.eta) j["eta"] = *c.eta;
  j["out_dir"] = c.out_dir;
  j["plots"] = c.plots;
  j["tune_mode"] = c.tune_mode;
  if (c.cap) j["cap"] = *c.cap;
  if (c.instance) j["instance"] = config_detail::instance_to_json(*c.instance);
  return j.dump(2) + "\n";
}

// Materializes an inline instance description, deriving any constants that
// were left out.
inline ProblemInstance instance_from_config(const InstanceConfig& ic) {
  SimpleSet set = [&] {
    if (ic.set_kind == "box") {
      if (ic.lower.empty() || ic.upper.empty())
        throw ConfigError("box instance needs lower and upper");
      return SimpleSet::box(
          Eigen::Map<const Vec>(ic.lower.data(),
                                static_cast<Eigen::Index>(ic.lower.size())),
          Eigen::Map<const Vec>(ic.upper.data(),
                                static_cast<Eigen::Index>(ic.upper.size())));
    }
    if (ic.center.empty()) throw ConfigError("ball instance needs center");
    return SimpleSet::ball(
        Eigen::Map<const Vec>(ic.center.data(),
                              static_cast<Eigen::Index>(ic.center.size())),
        ic.radius);
  }();

  if (ic.A.empty()) throw ConfigError("instance needs constraint matrix A");
  const int m = static_cast<int>(ic.A.size());
  const int n = set.dim();
  Mat A(m, n);
  for (int k = 0; k < m; ++k) {
    if (static_cast<int>(ic.A[static_cast<std::size_t>(k)].size()) != n)
      throw ConfigError("instance.A row " + std::to_string(k) +
                        " has wrong length");
    for (int i = 0; i < n; ++i)
      A(k, i) = ic.A[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
  }
  if (static_cast<int>(ic.b.size()) != m)
    throw ConfigError("instance.b has wrong length");
  Vec b = Eigen::Map<const Vec>(ic.b.data(), m);

  ProblemInstance inst{std::move(set),
                       ConstraintFunction::linear(std::move(A), std::move(b))};
  if (ic.D) inst.D = *ic.D;
  if (ic.beta) inst.beta = *ic.beta;
  if (ic.G) inst.G = *ic.G;
  if (ic.R) inst.R = *ic.R;
  inst = derive_constants(std::move(inst));
  if (ic.epsilon && !ic.slater_point.empty()) {
    inst.epsilon = *ic.epsilon;
    inst.slater_point = Eigen::Map<const Vec>(
        ic.slater_point.data(),
        static_cast<Eigen::Index>(ic.slater_point.size()));
  } else {
    auto [x_hat, eps] = estimate_slater(inst.set, inst.constraints);
    inst.slater_point = std::move(x_hat);
    inst.epsilon = eps;
  }
  return inst;
}

}  // namespace ocolt
