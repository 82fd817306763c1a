#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "robeq/analysis.hpp"
#include "robeq/certify.hpp"
#include "robeq/dynamics.hpp"
#include "robeq/sweep.hpp"

namespace robeq {

// Carries a machine-readable code ("config.missing", "config.type",
// "config.value", "config.unknown_key", "config.io") and the dotted key at
// fault.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string code, std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message),
        code_(std::move(code)),
        key_(std::move(key)) {}
  const std::string& code() const { return code_; }
  const std::string& key() const { return key_; }

 private:
  std::string code_;
  std::string key_;
};

struct OracleConfig {
  std::string kind = "perfect";  // perfect | sfo | spsa
  // sfo
  std::string noise = "gaussian";  // gaussian | rademacher | covariance
  double sigma = 1.0;
  Eigen::MatrixXd covariance;
  // spsa
  double delta0 = 0.1;
  double rho = 0.25;
  std::optional<std::vector<Eigen::VectorXd>> pivots;
  std::optional<std::vector<double>> radii;
};

struct AnalysisConfig {
  double eps_conv = 1e-3;
  double window_frac = 0.5;
  long runs = 200;
  std::optional<double> min_fraction;  // sweep passes when estimate >= this
  std::optional<double> max_fraction;  // sweep passes when estimate <= this
  RateModel rate_model = RateModel::GeometricLog;
  std::optional<long> burn_in;
  std::optional<double> recurrence_level;
};

struct OutputConfig {
  std::string dir = ".";
  std::vector<std::string> formats{"csv", "json"};
};

struct ExperimentConfig {
  GameSpec game;
  std::string bimatrix_path;  // kept for round trips when loaded from a file
  std::optional<nlohmann::json> domain;  // optional declaration, checked against the game
  std::vector<std::string> regularizer;  // one name per player, or a single shared name
  OracleConfig oracle;
  RunConfig run;
  std::optional<Eigen::VectorXd> reference;
  AnalysisConfig analysis;
  Tolerances tolerances;
  OutputConfig output;
};

// Schema and cross validation. base_dir resolves relative bimatrix paths.
ExperimentConfig parse_config(const nlohmann::json& j, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path,
                             const std::vector<std::string>& overrides = {});
nlohmann::json to_json(const ExperimentConfig& cfg);

// Applies "a.b.c=value"; value is read as JSON when it parses, else as a string.
void apply_override(nlohmann::json& j, const std::string& assignment);

// Built objects; throws ConfigError naming the key when they are inconsistent.
Game build_game(const ExperimentConfig& cfg);
RegularizerSpec build_regularizer(const ExperimentConfig& cfg, const ProductDomain& domain);
OracleSpec build_oracle(const ExperimentConfig& cfg, const ProductDomain& domain);
Experiment build_experiment(const ExperimentConfig& cfg);

// Full cross validation: dimensions, mirror pairs, SPSA constraints, run.
void validate_config(const ExperimentConfig& cfg);

}  // namespace robeq
