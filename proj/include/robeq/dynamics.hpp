#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "robeq/feedback.hpp"
#include "robeq/game.hpp"
#include "robeq/regularizer.hpp"

namespace robeq {

enum class Algorithm { FTRL, MD };

struct ConstantStep {
  double gamma = 0.1;
};
// gamma_n = gamma0 / n^p
struct PowerStep {
  double gamma0 = 1.0;
  double p = 0.5;
};
using StepSchedule = std::variant<ConstantStep, PowerStep>;

double step_value(const StepSchedule& schedule, long n);

struct DualInit {
  Eigen::VectorXd y;
};
struct PrimalInit {
  Eigen::VectorXd x;
};
using InitPoint = std::variant<DualInit, PrimalInit>;

enum class DistanceNorm { L1, L2, Linf };
double distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b, DistanceNorm norm);

struct RunConfig {
  Algorithm algorithm = Algorithm::FTRL;
  StepSchedule step = ConstantStep{};
  long horizon = 1000;
  InitPoint init = DualInit{};
  std::uint64_t seed = 0;
  std::uint64_t run_index = 0;  // selects the per-run random streams
  long thinning = 1;
  DistanceNorm norm = DistanceNorm::L2;
  std::optional<Eigen::VectorXd> reference;
};

// Throws std::invalid_argument on an inconsistent configuration.
void validate_run_config(const RunConfig& cfg, const ProductDomain& domain);

enum class RunStatus { Ok, Diverged };

struct TrajectoryPoint {
  long n;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  double dist_ref;  // NaN without a reference
  double delta_n;   // NaN unless SPSA
  double gamma_n;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;  // thinned; the last iterate is always kept
  Eigen::VectorXd final_x;
  Eigen::VectorXd final_y;
  RunStatus status = RunStatus::Ok;
  bool saturated = false;  // some dual coordinate hit the +/-1e300 clamp
  std::uint64_t seed = 0;
  RunConfig config;
  long horizon() const { return config.horizon; }
};

// Dual components are clamped to this magnitude (saturation flag set).
inline constexpr double kDualClamp = 1e300;

// Called at every step n with (x_n, y_n), regardless of thinning.
using StepObserver =
    std::function<void(long n, const Eigen::VectorXd& x, const Eigen::VectorXd& y)>;

// y_{n+1} = y_n + gamma_n v_n,  x_n = Q(y_n).
Trajectory run_ftrl(const Game& game, const RegularizerSpec& reg, const OracleSpec& oracle,
                    const RunConfig& cfg, const StepObserver& observer = {});

// x_{n+1} = Q(grad h(x_n) + gamma_n v_n). With steep regularizers this
// coincides with FTRL and delegates to it.
Trajectory run_md(const Game& game, const RegularizerSpec& reg, const OracleSpec& oracle,
                  const RunConfig& cfg, const StepObserver& observer = {});

// Dispatches on cfg.algorithm.
Trajectory run(const Game& game, const RegularizerSpec& reg, const OracleSpec& oracle,
               const RunConfig& cfg, const StepObserver& observer = {});

}  // namespace robeq
