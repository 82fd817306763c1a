#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "robeq/domain.hpp"
#include "robeq/game.hpp"

namespace robeq {

// Ordered to match the equilibrium configurations: non-stationary points,
// interior equilibria, boundary points that are not extreme, extreme points
// whose gradient sits on the boundary of the normal cone, and robust ones.
enum class Verdict { NotStationary, Interior, BoundaryNonExtreme, ExtremeNonRobust, Robust };

std::string to_string(Verdict v);

struct Tolerances {
  double stat_tol = 1e-8;
  double robust_tol = 1e-6;
  double membership_tol = 1e-9;
};

struct RobustnessCertificate {
  Verdict verdict = Verdict::NotStationary;
  // l1-margin -max{<V, z> : z in TC(x), |z|_1 = 1}; +inf when the cone is {0}.
  double margin = 0.0;
  Eigen::VectorXd witness;
  // max(0, max{<V, z>}) over the same set; positive exactly off stationarity.
  double stationarity_gap = 0.0;
  int lineality = 0;
  std::vector<std::vector<ActiveBound>> active_sets;  // per player, local indices
};

// Classification from a gradient vector at x, independent of any game.
RobustnessCertificate classify_point(const ProductDomain& domain, const Eigen::VectorXd& gradient,
                                     const Eigen::VectorXd& x, const Tolerances& tols = {});

RobustnessCertificate classify_equilibrium(const Game& game, const Eigen::VectorXd& x,
                                           const Tolerances& tols = {});

// {verdict, margin, witness[], active_sets[][], stationarity_gap, ...}. An
// infinite margin serializes as null.
nlohmann::json to_json(const RobustnessCertificate& cert);

}  // namespace robeq
