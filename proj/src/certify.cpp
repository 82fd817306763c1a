#include "robeq/certify.hpp"

#include <algorithm>
#include <cmath>

namespace robeq {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::NotStationary: return "NotStationary";
    case Verdict::Interior: return "Interior";
    case Verdict::BoundaryNonExtreme: return "BoundaryNonExtreme";
    case Verdict::ExtremeNonRobust: return "ExtremeNonRobust";
    case Verdict::Robust: return "Robust";
  }
  return "unknown";
}

RobustnessCertificate classify_point(const ProductDomain& domain, const Eigen::VectorXd& gradient,
                                     const Eigen::VectorXd& x, const Tolerances& tols) {
  const TangentConeRep cone = tangent_cone(domain, x, tols.membership_tol);
  RobustnessCertificate cert;
  for (int i = 0; i < domain.num_players(); ++i) {
    cert.active_sets.push_back(
        active_set(domain.player(i), domain.block(x, i), tols.membership_tol));
  }
  const MarginResult m = robustness_margin(gradient, cone);
  cert.margin = m.margin;
  cert.witness = m.witness;
  cert.stationarity_gap = std::isinf(m.margin) ? 0.0 : std::max(0.0, -m.margin);
  cert.lineality = lineality_dim(cone);

  if (cert.stationarity_gap > tols.stat_tol) {
    cert.verdict = Verdict::NotStationary;
  } else if (cone.active.empty()) {
    cert.verdict = Verdict::Interior;
  } else if (cert.lineality > 0) {
    cert.verdict = Verdict::BoundaryNonExtreme;
  } else if (cert.margin > tols.robust_tol) {
    cert.verdict = Verdict::Robust;
  } else {
    cert.verdict = Verdict::ExtremeNonRobust;
  }
  return cert;
}

RobustnessCertificate classify_equilibrium(const Game& game, const Eigen::VectorXd& x,
                                           const Tolerances& tols) {
  game.domain().require_contains(x, tols.membership_tol);
  return classify_point(game.domain(), game.field(x), x, tols);
}

nlohmann::json to_json(const RobustnessCertificate& cert) {
  nlohmann::json j;
  j["verdict"] = to_string(cert.verdict);
  if (std::isfinite(cert.margin)) j["margin"] = cert.margin;
  else j["margin"] = nullptr;
  j["witness"] = std::vector<double>(cert.witness.data(), cert.witness.data() + cert.witness.size());
  nlohmann::json sets = nlohmann::json::array();
  nlohmann::json sides = nlohmann::json::array();
  for (const auto& player : cert.active_sets) {
    nlohmann::json idx = nlohmann::json::array(), side = nlohmann::json::array();
    for (const auto& a : player) {
      idx.push_back(a.index);
      side.push_back(a.side == BoundSide::Lower ? "lower" : "upper");
    }
    sets.push_back(idx);
    sides.push_back(side);
  }
  j["active_sets"] = sets;
  j["active_sides"] = sides;
  j["stationarity_gap"] = cert.stationarity_gap;
  j["lineality_dim"] = cert.lineality;
  return j;
}

}  // namespace robeq
