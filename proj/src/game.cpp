#include "robeq/game.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "robeq/rng.hpp"

namespace robeq {
namespace {

constexpr double kPrecondTol = 1e-12;

double param(const CatalogSpec& spec, const std::string& key, double fallback) {
  auto it = spec.params.find(key);
  return it == spec.params.end() ? fallback : it->second;
}

ProductDomain unit_interval() { return ProductDomain({PlayerDomain::interval(0.0, 1.0)}); }

Game scalar_game(std::function<double(double)> u, std::function<double(double)> v,
                 std::string label) {
  PayoffFn payoff = [u = std::move(u)](const Eigen::VectorXd& x) { return u(x[0]); };
  GradFn grad = [v = std::move(v)](const Eigen::VectorXd& x) {
    return Eigen::VectorXd::Constant(1, v(x[0]));
  };
  return Game(unit_interval(), {payoff}, {grad}, std::move(label));
}

Game bimatrix_game(const BimatrixSpec& spec, std::string label) {
  if (spec.A1.rows() != spec.A2.rows() || spec.A1.cols() != spec.A2.cols() ||
      spec.A1.size() == 0) {
    throw std::invalid_argument("bimatrix: A1 and A2 must be nonempty and of equal shape");
  }
  if (!spec.A1.allFinite() || !spec.A2.allFinite()) {
    throw std::invalid_argument("bimatrix: payoff entries must be finite");
  }
  const int m = static_cast<int>(spec.A1.rows());
  const int n = static_cast<int>(spec.A1.cols());
  ProductDomain dom({PlayerDomain::simplex(m), PlayerDomain::simplex(n)});
  const Eigen::MatrixXd A1 = spec.A1, A2 = spec.A2;
  PayoffFn u1 = [A1, m, n](const Eigen::VectorXd& x) {
    return x.head(m).dot(A1 * x.segment(m, n));
  };
  PayoffFn u2 = [A2, m, n](const Eigen::VectorXd& x) {
    return x.head(m).dot(A2 * x.segment(m, n));
  };
  GradFn v1 = [A1, m, n](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return A1 * x.segment(m, n);
  };
  GradFn v2 = [A2, m](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return A2.transpose() * x.head(m);
  };
  return Game(std::move(dom), {u1, u2}, {v1, v2}, std::move(label));
}

// Radical inverse of `index` in `base`.
double radical_inverse(std::uint64_t index, int base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

int nth_prime(int k) {
  static const int primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
                               43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};
  if (k < 25) return primes[k];
  int c = primes[24] + 2, found = 24;
  for (;; c += 2) {
    bool prime = true;
    for (int p = 3; p * p <= c; p += 2) {
      if (c % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime && ++found == k) return c;
  }
}

// Extreme points used to sample general polytopes.
std::vector<Eigen::VectorXd> polytope_anchors(const PlayerDomain& d) {
  std::vector<Eigen::VectorXd> out;
  for (int j = 0; j < d.dim(); ++j) {
    for (const double s : {1.0, -1.0}) {
      out.push_back(d.linear_argmax(s * Eigen::VectorXd::Unit(d.dim(), j)));
    }
  }
  return out;
}

int sampling_dims(const PlayerDomain& d) {
  return d.kind() == DomainKind::Polytope ? 2 * d.dim() : d.dim();
}

void map_to_domain(const PlayerDomain& d, const double* u, const std::vector<Eigen::VectorXd>& anchors,
                   Eigen::Ref<Eigen::VectorXd> out) {
  switch (d.kind()) {
    case DomainKind::Interval:
    case DomainKind::Box:
      for (int j = 0; j < d.dim(); ++j) {
        out[j] = d.lower()[j] + u[j] * (d.upper()[j] - d.lower()[j]);
      }
      return;
    case DomainKind::Simplex: {
      double total = 0.0;
      for (int j = 0; j < d.dim(); ++j) {
        out[j] = -std::log(std::max(u[j], 1e-300));
        total += out[j];
      }
      out /= total;
      return;
    }
    case DomainKind::Polytope: {
      Eigen::VectorXd w(anchors.size());
      for (std::size_t k = 0; k < anchors.size(); ++k) w[k] = -std::log(std::max(u[k], 1e-300));
      w /= w.sum();
      out.setZero();
      for (std::size_t k = 0; k < anchors.size(); ++k) out += w[k] * anchors[k];
      return;
    }
  }
}

}  // namespace

Game::Game(ProductDomain domain, std::vector<PayoffFn> payoffs, std::vector<GradFn> grads,
           std::string label) {
  if (static_cast<int>(payoffs.size()) != domain.num_players()) {
    throw std::invalid_argument("game: one payoff per player required");
  }
  grads.resize(payoffs.size());
  impl_ = std::make_shared<const Impl>(
      Impl{std::move(domain), std::move(payoffs), std::move(grads), std::move(label)});
}

Eigen::VectorXd Game::grad(int i, const Eigen::VectorXd& x) const {
  const auto& g = impl_->grads.at(i);
  return g ? g(x) : fd_grad(i, x);
}

Eigen::VectorXd Game::fd_grad(int i, const Eigen::VectorXd& x) const {
  const auto& d = domain().player(i);
  const int off = domain().offset(i);
  Eigen::VectorXd g(d.dim());
  Eigen::VectorXd xp = x;
  for (int j = 0; j < d.dim(); ++j) {
    const double xj = x[off + j];
    const double h = kFdStep * std::max(1.0, std::abs(xj));
    const bool down = xj - h >= d.range_min()[j];
    const bool up = xj + h <= d.range_max()[j];
    const double lo = down ? xj - h : xj;
    const double hi = up ? xj + h : xj;
    xp[off + j] = hi;
    const double fh = payoff(i, xp);
    xp[off + j] = lo;
    const double fl = payoff(i, xp);
    xp[off + j] = xj;
    g[j] = (fh - fl) / (hi - lo);
  }
  return g;
}

Eigen::VectorXd Game::field(const Eigen::VectorXd& x) const {
  Eigen::VectorXd v(domain().total_dim());
  for (int i = 0; i < num_players(); ++i) domain().block(v, i) = grad(i, x);
  return v;
}

std::vector<std::string> catalog_ids() {
  return {"boundary_quartic", "linear_interval", "interior_quadratic", "zero", "coordination"};
}

Game make_game(const GameSpec& spec) {
  if (const auto* b = std::get_if<BimatrixSpec>(&spec)) return bimatrix_game(*b, "bimatrix");
  const auto& c = std::get<CatalogSpec>(spec);
  if (c.id == "boundary_quartic") {
    return scalar_game([](double x) { return -0.75 * x * std::cbrt(x); },
                       [](double x) { return -std::cbrt(x); }, c.id);
  }
  if (c.id == "linear_interval") {
    const double slope = param(c, "slope", 1.0);
    return scalar_game([slope](double x) { return slope * x; },
                       [slope](double) { return slope; }, c.id);
  }
  if (c.id == "interior_quadratic") {
    const double center = param(c, "c", 0.5);
    return scalar_game([center](double x) { return -(x - center) * (x - center); },
                       [center](double x) { return -2.0 * (x - center); }, c.id);
  }
  if (c.id == "zero") {
    return scalar_game([](double) { return 0.0; }, [](double) { return 0.0; }, c.id);
  }
  if (c.id == "coordination") {
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);
    return bimatrix_game({eye, eye}, c.id);
  }
  throw std::invalid_argument("unknown catalog game '" + c.id + "'");
}

BimatrixSpec load_bimatrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open bimatrix file '" + path + "'");
  const nlohmann::json j = nlohmann::json::parse(in);
  auto read = [&j](const char* key) {
    if (!j.contains(key) || !j[key].is_array() || j[key].empty()) {
      throw std::invalid_argument(std::string("bimatrix file: missing matrix '") + key + "'");
    }
    const auto& rows = j[key];
    const auto cols = rows[0].size();
    Eigen::MatrixXd m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (!rows[r].is_array() || rows[r].size() != cols) {
        throw std::invalid_argument(std::string("bimatrix file: ragged matrix '") + key + "'");
      }
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c].get<double>();
    }
    return m;
  };
  return {read("A1"), read("A2")};
}

Eigen::VectorXd gradient_field(const Game& game, const Eigen::VectorXd& x, double tol) {
  game.domain().require_contains(x, tol);
  return game.field(x);
}

double vi_gap(const Game& game, const Eigen::VectorXd& x) {
  const Eigen::VectorXd v = game.field(x);
  double gap = 0.0;
  for (int i = 0; i < game.num_players(); ++i) {
    const Eigen::VectorXd vi = game.domain().block(v, i);
    gap += game.domain().player(i).support(vi) - vi.dot(game.domain().block(x, i));
  }
  return gap;
}

std::vector<Eigen::VectorXd> sample_points(const ProductDomain& domain, int count,
                                           std::uint64_t seed) {
  int dims = 0;
  std::vector<std::vector<Eigen::VectorXd>> anchors(domain.num_players());
  for (int i = 0; i < domain.num_players(); ++i) {
    dims += sampling_dims(domain.player(i));
    if (domain.player(i).kind() == DomainKind::Polytope) {
      anchors[i] = polytope_anchors(domain.player(i));
    }
  }
  CounterRng rng(seed);
  std::vector<double> shift(dims);
  for (auto& s : shift) s = rng.uniform();

  std::vector<Eigen::VectorXd> out;
  out.reserve(count);
  std::vector<double> u(dims);
  for (int k = 0; k < count; ++k) {
    for (int j = 0; j < dims; ++j) {
      double v = radical_inverse(static_cast<std::uint64_t>(k) + 1, nth_prime(j)) + shift[j];
      u[j] = v - std::floor(v);
    }
    Eigen::VectorXd x(domain.total_dim());
    int base = 0;
    for (int i = 0; i < domain.num_players(); ++i) {
      map_to_domain(domain.player(i), u.data() + base, anchors[i], domain.block(x, i));
      base += sampling_dims(domain.player(i));
    }
    out.push_back(std::move(x));
  }
  return out;
}

double game_distance(const Game& g, const Game& h, int samples, std::uint64_t seed,
                     const std::vector<Eigen::VectorXd>& anchors) {
  if (!(g.domain() == h.domain())) throw std::invalid_argument("game_distance: domain mismatch");
  double best = 0.0;
  auto visit = [&](const Eigen::VectorXd& x) {
    best = std::max(best, (g.field(x) - h.field(x)).cwiseAbs().maxCoeff());
  };
  for (const auto& x : sample_points(g.domain(), samples, seed)) visit(x);
  for (const auto& x : anchors) visit(x);
  return best;
}

double uniform_payoff_distance(const Game& g, const Game& h, int samples, std::uint64_t seed,
                               const std::vector<Eigen::VectorXd>& anchors) {
  if (!(g.domain() == h.domain())) {
    throw std::invalid_argument("uniform_payoff_distance: domain mismatch");
  }
  double best = 0.0;
  auto visit = [&](const Eigen::VectorXd& x) {
    for (int i = 0; i < g.num_players(); ++i) {
      best = std::max(best, std::abs(g.payoff(i, x) - h.payoff(i, x)));
    }
  };
  for (const auto& x : sample_points(g.domain(), samples, seed)) visit(x);
  for (const auto& x : anchors) visit(x);
  return best;
}

namespace {

// Copies g's evaluators, replacing player i's pair.
Game replace_player(const Game& g, int player, PayoffFn u, GradFn v, const std::string& tag) {
  std::vector<PayoffFn> us;
  std::vector<GradFn> vs;
  for (int i = 0; i < g.num_players(); ++i) {
    if (i == player) {
      us.push_back(u);
      vs.push_back(v);
    } else {
      us.push_back([g, i](const Eigen::VectorXd& x) { return g.payoff(i, x); });
      vs.push_back([g, i](const Eigen::VectorXd& x) { return g.grad(i, x); });
    }
  }
  return Game(g.domain(), std::move(us), std::move(vs), g.label() + "+" + tag);
}

void check_player(const Game& g, int player, const Eigen::VectorXd& xstar, double eps) {
  if (player < 0 || player >= g.num_players()) throw ConstructionError("player index out of range");
  if (!(eps > 0)) throw ConstructionError("eps must be positive");
  g.domain().require_contains(xstar, 1e-9);
}

}  // namespace

Game perturb_collapse1(const Game& g, int player, const Eigen::VectorXd& xstar, double eps) {
  check_player(g, player, xstar, eps);
  const auto& dom = g.domain();
  const Eigen::VectorXd vstar = g.grad(player, xstar);
  const Eigen::VectorXd xi = dom.block(xstar, player);
  if (vstar.cwiseAbs().maxCoeff() <= kPrecondTol) {
    throw ConstructionError("collapse-1 needs V_i(x*) != 0");
  }
  // Exists p_i with <V_i(x*), p_i - x*_i> < 0  <=>  min_p <V_i, p> < <V_i, x*_i>.
  const double lowest = -dom.player(player).support(-vstar);
  if (!(lowest < vstar.dot(xi) - kPrecondTol)) {
    throw ConstructionError("collapse-1 needs a deviation p_i with <V_i(x*), p_i - x*_i> < 0");
  }
  const int off = dom.offset(player), n = dom.player(player).dim();
  PayoffFn u = [g, player, vstar, xi, eps, off, n](const Eigen::VectorXd& x) {
    return g.payoff(player, x) - eps * std::exp(2.0 / eps * vstar.dot(x.segment(off, n) - xi));
  };
  GradFn v = [g, player, vstar, xi, eps, off, n](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const double e = std::exp(2.0 / eps * vstar.dot(x.segment(off, n) - xi));
    return g.grad(player, x) - 2.0 * e * vstar;
  };
  return replace_player(g, player, std::move(u), std::move(v), "collapse1");
}

Game perturb_collapse2(const Game& g, int player, const Eigen::VectorXd& xstar, double eps,
                       const Eigen::VectorXd& y) {
  check_player(g, player, xstar, eps);
  const auto& dom = g.domain();
  const auto& di = dom.player(player);
  if (y.size() != di.dim() || y.cwiseAbs().maxCoeff() <= kPrecondTol) {
    throw ConstructionError("collapse-2 needs a nonzero dual vector y for the player");
  }
  // <V(x*), x - x*> vanishes on all of X iff its max and min over X are zero.
  const Eigen::VectorXd v = g.field(xstar);
  for (int i = 0; i < g.num_players(); ++i) {
    const Eigen::VectorXd vi = dom.block(v, i);
    const double at = vi.dot(dom.block(xstar, i));
    const double hi = dom.player(i).support(vi) - at;
    const double lo = -dom.player(i).support(-vi) - at;
    if (hi > 1e-9 || lo < -1e-9) {
      throw ConstructionError("collapse-2 needs <V(x*), x - x*> = 0 for all x");
    }
  }
  const Eigen::VectorXd xi = dom.block(xstar, player);
  if (!(di.support(y) > y.dot(xi) + kPrecondTol)) {
    throw ConstructionError("collapse-2 needs p_i with <y, p_i - x*_i> > 0");
  }
  const double scale = eps / (di.l1_diameter() * y.cwiseAbs().maxCoeff());
  const int off = dom.offset(player), n = di.dim();
  PayoffFn u = [g, player, y, xi, scale, off, n](const Eigen::VectorXd& x) {
    return g.payoff(player, x) + scale * y.dot(x.segment(off, n) - xi);
  };
  GradFn vfn = [g, player, y, scale](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return g.grad(player, x) + scale * y;
  };
  return replace_player(g, player, std::move(u), std::move(vfn), "collapse2");
}

Game perturb_constant(const Game& g, const Eigen::VectorXd& shift) {
  if (shift.size() != g.domain().total_dim()) {
    throw std::invalid_argument("perturb_constant: shift dimension mismatch");
  }
  std::vector<PayoffFn> us;
  std::vector<GradFn> vs;
  const auto& dom = g.domain();
  for (int i = 0; i < g.num_players(); ++i) {
    const Eigen::VectorXd s = dom.block(shift, i);
    const int off = dom.offset(i), n = dom.player(i).dim();
    us.push_back([g, i, s, off, n](const Eigen::VectorXd& x) {
      return g.payoff(i, x) + s.dot(x.segment(off, n));
    });
    vs.push_back([g, i, s](const Eigen::VectorXd& x) -> Eigen::VectorXd { return g.grad(i, x) + s; });
  }
  return Game(dom, std::move(us), std::move(vs), g.label() + "+shift");
}

}  // namespace robeq
