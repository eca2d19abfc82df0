#include "nucheck/sup_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nucheck/error.hpp"

namespace nucheck {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kCandidates = 4;
constexpr double kGolden = 0.6180339887498949;

struct Probe {
  double t = 0.0;
  double theta = 0.0;
  double value = -INFINITY;
};

// Maximize g on [a, b]. Starts from the incumbent (x0, g0) and only returns a
// point that is at least as good; endpoints are compared too, with ties kept
// at the smaller abscissa.
std::pair<double, double> golden_max(const std::function<double(double)>& g, double a, double b,
                                     double x0, double g0, double xtol) {
  double best_x = x0, best_g = g0;
  auto consider = [&](double x, double v) {
    if (v > best_g || (v == best_g && x < best_x)) {
      best_x = x;
      best_g = v;
    }
  };
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double gc = g(c), gd = g(d);
  for (int it = 0; it < 200 && (b - a) > xtol; ++it) {
    if (gc >= gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - kGolden * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + kGolden * (b - a);
      gd = g(d);
    }
  }
  consider(c, gc);
  consider(d, gd);
  consider(a, g(a));
  consider(b, g(b));
  return {best_x, best_g};
}

double checked(const std::function<double(cplx)>& F, cplx z) {
  const double v = F(z);
  if (std::isnan(v) || v == INFINITY) {
    std::ostringstream os;
    os.precision(17);
    os << "sup solver: field is not finite at z = " << z.real() << (z.imag() < 0 ? "" : "+")
       << z.imag() << "i";
    throw EvaluationError(os.str());
  }
  return v;
}

bool better(const Probe& a, const Probe& b) {
  if (a.value != b.value) return a.value > b.value;
  if (a.t != b.t) return a.t < b.t;
  return a.theta < b.theta;
}

Probe refine_probe(const std::function<double(double, double)>& at, Probe p,
                   const SupSolverConfig& config, double half_t, double half_theta) {
  // Near a smooth maximum the value error is quadratic in the abscissa error.
  const double xtol = std::max(1e-12, 1e-2 * std::sqrt(config.tol));
  for (int sweep = 0; sweep < std::max(config.refine_iters, 1); ++sweep) {
    const double before = p.value;
    // A bracket is only shrunk when its optimum is interior; an optimum on the
    // bracket edge means the maximum lies further out and the walk continues.
    bool edge = false;
    {
      const double theta = p.theta;
      auto g = [&](double t) { return at(t, theta); };
      const double lo = std::max(0.0, p.t - half_t), hi = std::min(1.0, p.t + half_t);
      auto [t, v] = golden_max(g, lo, hi, p.t, p.value, xtol);
      edge = edge || (v > p.value && ((t - lo < 2 * xtol && lo > 0.0) || (hi - t < 2 * xtol && hi < 1.0)));
      p.t = t;
      p.value = v;
    }
    if (p.t > 0.0) {
      const double t = p.t;
      auto g = [&](double theta) { return at(t, theta); };
      const double lo = p.theta - half_theta, hi = p.theta + half_theta;
      auto [theta, v] = golden_max(g, lo, hi, p.theta, p.value, xtol);
      edge = edge || (v > p.value && (theta - lo < 2 * xtol || hi - theta < 2 * xtol));
      p.theta = std::fmod(theta + kTwoPi, kTwoPi);
      p.value = v;
    }
    if (config.refine_iters == 0) break;
    if (edge) continue;
    if (sweep > 0 && p.value - before <= config.tol * std::max(1.0, std::abs(p.value))) break;
    half_t *= 0.5;
    half_theta *= 0.5;
  }
  return p;
}

}  // namespace

void SupSolverConfig::validate() const {
  if (n_radial < 16 || n_angular < 16) throw PreconditionError("sup solver grid counts must be >= 16");
  if (!(tol > 0.0)) throw PreconditionError("sup solver tolerance must be positive");
  if (refine_iters < 0) throw PreconditionError("sup solver refinement count must be >= 0");
  if (boundary_depth < 4 || boundary_depth > 50) {
    throw PreconditionError("sup solver boundary depth must lie in [4, 50]");
  }
}

double radius_at(double t, int depth) { return -std::expm1(-depth * t * std::numbers::ln2); }

double grid_parameter(double r, int depth) {
  if (r <= 0.0) return 0.0;
  return std::clamp(-std::log2(1.0 - r) / depth, 0.0, 1.0);
}

SupResult sup_over_disk(const std::function<double(cplx)>& F, const SupSolverConfig& config,
                        const std::vector<cplx>& seeds) {
  config.validate();
  const int nr = config.n_radial;
  const int na = config.n_angular;
  const int depth = config.boundary_depth;
  const double dt = 1.0 / (nr - 1);
  const double dtheta = kTwoPi / na;
  auto at = [&](double t, double theta) { return checked(F, std::polar(radius_at(t, depth), theta)); };

  // Coarse scan; the centre is a single grid point.
  std::vector<double> grid(static_cast<std::size_t>(nr) * na, -INFINITY);
  const double centre = at(0.0, 0.0);
  for (int j = 0; j < na; ++j) grid[j] = centre;
  for (int i = 1; i < nr; ++i) {
    for (int j = 0; j < na; ++j) grid[static_cast<std::size_t>(i) * na + j] = at(i * dt, j * dtheta);
  }

  std::vector<std::size_t> order(grid.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return grid[a] > grid[b]; });
  std::vector<Probe> starts;
  for (std::size_t k : order) {
    if (static_cast<int>(starts.size()) >= kCandidates) break;
    const int i = static_cast<int>(k / na), j = static_cast<int>(k % na);
    bool near = false;
    for (const Probe& p : starts) {
      const int pi = static_cast<int>(std::lround(p.t / dt));
      const int pj = static_cast<int>(std::lround(p.theta / dtheta));
      int dj = std::abs(pj - j);
      dj = std::min(dj, na - dj);
      if (std::abs(pi - i) <= 2 && (dj <= 2 || i == 0 || pi == 0)) near = true;
    }
    if (!near) starts.push_back({i * dt, i == 0 ? 0.0 : j * dtheta, grid[k]});
  }
  for (const cplx& s : seeds) {
    if (!(std::abs(s) < 1.0)) continue;
    const double t = grid_parameter(std::abs(s), depth);
    const double theta = std::abs(s) > 0.0 ? std::arg(s) : 0.0;
    starts.push_back({t, theta < 0 ? theta + kTwoPi : theta, at(t, theta)});
  }

  Probe best = starts.front();
  for (const Probe& start : starts) {
    const Probe p = refine_probe(at, start, config, dt, dtheta);
    if (better(p, best)) best = p;
  }

  SupResult result;
  result.value = best.value;
  result.argmax = best.t == 0.0 ? cplx(0.0) : std::polar(radius_at(best.t, depth), best.theta);
  if (best.t >= 1.0 - 1e-9) {
    const double inside = at(1.0 - 1e-3, best.theta);
    result.unbounded = best.value > inside;
  }
  return result;
}

SupResult refine_local(const std::function<double(cplx)>& F, cplx start, double start_value,
                       const SupSolverConfig& config) {
  const int depth = config.boundary_depth;
  auto at = [&](double t, double theta) { return checked(F, std::polar(radius_at(t, depth), theta)); };
  Probe p;
  p.t = grid_parameter(std::abs(start), depth);
  p.theta = std::abs(start) > 0.0 ? std::arg(start) : 0.0;
  if (p.theta < 0.0) p.theta += kTwoPi;
  p.value = start_value;
  p = refine_probe(at, p, config, 1.0 / (config.n_radial - 1), kTwoPi / config.n_angular);
  SupResult result;
  result.value = p.value;
  result.argmax = p.t == 0.0 ? cplx(0.0) : std::polar(radius_at(p.t, depth), p.theta);
  if (p.t >= 1.0 - 1e-9) result.unbounded = p.value > at(1.0 - 1e-3, p.theta);
  return result;
}

SupResult sup_over_radius(const std::function<double(double)>& F, const SupSolverConfig& config) {
  config.validate();
  const int nr = config.n_radial;
  const int depth = config.boundary_depth;
  const double dt = 1.0 / (nr - 1);
  auto at = [&](double t) { return checked([&](cplx z) { return F(z.real()); }, radius_at(t, depth)); };
  Probe best;
  for (int i = 0; i < nr; ++i) {
    const double v = at(i * dt);
    if (v > best.value) best = {i * dt, 0.0, v};
  }
  double half_t = dt;
  for (int sweep = 0; sweep < std::max(config.refine_iters, 1); ++sweep) {
    const double before = best.value;
    auto [t, v] = golden_max(at, std::max(0.0, best.t - half_t), std::min(1.0, best.t + half_t),
                             best.t, best.value, 1e-13);
    best.t = t;
    best.value = v;
    if (sweep > 0 && best.value - before <= config.tol * std::max(1.0, std::abs(best.value))) break;
    half_t *= 0.5;
  }
  SupResult result;
  result.value = best.value;
  result.argmax = radius_at(best.t, depth);
  if (best.t >= 1.0 - 1e-9) result.unbounded = best.value > at(1.0 - 1e-3);
  return result;
}

}  // namespace nucheck
