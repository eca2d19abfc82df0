#include "nucheck/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nucheck/error.hpp"
#include "nucheck/summation.hpp"

namespace nucheck {

namespace {

constexpr int kTailNodes = 64;
constexpr int kAnnulusNodes = 16;
constexpr int kMaxAnnuli = 40;
constexpr int kCircleAngles = 4096;

double log_abs(cplx v) { return std::log(std::abs(v)); }

// Limits the solver depth to the radii where the weight can be evaluated.
SupSolverConfig fit_to_weight(SupSolverConfig config, const RadialWeight& nu) {
  const double rmax = nu.max_radius();
  if (rmax < 1.0) {
    const int depth = static_cast<int>(std::floor(-std::log2(1.0 - rmax)));
    config.boundary_depth = std::max(4, std::min(config.boundary_depth, depth));
  }
  return config;
}

double circle_max(const std::function<double(double)>& g) {
  constexpr double step = 2.0 * std::numbers::pi / kCircleAngles;
  double best = -INFINITY, best_theta = 0.0;
  for (int j = 0; j < kCircleAngles; ++j) {
    const double v = g(j * step);
    if (v > best) {
      best = v;
      best_theta = j * step;
    }
  }
  double a = best_theta - step, b = best_theta + step;
  constexpr double kGolden = 0.6180339887498949;
  double c = b - kGolden * (b - a), d = a + kGolden * (b - a);
  double gc = g(c), gd = g(d);
  for (int it = 0; it < 60; ++it) {
    if (gc >= gd) {
      b = d, d = c, gd = gc;
      c = b - kGolden * (b - a);
      gc = g(c);
    } else {
      a = c, c = d, gc = gd;
      d = a + kGolden * (b - a);
      gd = g(d);
    }
  }
  return std::max({best, gc, gd});
}

}  // namespace

AnalyticFunction bergman_kernel(cplx zeta, double alpha) {
  if (!(std::abs(zeta) < 1.0)) throw DomainError("kernel point must lie in the open unit disk");
  if (!(alpha > -1.0)) throw PreconditionError("kernel exponent alpha must be > -1");
  return (alpha + 1.0) * AnalyticFunction::kernel_power(zeta, alpha + 2.0);
}

DiskQuadrature default_pairing_quadrature() { return build_quadrature(96, 256, 0.875); }

cplx pairing(const AnalyticFunction& f, const AnalyticFunction& g, double alpha,
             const DiskQuadrature& quad) {
  if (!(alpha > -1.0)) throw PreconditionError("pairing exponent alpha must be > -1");
  const cplx body = integrate_disk_complex(
      [&](cplx z) {
        const double s = std::norm(z);
        return f.evaluate(z) * std::conj(g.evaluate(z)) * std::pow(1.0 - s, alpha);
      },
      quad);
  if (quad.rho_outer >= 1.0) return body;
  const DiskQuadrature tail = build_weighted_tail(kTailNodes, quad.n_theta, quad.rho_outer, alpha);
  const cplx rest =
      integrate_disk_complex([&](cplx z) { return f.evaluate(z) * std::conj(g.evaluate(z)); }, tail);
  return body + rest;
}

double a1_norm(const AnalyticFunction& f, const RadialWeight& omega, const DiskQuadrature& quad) {
  if (f.is_zero()) return 0.0;
  auto field = [&](cplx z) {
    const cplx v = f.evaluate(z);
    if (v == cplx(0.0)) return 0.0;
    return std::exp(log_abs(v) + omega.log_value(std::abs(z)));
  };
  CompensatedSum total;
  total += integrate_disk(field, quad);
  const double rho = quad.rho_outer;
  if (rho >= 1.0) return total.value();

  std::vector<double> pieces;
  const double gap = 1.0 - rho;
  for (int j = 0; j < kMaxAnnuli; ++j) {
    const double inner = 1.0 - gap * std::ldexp(1.0, -j);
    const double outer = 1.0 - gap * std::ldexp(1.0, -j - 1);
    if (outer > omega.max_radius()) break;
    const double c =
        integrate_disk(field, build_annulus_quadrature(kAnnulusNodes, quad.n_theta, inner, outer));
    pieces.push_back(c);
    total += c;
    if (c <= 1e-17 * total.value()) return total.value();
  }
  const std::size_t n = pieces.size();
  if (n < 4) throw DivergenceError("a1_norm: too few annuli to close the boundary tail");
  const double q1 = pieces[n - 1] / pieces[n - 2];
  const double q2 = pieces[n - 2] / pieces[n - 3];
  const double q3 = pieces[n - 3] / pieces[n - 4];
  if (q1 >= 0.999 || q2 >= 0.999 || q3 >= 0.999) {
    throw DivergenceError("a1_norm: annulus contributions do not decay (ratio " +
                          std::to_string(q1) + "); the weight is not integrable");
  }
  // Geometric closure of the remaining annuli.
  total += pieces[n - 1] * q1 / (1.0 - q1);
  return total.value();
}

AnalyticFunction test_function(cplx zeta, const SelfMap& phi, const RadialWeight& nu, double beta) {
  if (!(std::abs(zeta) < 1.0)) throw DomainError("test function point must lie in the open disk");
  if (!(beta > 0.0)) throw PreconditionError("test function exponent beta must be positive");
  const cplx w = phi(zeta);
  const double aw = std::abs(w);
  const double log_scale = (beta + 1.0) * std::log1p(-aw * aw) - nu.log_value(aw);
  return std::exp(log_scale) * AnalyticFunction::kernel_power(w, beta + 1.0);
}

SupResult weighted_sup_norm(const AnalyticFunction& f, const RadialWeight& nu,
                            const SupSolverConfig& solver) {
  if (f.is_zero()) return {};
  const SupSolverConfig config = fit_to_weight(solver, nu);
  if (f.is_monomial()) {
    const Polynomial& p = *f.as_polynomial();
    const int n = p.degree();
    const double log_c = log_abs(p.coefficient(n));
    return sup_over_radius(
        [&](double r) {
          if (n == 0) return std::exp(log_c + nu.log_value(r));
          if (r == 0.0) return 0.0;
          return std::exp(log_c + n * std::log(r) + nu.log_value(r));
        },
        config);
  }
  return sup_over_disk(
      [&](cplx z) {
        const cplx v = f.evaluate(z);
        if (v == cplx(0.0)) return 0.0;
        return std::exp(log_abs(v) + nu.log_value(std::abs(z)));
      },
      config);
}

SupResult bloch_norm(const AnalyticFunction& f, const RadialWeight& nu, const SupSolverConfig& solver) {
  SupResult r = weighted_sup_norm(f.derivative(), nu, solver);
  r.value += std::abs(f.evaluate(0.0));
  return r;
}

std::string to_string(Membership m) {
  switch (m) {
    case Membership::Member:
      return "Member";
    case Membership::NonMember:
      return "NonMember";
    case Membership::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

std::vector<double> default_membership_schedule() {
  std::vector<double> radii;
  for (int k = 1; k <= 48; ++k) radii.push_back(1.0 - std::ldexp(1.0, -k));
  return radii;
}

MembershipResult little_membership(const AnalyticFunction& f, const RadialWeight& nu,
                                   LittleSpace mode, const std::vector<double>& schedule) {
  if (schedule.size() < 3) throw PreconditionError("membership schedule needs at least 3 radii");
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    if (!(schedule[k] >= 0.0 && schedule[k] < 1.0) || (k > 0 && schedule[k] <= schedule[k - 1])) {
      throw PreconditionError("membership schedule must increase strictly inside [0, 1)");
    }
  }
  const AnalyticFunction h = mode == LittleSpace::H0 ? f : f.derivative();
  MembershipResult result;
  for (double rho : schedule) {
    if (rho > nu.max_radius()) break;
    double m = 0.0;
    if (!h.is_zero()) {
      const double lw = nu.log_value(rho);
      auto g = [&](double theta) {
        const cplx v = h.evaluate(std::polar(rho, theta));
        return v == cplx(0.0) ? 0.0 : std::exp(log_abs(v) + lw);
      };
      m = h.is_monomial() ? g(0.0) : circle_max(g);
    }
    result.radii.push_back(rho);
    result.circle_max.push_back(m);
  }
  const auto& m = result.circle_max;
  const std::size_t n = m.size();
  if (n < 3) throw ResolutionError("weight cannot be evaluated on enough schedule radii");
  const double m0 = m.front();
  if (m0 == 0.0 && m.back() == 0.0) {
    result.verdict = Membership::Member;
    return result;
  }
  const double floor = 1e-3 * m0;
  const bool stable = std::abs(m[n - 1] - m[n - 2]) <= 1e-2 * m[n - 1] &&
                      std::abs(m[n - 2] - m[n - 3]) <= 1e-2 * m[n - 2];
  if (m.back() < 1e-6 * m0) {
    result.verdict = Membership::Member;
  } else if (m[n - 1] > floor && m[n - 2] > floor && m[n - 3] > floor && stable) {
    result.verdict = Membership::NonMember;
    result.limit = m.back();
  }
  return result;
}

}  // namespace nucheck
