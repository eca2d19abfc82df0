#include "nucheck/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nucheck/error.hpp"
#include "nucheck/parallel.hpp"
#include "nucheck/summation.hpp"
#include "nucheck/text.hpp"

namespace nucheck {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNearBoundary = 0.95;
constexpr double kRingTolerance = 1e-4;

double log_gap(double r) { return std::log((1.0 - r) * (1.0 + r)); }

double safe_log_abs(cplx v) { return v == cplx(0.0) ? -INFINITY : std::log(std::abs(v)); }

SupResult exp_result(SupResult r) {
  r.value = std::exp(r.value);
  return r;
}

// Radial-only variant of a log field when every factor depends on |z| alone.
std::optional<std::pair<double, int>> monomial_parts(const AnalyticFunction& f) {
  if (!f.is_monomial() || f.is_zero()) return std::nullopt;
  const Polynomial& p = *f.as_polynomial();
  return std::make_pair(std::log(std::abs(p.coefficient(p.degree()))), p.degree());
}

double log_monomial(const std::pair<double, int>& m, double r) {
  if (m.second == 0) return m.first;
  return r == 0.0 ? -INFINITY : m.first + m.second * std::log(r);
}

std::string describe(cplx z) {
  return text::format_number(z.real()) + (z.imag() < 0 ? "" : "+") + text::format_number(z.imag()) + "i";
}

}  // namespace

std::string to_string(OperatorKind k) { return k == OperatorKind::T ? "T" : "S"; }

std::string to_string(Numerator n) {
  switch (n) {
    case Numerator::GPrime:
      return "g'";
    case Numerator::G:
      return "g";
    case Numerator::PhiPrimeTimesG:
      return "phi' g";
  }
  return "?";
}

std::string to_string(Finiteness f) {
  switch (f) {
    case Finiteness::Finite:
      return "Finite";
    case Finiteness::Diverging:
      return "Diverging";
    case Finiteness::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

CriterionSpec CriterionSpec::weighted(OperatorKind kind, RadialWeight nu, RadialWeight mu, double alpha) {
  CriterionSpec s;
  s.label = kind == OperatorKind::T ? "m_alpha" : "n_alpha";
  s.kind = kind;
  s.family = FactorFamily::Weighted;
  s.numerator = kind == OperatorKind::T ? Numerator::GPrime : Numerator::G;
  s.alpha = alpha;
  s.nu = std::move(nu);
  s.mu = std::move(mu);
  return s;
}

CriterionSpec CriterionSpec::bloch(OperatorKind kind, double beta, double gamma, double alpha) {
  CriterionSpec s;
  s.label = kind == OperatorKind::T ? "p_alpha" : "q_alpha";
  s.kind = kind;
  s.family = FactorFamily::Bloch;
  s.numerator = kind == OperatorKind::T ? Numerator::GPrime : Numerator::G;
  s.alpha = alpha;
  s.beta = beta;
  s.gamma = gamma;
  return s;
}

void CriterionSpec::validate() const {
  if (!(alpha > -1.0)) throw PreconditionError("criterion: alpha must be > -1");
  if (family == FactorFamily::Weighted) {
    if (!nu || !mu) throw PreconditionError("criterion: weighted factors need both nu and mu");
  } else if (!(beta > 0.0) || !(gamma > 0.0)) {
    throw PreconditionError("criterion: Bloch factors need beta > 0 and gamma > 0");
  }
}

double CriterionSpec::log_target(double r) const {
  if (family == FactorFamily::Weighted) return log_gap(r) + mu->log_value(r);
  return gamma * log_gap(r);
}

double CriterionSpec::log_source(double r) const {
  if (family == FactorFamily::Weighted) return alpha * log_gap(r) - nu->log_value(r);
  return (alpha - beta + 1.0) * log_gap(r);
}

void CriterionResolution::validate() const {
  if (k_min < 1 || k_max < k_min + 3 || k_max > 40) {
    throw PreconditionError("criterion schedule needs 1 <= k_min and k_min + 3 <= k_max <= 40");
  }
  if (disk_radial < 8 || annulus_radial < 8 || n_theta < 16) {
    throw PreconditionError("criterion rule needs radial counts >= 8 and n_theta >= 16");
  }
  if (max_theta_doublings < 0) throw PreconditionError("angular doublings must be >= 0");
  if (extend_to > 40) throw PreconditionError("schedule extension limit must be <= 40");
  inner.validate();
}

std::vector<double> CriterionResolution::radii() const {
  std::vector<double> r;
  for (int k = k_min; k <= k_max; ++k) r.push_back(1.0 - std::ldexp(1.0, -k));
  return r;
}

InnerSup::InnerSup(const CriterionSpec& spec, const AnalyticFunction& g, const SelfMap& phi,
                   SupSolverConfig config)
    : spec_(spec), g_(g), dg_(g.derivative()), dphi_(phi.function().derivative()), phi_(phi),
      config_(config), p_(spec.kernel_exponent()) {
  spec_.validate();
  config_.validate();
  switch (spec_.numerator) {
    case Numerator::GPrime:
      zero_ = dg_.is_zero();
      break;
    case Numerator::G:
      zero_ = g_.is_zero();
      break;
    case Numerator::PhiPrimeTimesG:
      zero_ = g_.is_zero() || dphi_.is_zero();
      break;
  }
  if (zero_) return;
  constant_phi_ = phi_.constant_value();
  if (constant_phi_) {
    // The kernel factor does not depend on z: one supremum serves every zeta.
    const AnalyticFunction& n = spec_.numerator == Numerator::GPrime ? dg_ : g_;
    if (auto m = monomial_parts(n)) {
      constant_sup_ = sup_over_radius(
          [&](double r) { return spec_.log_target(r) + log_monomial(*m, r); }, config_);
    } else {
      constant_sup_ = sup_over_disk(
          [&](cplx z) { return spec_.log_target(std::abs(z)) + log_numerator(z); }, config_);
    }
    return;
  }
  const int nr = config_.n_radial, na = config_.n_angular;
  const double dt = 1.0 / (nr - 1);
  grid_a_.reserve(static_cast<std::size_t>(nr) * na);
  for (int i = 0; i < nr; ++i) {
    const double r = radius_at(i * dt, config_.boundary_depth);
    const double lt = spec_.log_target(r);
    for (int j = 0; j < (i == 0 ? 1 : na); ++j) {
      const cplx z = std::polar(r, kTwoPi * j / na);
      grid_z_.push_back(z);
      grid_a_.push_back(lt + log_numerator(z));
      grid_phi_.push_back(phi_(z));
    }
  }
}

double InnerSup::log_numerator(cplx z) const {
  switch (spec_.numerator) {
    case Numerator::GPrime:
      return safe_log_abs(dg_.evaluate(z));
    case Numerator::G:
      return safe_log_abs(g_.evaluate(z));
    case Numerator::PhiPrimeTimesG:
      return safe_log_abs(dphi_.evaluate(z)) + safe_log_abs(g_.evaluate(z));
  }
  return -INFINITY;
}

double InnerSup::log_field(cplx zeta, cplx z) const {
  const double r = std::abs(z);
  if (!(r < 1.0)) return -INFINITY;
  const double a = spec_.log_target(r) + log_numerator(z);
  if (a == -INFINITY) return a;
  return a - 0.5 * p_ * std::log(std::norm(1.0 - std::conj(zeta) * phi_(z)));
}

SupResult InnerSup::operator()(cplx zeta, const std::vector<cplx>& seeds) const {
  if (!(std::abs(zeta) < 1.0)) throw DomainError("inner supremum: zeta must lie in the open disk");
  if (zero_) return {};
  if (constant_phi_) {
    SupResult r = constant_sup_;
    r.value = std::exp(constant_sup_.value - p_ * std::log(std::abs(1.0 - std::conj(zeta) * *constant_phi_)));
    return r;
  }
  const cplx zc = std::conj(zeta);
  std::size_t best = 0;
  double best_v = -INFINITY;
  for (std::size_t k = 0; k < grid_a_.size(); ++k) {
    if (grid_a_[k] == -INFINITY) continue;
    const double v = grid_a_[k] - 0.5 * p_ * std::log(std::norm(1.0 - zc * grid_phi_[k]));
    if (v > best_v) {
      best_v = v;
      best = k;
    }
  }
  auto field = [&](cplx z) { return log_field(zeta, z); };
  SupResult result;
  result.value = -INFINITY;
  auto consider = [&](const SupResult& r) {
    if (r.value > result.value ||
        (r.value == result.value && std::abs(r.argmax) < std::abs(result.argmax))) {
      result = r;
    }
  };
  if (best_v > -INFINITY) consider(refine_local(field, grid_z_[best], best_v, config_));
  std::vector<cplx> starts = seeds;
  if (phi_.is_identity() && zeta != cplx(0.0)) starts.push_back(zeta);
  for (cplx s : starts) {
    if (!(std::abs(s) < 1.0)) continue;
    const double v = field(s);
    if (v == -INFINITY) continue;
    consider(refine_local(field, s, v, config_));
  }
  if (result.value == -INFINITY) return {};
  return exp_result(result);
}

SupResult inner_sup(cplx zeta, const CriterionSpec& spec, const AnalyticFunction& g,
                    const SelfMap& phi, const SupSolverConfig& solver) {
  return InnerSup(spec, g, phi, solver)(zeta);
}

FinitenessVerdict classify_finiteness(const std::vector<double>& values, const std::vector<int>& ks) {
  if (values.size() < 4 || ks.size() != values.size()) {
    throw PreconditionError("classify_finiteness needs at least four values with matching radii");
  }
  FinitenessVerdict v;
  const std::size_t n = values.size();
  v.value = values.back();
  if (std::all_of(values.begin(), values.end(), [](double x) { return x == 0.0; })) {
    v.kind = Finiteness::Finite;
    return v;
  }
  auto slope_over = [&](std::size_t first) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = first; i < first + 4; ++i) {
      const double x = ks[i] * std::numbers::ln2;
      const double y = std::log(values[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    return (4.0 * sxy - sx * sy) / (4.0 * sxx - sx * sx);
  };
  for (std::size_t i = n - 4; i < n; ++i) {
    if (!(values[i] > 0.0)) return v;  // Inconclusive: mixed zero / non-zero tail
  }
  v.exponent = slope_over(n - 4);
  bool cauchy = true;
  for (std::size_t i = n - 3; i < n; ++i) {
    if (std::abs(values[i] - values[i - 1]) >= 1e-3 * values[i]) cauchy = false;
  }
  if (v.exponent > 0.1) {
    v.kind = Finiteness::Diverging;
    if (n >= 8) {
      bool earlier_positive = true;
      for (std::size_t i = n - 8; i < n - 4; ++i) earlier_positive = earlier_positive && values[i] > 0.0;
      if (earlier_positive) v.sublinear = v.exponent < 0.75 * slope_over(n - 8);
    }
  } else if (v.exponent < 0.01) {
    const double d0 = values[n - 3] - values[n - 4];
    const double d1 = values[n - 2] - values[n - 3];
    const double d2 = values[n - 1] - values[n - 2];
    const bool geometric = d0 > 0.0 && d1 > 0.0 && d2 > 0.0 && d1 < 0.9 * d0 && d2 < 0.9 * d1;
    double limit = values[n - 1];
    bool agree = false;
    if (geometric) {
      const double q0 = d1 / d0, q1 = d2 / d1;
      const double previous = values[n - 2] + d1 * q0 / (1.0 - q0);
      limit = values[n - 1] + d2 * q1 / (1.0 - q1);
      agree = std::abs(limit - previous) < 1e-3 * limit;
    }
    if (cauchy || agree) {
      v.kind = Finiteness::Finite;
      if (geometric || (d1 > 0.0 && d2 > 0.0 && d2 < d1)) {
        const double q = d2 / d1;
        v.value = values[n - 1] + d2 * q / (1.0 - q);
        v.extrapolated = true;
      }
    }
  }
  return v;
}

CriterionSamples sample_criterion(const CriterionSpec& spec, const AnalyticFunction& g,
                                  const SelfMap& phi, const CriterionResolution& resolution) {
  spec.validate();
  resolution.validate();
  SupSolverConfig inner_cfg = resolution.inner;
  inner_cfg.boundary_depth = std::min(50, std::max(inner_cfg.boundary_depth, resolution.k_max + 8));
  const InnerSup engine(spec, g, phi, inner_cfg);

  CriterionSamples out;
  out.radii = resolution.radii();
  for (int k = resolution.k_min; k <= resolution.k_max; ++k) out.ks.push_back(k);

  struct Circle {
    int piece;
    double s;
    double s_weight;
  };
  std::vector<Circle> circles;
  for (std::size_t piece = 0; piece < out.radii.size(); ++piece) {
    const DiskQuadrature q =
        piece == 0 ? build_quadrature(resolution.disk_radial, resolution.n_theta, out.radii[0])
                   : build_annulus_quadrature(resolution.annulus_radial, resolution.n_theta,
                                              out.radii[piece - 1], out.radii[piece]);
    for (std::size_t i = 0; i < q.radial_count(); ++i) {
      circles.push_back({static_cast<int>(piece), q.s_nodes[i], q.s_weights[i]});
    }
  }

  struct CircleResult {
    std::vector<CriterionNode> nodes;
    double sum = 0.0;
  };
  std::vector<CircleResult> results(circles.size());
  parallel_for(circles.size(), [&](std::size_t c) {
    const Circle& circle = circles[c];
    const double r = std::sqrt(circle.s);
    const double log_src = spec.log_source(r);
    auto run = [&](int count, int stride, int offset, std::vector<CriterionNode>& nodes) {
      // Angles (offset + stride * j) * 2 pi / (stride * count), warm-started along the circle.
      cplx previous = 0.0;
      bool have_previous = false;
      const double step = kTwoPi / (static_cast<double>(count) * stride);
      for (int j = 0; j < count; ++j) {
        const double theta = (offset + stride * j) * step;
        CriterionNode node;
        node.zeta = std::polar(r, theta);
        node.log_source = log_src;
        node.ring = circle.piece;
        std::vector<cplx> seeds;
        if (have_previous && previous != cplx(0.0)) seeds.push_back(previous * std::polar(1.0, stride * step));
        node.inner = engine(node.zeta, seeds);
        previous = node.inner.argmax;
        have_previous = true;
        nodes.push_back(node);
      }
    };
    auto mean_value = [&](const std::vector<CriterionNode>& nodes) {
      CompensatedSum s;
      for (const auto& n : nodes) {
        if (n.inner.value > 0.0) s += std::exp(std::log(n.inner.value) + n.log_source);
      }
      return s.value() / static_cast<double>(nodes.size());
    };
    std::vector<CriterionNode> nodes;
    int count = resolution.n_theta;
    run(count, 1, 0, nodes);
    double mean = mean_value(nodes);
    for (int d = 0; d < resolution.max_theta_doublings; ++d) {
      const bool near = std::any_of(nodes.begin(), nodes.end(), [](const CriterionNode& n) {
        return std::abs(n.inner.argmax) > kNearBoundary;
      });
      if (!near) break;
      std::vector<CriterionNode> mid;
      run(count, 2, 1, mid);
      std::vector<CriterionNode> merged;
      merged.reserve(2 * count);
      for (int j = 0; j < count; ++j) {
        merged.push_back(nodes[j]);
        merged.push_back(mid[j]);
      }
      const double refined = mean_value(merged);
      nodes = std::move(merged);
      count *= 2;
      const bool settled = std::abs(refined - mean) <= kRingTolerance * std::abs(refined);
      mean = refined;
      if (settled) break;
    }
    const double w = circle.s_weight / static_cast<double>(nodes.size());
    for (auto& n : nodes) n.weight = w;
    results[c].sum = mean * circle.s_weight;
    results[c].nodes = std::move(nodes);
  });

  out.ring_sums.assign(out.radii.size(), 0.0);
  std::vector<CompensatedSum> ring(out.radii.size());
  for (std::size_t c = 0; c < circles.size(); ++c) {
    ring[circles[c].piece] += results[c].sum;
    for (auto& n : results[c].nodes) out.nodes.push_back(std::move(n));
  }
  for (std::size_t k = 0; k < ring.size(); ++k) out.ring_sums[k] = ring[k].value();
  return out;
}

CriterionReport nuclearity_criterion(const CriterionSpec& spec, const AnalyticFunction& g,
                                     const SelfMap& phi, const CriterionResolution& resolution,
                                     CriterionSamples* samples_out) {
  CriterionReport report;
  report.label = spec.label;
  report.kind = spec.kind;
  report.family = spec.family;
  report.numerator = spec.numerator;
  report.alpha = spec.alpha;
  if (spec.family == FactorFamily::Bloch) {
    report.beta = spec.beta;
    report.gamma = spec.gamma;
  } else if (spec.nu) {
    try {
      make_normal_pair(*spec.nu, spec.alpha);
      report.normal_pair_ok = true;
    } catch (const Error& e) {
      report.normal_pair_ok = false;
      report.note = std::string("normal-pair check failed: ") + e.what();
    }
  }

  CriterionResolution res = resolution;
  CriterionSamples samples;
  for (;;) {
    samples = sample_criterion(spec, g, phi, res);
    report.values.clear();
    CompensatedSum running;
    for (double piece : samples.ring_sums) {
      running += piece;
      report.values.push_back(running.value());
    }
    const FinitenessVerdict v = classify_finiteness(report.values, samples.ks);
    if (v.kind != Finiteness::Inconclusive || res.k_max + 2 > res.extend_to) break;
    if (spec.nu && 1.0 - std::ldexp(1.0, -(res.k_max + 2)) > spec.nu->max_radius()) break;
    res.k_max += 2;
  }
  report.ks = samples.ks;
  report.radii = samples.radii;
  const double r0 = samples.nodes.empty() ? 0.0 : std::arg(samples.nodes.front().zeta);
  for (const auto& n : samples.nodes) {
    if (!report.unbounded_node && n.inner.unbounded) report.unbounded_node = n;
    if (std::arg(n.zeta) == r0) report.diagnostics.push_back(n);
  }
  report.verdict = classify_finiteness(report.values, report.ks);
  if (report.unbounded_node) {
    report.verdict.kind = Finiteness::Diverging;
    report.verdict.extrapolated = false;
    if (!report.note.empty()) report.note += "; ";
    report.note += "inner supremum unbounded at zeta = " + describe(report.unbounded_node->zeta);
  }
  if (samples_out) *samples_out = std::move(samples);
  return report;
}

CriterionReport m_alpha(const AnalyticFunction& g, const SelfMap& phi, const RadialWeight& nu,
                        const RadialWeight& mu, double alpha, const CriterionResolution& res) {
  return nuclearity_criterion(CriterionSpec::weighted(OperatorKind::T, nu, mu, alpha), g, phi, res);
}

CriterionReport n_alpha(const AnalyticFunction& g, const SelfMap& phi, const RadialWeight& nu,
                        const RadialWeight& mu, double alpha, const CriterionResolution& res) {
  return nuclearity_criterion(CriterionSpec::weighted(OperatorKind::S, nu, mu, alpha), g, phi, res);
}

CriterionReport p_alpha(const AnalyticFunction& g, const SelfMap& phi, double beta, double gamma,
                        double alpha, const CriterionResolution& res) {
  return nuclearity_criterion(CriterionSpec::bloch(OperatorKind::T, beta, gamma, alpha), g, phi, res);
}

CriterionReport q_alpha(const AnalyticFunction& g, const SelfMap& phi, double beta, double gamma,
                        double alpha, const CriterionResolution& res) {
  return nuclearity_criterion(CriterionSpec::bloch(OperatorKind::S, beta, gamma, alpha), g, phi, res);
}

CriterionReport composition_m_alpha(const SelfMap& phi, const RadialWeight& nu, const RadialWeight& mu,
                                    double alpha, const CriterionResolution& res) {
  auto spec = CriterionSpec::weighted(OperatorKind::T, nu, mu, alpha);
  spec.label = "c_phi_m_alpha";
  return nuclearity_criterion(spec, AnalyticFunction::identity(), phi, res);
}

CriterionReport volterra_m_alpha(const AnalyticFunction& g, const RadialWeight& nu,
                                 const RadialWeight& mu, double alpha, const CriterionResolution& res) {
  auto spec = CriterionSpec::weighted(OperatorKind::T, nu, mu, alpha);
  spec.label = "t_g_m_alpha";
  return nuclearity_criterion(spec, g, SelfMap::identity(), res);
}

CriterionReport volterra_n_alpha(const AnalyticFunction& g, const RadialWeight& nu,
                                 const RadialWeight& mu, double alpha, const CriterionResolution& res) {
  auto spec = CriterionSpec::weighted(OperatorKind::S, nu, mu, alpha);
  spec.label = "s_g_n_alpha";
  return nuclearity_criterion(spec, g, SelfMap::identity(), res);
}

BlochMReports criterion_bloch_M(const AnalyticFunction& g, const SelfMap& phi,
                                const CriterionResolution& res) {
  auto printed = CriterionSpec::bloch(OperatorKind::S, 1.0, 1.0, 0.0);
  printed.label = "bloch_m_printed";
  printed.numerator = Numerator::PhiPrimeTimesG;
  auto derived = CriterionSpec::bloch(OperatorKind::T, 1.0, 1.0, 0.0);
  derived.label = "bloch_m_derived";
  BlochMReports out{nuclearity_criterion(printed, g, phi, res), nuclearity_criterion(derived, g, phi, res)};
  const auto& a = out.printed.verdict;
  const auto& b = out.derived.verdict;
  if (a.kind == Finiteness::Finite && b.kind == Finiteness::Finite) {
    const std::string gap = "printed and derived integrands differ: " + text::format_number(a.value) +
                            " vs " + text::format_number(b.value);
    out.printed.note = gap;
    out.derived.note = gap;
  }
  return out;
}

SupResult criterion_M1(const AnalyticFunction& g, const SelfMap& phi, const RadialWeight& nu,
                       const RadialWeight& mu, const SupSolverConfig& solver) {
  const AnalyticFunction dg = g.derivative();
  if (dg.is_zero()) return {};
  const auto mg = monomial_parts(dg);
  const auto mp = monomial_parts(phi.function());
  if (mg && mp) {
    return exp_result(sup_over_radius(
        [&](double r) {
          return log_gap(r) + mu.log_value(r) - nu.log_value(std::exp(log_monomial(*mp, r))) +
                 log_monomial(*mg, r);
        },
        solver));
  }
  return exp_result(sup_over_disk(
      [&](cplx z) {
        return log_gap(std::abs(z)) + mu.log_value(std::abs(z)) - nu.log_value(std::abs(phi(z))) +
               safe_log_abs(dg.evaluate(z));
      },
      solver));
}

SupResult criterion_S_sup(const AnalyticFunction& g, const SelfMap& phi, const RadialWeight& nu,
                          const RadialWeight& mu, const SupSolverConfig& solver) {
  if (g.is_zero()) return {};
  auto field = [&](double r, double rw, double log_g) {
    return log_gap(r) - log_gap(rw) + mu.log_value(r) - nu.log_value(rw) + log_g;
  };
  const auto mg = monomial_parts(g);
  const auto mp = monomial_parts(phi.function());
  if (mg && mp) {
    return exp_result(sup_over_radius(
        [&](double r) { return field(r, std::exp(log_monomial(*mp, r)), log_monomial(*mg, r)); }, solver));
  }
  return exp_result(sup_over_disk(
      [&](cplx z) { return field(std::abs(z), std::abs(phi(z)), safe_log_abs(g.evaluate(z))); }, solver));
}

}  // namespace nucheck
