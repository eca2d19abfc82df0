#include "nucheck/oplab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nucheck/error.hpp"
#include "nucheck/parallel.hpp"
#include "nucheck/summation.hpp"
#include "nucheck/text.hpp"

namespace nucheck {

namespace {

double log_gap(double r) { return std::log((1.0 - r) * (1.0 + r)); }

std::string describe(cplx z) {
  return text::format_number(z.real()) + (z.imag() < 0 ? "" : "+") + text::format_number(z.imag()) + "i";
}

// Derivative of the image: f(phi) g' for T, f'(phi) g for S.
AnalyticFunction image_derivative(OperatorKind kind, const AnalyticFunction& g, const SelfMap& phi,
                                  const AnalyticFunction& f) {
  if (kind == OperatorKind::T) return f.compose(phi.function()) * g.derivative();
  return f.derivative().compose(phi.function()) * g;
}

// sup (1-|z|^2) mu(z) |h(z)|.
SupResult gap_sup(const AnalyticFunction& h, const RadialWeight& mu, const SupSolverConfig& solver) {
  if (h.is_zero()) return {};
  if (h.is_monomial()) {
    const Polynomial& p = *h.as_polynomial();
    const int n = p.degree();
    const double log_c = std::log(std::abs(p.coefficient(n)));
    return sup_over_radius(
        [&](double r) {
          if (n > 0 && r == 0.0) return 0.0;
          return std::exp(log_c + (n > 0 ? n * std::log(r) : 0.0) + log_gap(r) + mu.log_value(r));
        },
        solver);
  }
  return sup_over_disk(
      [&](cplx z) {
        const cplx v = h.evaluate(z);
        if (v == cplx(0.0)) return 0.0;
        const double r = std::abs(z);
        return std::exp(std::log(std::abs(v)) + log_gap(r) + mu.log_value(r));
      },
      solver);
}

// Balanced sum keeps the expression tree shallow.
AnalyticFunction balanced_sum(const std::vector<AnalyticFunction>& parts, std::size_t lo, std::size_t hi) {
  if (hi - lo == 0) return AnalyticFunction();
  if (hi - lo == 1) return parts[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return balanced_sum(parts, lo, mid) + balanced_sum(parts, mid, hi);
}

bool exact_point_evaluation(const RadialWeight& nu) {
  return nu.kind() == RadialWeight::Kind::Standard || nu.kind() == RadialWeight::Kind::Constant;
}

}  // namespace

AnalyticFunction apply_T(const AnalyticFunction& g, const SelfMap& phi, const AnalyticFunction& f) {
  return image_derivative(OperatorKind::T, g, phi, f).antiderivative();
}

AnalyticFunction apply_S(const AnalyticFunction& g, const SelfMap& phi, const AnalyticFunction& f) {
  return image_derivative(OperatorKind::S, g, phi, f).antiderivative();
}

AnalyticFunction apply(OperatorKind kind, const AnalyticFunction& g, const SelfMap& phi,
                       const AnalyticFunction& f) {
  return kind == OperatorKind::T ? apply_T(g, phi, f) : apply_S(g, phi, f);
}

OperatorTruncation truncation_matrix(OperatorKind kind, const AnalyticFunction& g, const SelfMap& phi,
                                     int N, BasisNormalization normalization,
                                     const std::optional<RadialWeight>& nu) {
  if (N < 0 || N > 256) throw PreconditionError("truncation degree must lie in [0, 256]");
  if (!g.is_polynomial() || !phi.function().is_polynomial()) {
    throw UnsupportedError("truncation_matrix needs polynomial g and phi");
  }
  if (normalization == BasisNormalization::SourceNormalized && !nu) {
    throw PreconditionError("normalized truncation needs the source weight");
  }
  std::vector<Polynomial> images;
  std::vector<double> scale(N + 1, 1.0);
  int rows = 1;
  for (int n = 0; n <= N; ++n) {
    const AnalyticFunction zn = AnalyticFunction::monomial(n);
    images.push_back(*apply(kind, g, phi, zn).as_polynomial());
    rows = std::max(rows, images.back().degree() + 1);
    if (normalization == BasisNormalization::SourceNormalized) {
      scale[n] = 1.0 / weighted_sup_norm(zn, *nu).value;
    }
  }
  OperatorTruncation t;
  t.kind = kind;
  t.degree = N;
  t.normalization = normalization;
  t.matrix = Eigen::MatrixXcd::Zero(rows, N + 1);
  for (int n = 0; n <= N; ++n) {
    const auto& c = images[n].coefficients();
    for (std::size_t k = 0; k < c.size(); ++k) t.matrix(static_cast<Eigen::Index>(k), n) = scale[n] * c[k];
  }
  return t;
}

double target_norm(OperatorKind kind, const AnalyticFunction& g, const SelfMap& phi,
                   const AnalyticFunction& f, const RadialWeight& mu, TargetNorm norm,
                   const SupSolverConfig& solver) {
  if (norm == TargetNorm::Bloch) return gap_sup(image_derivative(kind, g, phi, f), mu, solver).value;
  return weighted_sup_norm(apply(kind, g, phi, f), mu, solver).value;
}

std::vector<cplx> ProbeSet::default_test_points() {
  std::vector<cplx> points{0.0};
  for (double r : {0.5, 0.8, 0.9, 0.95, 0.99}) {
    for (int j = 0; j < 4; ++j) points.push_back(std::polar(r, j * std::numbers::pi / 2.0));
  }
  return points;
}

NormLowerBound operator_norm_lower(OperatorKind kind, const AnalyticFunction& g, const SelfMap& phi,
                                   const RadialWeight& nu, const RadialWeight& mu, const ProbeSet& probes) {
  double beta = 1.0;
  if (probes.beta) {
    beta = *probes.beta;
  } else if (!probes.test_points.empty()) {
    const auto est = check_normality(nu).beta_estimate;
    if (est && *est > 0.0) beta = *est;
  }
  std::vector<AnalyticFunction> fs;
  std::vector<std::string> ids;
  for (int n = 0; n <= probes.max_degree; ++n) {
    fs.push_back(AnalyticFunction::monomial(n));
    ids.push_back("z^" + std::to_string(n));
  }
  for (cplx zeta : probes.test_points) {
    fs.push_back(test_function(zeta, phi, nu, beta));
    ids.push_back("test(" + describe(zeta) + ")");
  }
  std::vector<double> ratio(fs.size(), -1.0);
  parallel_for(fs.size(), [&](std::size_t i) {
    const double source = weighted_sup_norm(fs[i], nu, probes.solver).value;
    if (!(source > 0.0)) return;
    ratio[i] = target_norm(kind, g, phi, fs[i], mu, probes.norm, probes.solver) / source;
  });
  NormLowerBound out;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (ratio[i] < 0.0) continue;
    ++out.probes_used;
    if (ratio[i] > out.bound) {
      out.bound = ratio[i];
      out.witness = ids[i];
    }
  }
  return out;
}

AnalyticFunction NuclearDecomposition::image(std::size_t k) const {
  const DecompositionTerm& t = terms.at(k);
  if (kind == OperatorKind::T) {
    return (g.derivative() * AnalyticFunction::kernel_power(t.zeta, alpha + 2.0).compose(phi)).antiderivative();
  }
  return (g * AnalyticFunction::kernel_power(t.zeta, alpha + 3.0).compose(phi)).antiderivative();
}

AnalyticFunction NuclearDecomposition::apply(const AnalyticFunction& f) const {
  const double p = alpha + (kind == OperatorKind::T ? 2.0 : 3.0);
  std::vector<AnalyticFunction> parts;
  parts.reserve(terms.size());
  for (const auto& t : terms) {
    const double s = std::norm(t.zeta);
    cplx c = t.weight * (alpha + 1.0) * std::pow(1.0 - s, alpha) * f.evaluate(t.zeta);
    if (kind == OperatorKind::S) c *= (alpha + 2.0) * std::conj(t.zeta);
    parts.push_back(c * AnalyticFunction::kernel_power(t.zeta, p).compose(phi));
  }
  const AnalyticFunction weight = kind == OperatorKind::T ? g.derivative() : g;
  return (weight * balanced_sum(parts, 0, parts.size())).antiderivative();
}

NuclearDecomposition nuclear_decomposition(OperatorKind kind, const AnalyticFunction& g, const SelfMap& phi,
                                           const RadialWeight& nu, const RadialWeight& mu, double alpha,
                                           const CriterionResolution& resolution) {
  CriterionSpec spec = CriterionSpec::weighted(kind, nu, mu, alpha);
  spec.label = "nuclear_decomposition";
  CriterionSamples samples;
  NuclearDecomposition d;
  d.criterion = nuclearity_criterion(spec, g, phi, resolution, &samples);
  if (d.criterion.normal_pair_ok == false) {
    throw RefusalError("nuclear decomposition refused: " + d.criterion.note);
  }
  if (d.criterion.verdict.kind != Finiteness::Finite) {
    std::string msg = "nuclear decomposition refused: criterion verdict is " +
                      to_string(d.criterion.verdict.kind) + " (last value " +
                      text::format_number(d.criterion.verdict.value) + ", slope " +
                      text::format_number(d.criterion.verdict.exponent) + ")";
    if (!d.criterion.note.empty()) msg += "; " + d.criterion.note;
    throw RefusalError(msg);
  }
  d.kind = kind;
  d.alpha = alpha;
  d.g = g;
  d.phi = phi.function();
  d.nu = nu;
  d.mu = mu;
  d.functional_norm_exact = exact_point_evaluation(nu);

  CompensatedSum total, inner, outer;
  for (const CriterionNode& n : samples.nodes) {
    DecompositionTerm t;
    t.zeta = n.zeta;
    t.weight = n.weight;
    t.functional_norm = (alpha + 1.0) * std::exp(n.log_source);
    if (kind == OperatorKind::S) t.functional_norm *= (alpha + 2.0) * std::abs(n.zeta);
    t.image_norm = n.inner.value;
    t.image_argmax = n.inner.argmax;
    t.bound = t.weight * t.functional_norm * t.image_norm;
    if (t.bound == 0.0) continue;
    total += t.bound;
    (std::abs(t.zeta) <= 0.5 ? inner : outer) += t.bound;
    d.terms.push_back(t);
  }
  d.total = total.value();
  d.total_inner = inner.value();
  d.total_outer = outer.value();
  return d;
}

FidelityResult decomposition_fidelity(const NuclearDecomposition& d,
                                      const std::vector<AnalyticFunction>& probes,
                                      const SupSolverConfig& solver) {
  const SelfMap phi(d.phi);
  const double p = d.alpha + (d.kind == OperatorKind::T ? 2.0 : 3.0);
  const AnalyticFunction weight = d.kind == OperatorKind::T ? d.g.derivative() : d.g;
  // Node coefficients of the reproducing formula (of the derivative formula for S).
  std::vector<cplx> conj_zeta(d.terms.size());
  std::vector<cplx> base(d.terms.size());
  for (std::size_t k = 0; k < d.terms.size(); ++k) {
    const auto& t = d.terms[k];
    conj_zeta[k] = std::conj(t.zeta);
    base[k] = t.weight * (d.alpha + 1.0) * std::pow(1.0 - std::norm(t.zeta), d.alpha);
    if (d.kind == OperatorKind::S) base[k] *= (d.alpha + 2.0) * conj_zeta[k];
  }

  FidelityResult out;
  out.errors.assign(probes.size(), 0.0);
  out.relative.assign(probes.size(), 0.0);
  parallel_for(probes.size(), [&](std::size_t i) {
    const AnalyticFunction& f = probes[i];
    const AnalyticFunction exact = d.kind == OperatorKind::T ? f : f.derivative();
    std::vector<cplx> a(d.terms.size());
    for (std::size_t k = 0; k < a.size(); ++k) a[k] = base[k] * f.evaluate(d.terms[k].zeta);
    auto field = [&](cplx z) {
      const cplx w = phi(z);
      ComplexCompensatedSum q;
      for (std::size_t k = 0; k < a.size(); ++k) q += a[k] * std::exp(-p * std::log(1.0 - conj_zeta[k] * w));
      const cplx v = weight.evaluate(z) * (exact.evaluate(w) - q.value());
      if (v == cplx(0.0)) return 0.0;
      const double r = std::abs(z);
      return std::exp(std::log(std::abs(v)) + log_gap(r) + d.mu.log_value(r));
    };
    out.errors[i] = sup_over_disk(field, solver).value;
    const double scale = target_norm(d.kind, d.g, phi, f, d.mu, TargetNorm::Bloch, solver);
    out.relative[i] = scale > 0.0 ? out.errors[i] / scale : 0.0;
  });
  for (double r : out.relative) out.max_relative = std::max(out.max_relative, r);
  return out;
}

CriterionResolution fidelity_level(int level) {
  if (level < 0) throw PreconditionError("fidelity level must be >= 0");
  CriterionResolution r;
  r.n_theta = 16 + 8 * level;
  r.max_theta_doublings = 0;
  r.inner = SupSolverConfig{32, 64, 40, 1e-10, 12};
  return r;
}

SummingProbeResult absolutely_summing_probe(OperatorKind kind, const AnalyticFunction& g, const SelfMap& phi,
                                            const RadialWeight& nu, const RadialWeight& mu,
                                            const std::vector<AnalyticFunction>& family, TargetNorm norm,
                                            const SupSolverConfig& solver) {
  const std::size_t n = family.size();
  if (n < 1 || n > 8) throw PreconditionError("absolutely summing probe needs 1 to 8 functions");
  if (std::all_of(family.begin(), family.end(), [](const AnalyticFunction& f) { return f.is_zero(); })) {
    throw PreconditionError("absolutely summing probe: every member is zero, the ratio is undefined");
  }
  static const cplx roots[4] = {1.0, cplx(0.0, 1.0), -1.0, cplx(0.0, -1.0)};
  std::size_t combos = 1;
  for (std::size_t i = 1; i < n; ++i) combos *= 4;

  std::vector<double> images(n, 0.0);
  std::vector<double> sources(combos, 0.0);
  parallel_for(n + combos, [&](std::size_t job) {
    if (job < n) {
      images[job] = target_norm(kind, g, phi, family[job], mu, norm, solver);
      return;
    }
    std::size_t code = job - n;
    AnalyticFunction h = family[0];
    for (std::size_t i = 1; i < n; ++i, code /= 4) h = h + roots[code % 4] * family[i];
    sources[job - n] = weighted_sup_norm(h, nu, solver).value;
  });

  SummingProbeResult out;
  CompensatedSum sum;
  for (double v : images) sum += v;
  out.image_sum = sum.value();
  std::size_t best = 0;
  for (std::size_t c = 0; c < combos; ++c) {
    if (sources[c] > sources[best]) best = c;
  }
  out.source_sup = sources[best];
  out.best_eta.push_back(1.0);
  for (std::size_t i = 1, code = best; i < n; ++i, code /= 4) out.best_eta.push_back(roots[code % 4]);
  out.ratio = out.image_sum / out.source_sup;
  return out;
}

std::string to_string(Compactness c) {
  switch (c) {
    case Compactness::CompactLikely:
      return "CompactLikely";
    case Compactness::NonCompactLikely:
      return "NonCompactLikely";
    case Compactness::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

CompactnessResult compactness_probe(OperatorKind kind, const AnalyticFunction& g, const SelfMap& phi,
                                    const RadialWeight& nu, const RadialWeight& mu, int N) {
  if (N < 4) throw PreconditionError("compactness probe needs N >= 4");
  if (!g.is_polynomial() || !phi.function().is_polynomial()) {
    throw UnsupportedError("compactness probe needs polynomial g and phi");
  }
  CompactnessResult out;
  out.norms.assign(N + 1, 0.0);
  out.membership.assign(N + 1, Membership::Member);
  parallel_for(static_cast<std::size_t>(N + 1), [&](std::size_t n) {
    const AnalyticFunction zn = AnalyticFunction::monomial(static_cast<int>(n));
    const double source = weighted_sup_norm(zn, nu).value;
    const AnalyticFunction image = (1.0 / source) * apply(kind, g, phi, zn);
    if (image.is_zero()) return;
    out.norms[n] = gap_sup(image.derivative(), mu, {}).value;
    out.membership[n] = little_membership(image, mu, LittleSpace::H0).verdict;
  });
  const double peak = *std::max_element(out.norms.begin(), out.norms.end());
  if (peak == 0.0) {
    out.verdict = Compactness::CompactLikely;
    return out;
  }
  const std::size_t tail_start = out.norms.size() - out.norms.size() / 4;
  double tail_max = 0.0, tail_min = INFINITY;
  for (std::size_t n = tail_start; n < out.norms.size(); ++n) {
    tail_max = std::max(tail_max, out.norms[n]);
    tail_min = std::min(tail_min, out.norms[n]);
  }
  const bool members = std::all_of(out.membership.begin(), out.membership.end(),
                                   [](Membership m) { return m == Membership::Member; });
  if (tail_max <= 1e-2 * peak && members) {
    out.verdict = Compactness::CompactLikely;
  } else if (tail_min >= 0.25 * peak) {
    out.verdict = Compactness::NonCompactLikely;
  }
  return out;
}

}  // namespace nucheck
