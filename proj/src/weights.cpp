#include "nucheck/weights.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <variant>

#include "nucheck/error.hpp"
#include "nucheck/text.hpp"

namespace nucheck {

namespace {

struct StandardW {
  double exponent;
};
struct ExponentialW {
  double c;
};
struct ConstantW {};
struct TableW {
  std::vector<double> r;
  std::vector<double> log_v;
  std::vector<double> slope;  // d(log v)/dr at the samples
  std::string source;
};
struct DualW {
  RadialWeight nu;
  double alpha;
};

// log(1 - r^2) computed as log((1-r)(1+r)); exact enough for r = 1 - 2^-k.
double log_one_minus_r2(double r) { return std::log((1.0 - r) * (1.0 + r)); }

// Fritsch-Carlson monotone slopes.
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    delta[i] = (y[i + 1] - y[i]) / h[i];
  }
  if (n == 2) {
    d[0] = d[1] = delta[0];
    return d;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      d[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (s * d0 <= 0.0) {
      s = 0.0;
    } else if (d0 * d1 <= 0.0 && std::abs(s) > std::abs(3.0 * d0)) {
      s = 3.0 * d0;
    }
    return s;
  };
  d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  return d;
}

double table_log_value(const TableW& t, double r) {
  if (r <= t.r.front()) return t.log_v.front();
  if (r > t.r.back()) {
    throw ResolutionError("tabulated weight '" + t.source + "' not evaluable at r = " +
                          text::format_number(r) + " (table ends at " +
                          text::format_number(t.r.back()) + ")");
  }
  const auto it = std::upper_bound(t.r.begin(), t.r.end(), r);
  const std::size_t i = std::min<std::size_t>(std::distance(t.r.begin(), it) - 1, t.r.size() - 2);
  const double h = t.r[i + 1] - t.r[i];
  const double s = (r - t.r[i]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * t.log_v[i] + h10 * h * t.slope[i] + h01 * t.log_v[i + 1] +
         h11 * h * t.slope[i + 1];
}

}  // namespace

struct RadialWeight::Impl {
  std::variant<StandardW, ExponentialW, ConstantW, TableW, DualW> data;
};

RadialWeight RadialWeight::standard(double exponent) {
  if (!(exponent > 0.0) || !std::isfinite(exponent)) {
    throw InvalidWeightError("standard weight exponent must be > 0, got " +
                             text::format_number(exponent));
  }
  return RadialWeight(std::make_shared<Impl>(Impl{StandardW{exponent}}));
}

RadialWeight RadialWeight::exponential(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw InvalidWeightError("exponential weight constant must be > 0, got " +
                             text::format_number(c));
  }
  return RadialWeight(std::make_shared<Impl>(Impl{ExponentialW{c}}));
}

RadialWeight RadialWeight::constant() {
  return RadialWeight(std::make_shared<Impl>(Impl{ConstantW{}}));
}

RadialWeight RadialWeight::tabulated(std::vector<double> radii, std::vector<double> values,
                                     std::string source) {
  if (radii.size() != values.size() || radii.size() < 2) {
    throw InvalidWeightError("tabulated weight needs at least two (r, value) samples");
  }
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] >= 0.0 && radii[i] < 1.0)) {
      throw InvalidWeightError("table radius outside [0,1): " + text::format_number(radii[i]));
    }
    if (i > 0 && !(radii[i] > radii[i - 1])) {
      throw InvalidWeightError("table radii must be strictly increasing");
    }
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      throw InvalidWeightError("table values must be positive and finite");
    }
    if (i > 0 && values[i] > values[i - 1] + 1e-12) {
      throw InvalidWeightError("table values must be non-increasing");
    }
  }
  TableW t;
  t.r = std::move(radii);
  t.log_v.reserve(values.size());
  for (double v : values) t.log_v.push_back(std::log(v));
  t.slope = pchip_slopes(t.r, t.log_v);
  t.source = std::move(source);
  return RadialWeight(std::make_shared<Impl>(Impl{std::move(t)}));
}

RadialWeight RadialWeight::load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open weight table '" + path + "'", 0, "table");
  std::vector<double> r, v;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (text::trim(line).empty()) continue;
    std::istringstream fields(line);
    double a = 0.0, b = 0.0;
    if (!(fields >> a >> b)) {
      throw ParseError("weight table '" + path + "': expected two columns", line_no, "table");
    }
    r.push_back(a);
    v.push_back(b);
  }
  try {
    return tabulated(std::move(r), std::move(v), path);
  } catch (const InvalidWeightError& e) {
    throw ParseError("weight table '" + path + "': " + e.what(), 0, "table");
  }
}

RadialWeight RadialWeight::pair_dual(const RadialWeight& nu, double alpha) {
  return RadialWeight(std::make_shared<Impl>(Impl{DualW{nu, alpha}}));
}

RadialWeight RadialWeight::parse(std::string_view spec) {
  const std::string_view s = text::trim(spec);
  auto wrap = [&](auto&& make) -> RadialWeight {
    try {
      return make();
    } catch (const InvalidWeightError& e) {
      throw ParseError(std::string("weight '") + std::string(s) + "': " + e.what(), 0, "weight");
    }
  };
  if (s == "const") return constant();
  const auto colon = s.find(':');
  if (colon == std::string_view::npos) {
    throw ParseError("unknown weight kind '" + std::string(s) + "'", 0, "weight");
  }
  const std::string_view head = s.substr(0, colon);
  const std::string_view arg = text::trim(s.substr(colon + 1));
  if (head == "standard") {
    const double a = text::parse_double(arg, "standard weight exponent");
    return wrap([&] { return standard(a); });
  }
  if (head == "exp") {
    const double c = text::parse_double(arg, "exponential weight constant");
    return wrap([&] { return exponential(c); });
  }
  if (head == "table") {
    if (arg.empty()) throw ParseError("table weight needs a path", 0, "weight");
    return load_table(std::string(arg));
  }
  throw ParseError("unknown weight kind '" + std::string(head) + "'", 0, "weight");
}

std::string RadialWeight::spec() const {
  struct Visitor {
    std::string operator()(const StandardW& w) const {
      return "standard:" + text::format_number(w.exponent);
    }
    std::string operator()(const ExponentialW& w) const {
      return "exp:" + text::format_number(w.c);
    }
    std::string operator()(const ConstantW&) const { return "const"; }
    std::string operator()(const TableW& w) const { return "table:" + w.source; }
    std::string operator()(const DualW& w) const {
      return "dual(" + text::format_number(w.alpha) + "," + w.nu.spec() + ")";
    }
  };
  return std::visit(Visitor{}, impl_->data);
}

RadialWeight::Kind RadialWeight::kind() const {
  return static_cast<Kind>(impl_->data.index());
}

double RadialWeight::parameter() const {
  if (auto* s = std::get_if<StandardW>(&impl_->data)) return s->exponent;
  if (auto* e = std::get_if<ExponentialW>(&impl_->data)) return e->c;
  if (auto* d = std::get_if<DualW>(&impl_->data)) return d->alpha;
  return 0.0;
}

double RadialWeight::log_value(double r) const {
  if (!(r >= 0.0 && r < 1.0)) {
    throw DomainError("weight evaluated outside [0,1): r = " + text::format_number(r));
  }
  struct Visitor {
    double r;
    double operator()(const StandardW& w) const { return w.exponent * log_one_minus_r2(r); }
    double operator()(const ExponentialW& w) const { return -w.c / (1.0 - r); }
    double operator()(const ConstantW&) const { return 0.0; }
    double operator()(const TableW& w) const { return table_log_value(w, r); }
    double operator()(const DualW& w) const {
      return w.alpha * log_one_minus_r2(r) - w.nu.log_value(r);
    }
  };
  return std::visit(Visitor{r}, impl_->data);
}

double RadialWeight::operator()(double r) const {
  if (auto* s = std::get_if<StandardW>(&impl_->data)) {
    if (!(r >= 0.0 && r < 1.0)) {
      throw DomainError("weight evaluated outside [0,1): r = " + text::format_number(r));
    }
    return std::pow((1.0 - r) * (1.0 + r), s->exponent);
  }
  return std::exp(log_value(r));
}

double RadialWeight::max_radius() const {
  if (auto* t = std::get_if<TableW>(&impl_->data)) return t->r.back();
  if (auto* d = std::get_if<DualW>(&impl_->data)) return d->nu.max_radius();
  return 1.0;
}

void RadialWeight::validate(int samples) const {
  const double top = std::min(max_radius(), 1.0 - 1.0 / samples);
  const bool monotone = kind() != Kind::PairDual;
  double previous = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double r = top * static_cast<double>(i) / (samples - 1);
    const double lv = log_value(r);
    if (!std::isfinite(lv)) {
      throw InvalidWeightError("weight not positive and finite at r = " + text::format_number(r));
    }
    const double v = std::exp(lv);
    if (monotone && v > previous + 1e-12) {
      throw InvalidWeightError("weight increases at r = " + text::format_number(r));
    }
    previous = v;
  }
}

std::string to_string(NormalityVerdict v) {
  switch (v) {
    case NormalityVerdict::Normal:
      return "Normal";
    case NormalityVerdict::FailsI:
      return "FailsI";
    case NormalityVerdict::FailsII:
      return "FailsII";
  }
  return "?";
}

NormalityReport check_normality(const RadialWeight& w, const NormalityOptions& options) {
  const int n_max = options.n_max;
  const int k_max = options.k_max;
  const double tol = options.tol;
  if (n_max < 4) throw PreconditionError("check_normality: n_max must be >= 4");
  if (k_max < 1) throw PreconditionError("check_normality: k_max must be >= 1");

  // Dyadic radii r_n = 1 - 2^-n for n = 1 .. n_max + k_max (exact in binary).
  const int n_top = n_max + std::max(1, k_max);
  const double needed = 1.0 - std::ldexp(1.0, -(n_max + 1));
  if (w.max_radius() < needed) {
    throw ResolutionError("weight not evaluable at dyadic radius 1 - 2^-" +
                          std::to_string(n_max + 1));
  }
  std::vector<double> log_nu(n_top + 1, 0.0), log_gap(n_top + 1, 0.0);
  for (int n = 1; n <= n_top; ++n) {
    const double r = 1.0 - std::ldexp(1.0, -n);
    log_gap[n] = std::log((1.0 - r) * (1.0 + r));
    log_nu[n] = r <= w.max_radius() ? w.log_value(r) : log_nu[n - 1];
  }

  NormalityReport report;
  report.certified = w.closed_form();
  report.condition_i_ratios.reserve(n_max);
  double inf_log = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= n_max; ++n) {
    const double lr = log_nu[n + 1] - log_nu[n];
    report.condition_i_ratios.push_back(std::exp(lr));
    inf_log = std::min(inf_log, lr);
  }
  report.condition_i_inf = std::exp(inf_log);

  // Tail window over which limsup / drift are estimated.
  const int tail_start = std::max(1, n_max / 2);

  for (int k = 1; k <= k_max; ++k) {
    double sup_log = -std::numeric_limits<double>::infinity();
    for (int n = tail_start; n + k <= n_max + 1; ++n) {
      sup_log = std::max(sup_log, log_nu[n + k] - log_nu[n]);
    }
    if (std::exp(sup_log) < 1.0 - tol) {
      report.condition_ii_k = k;
      break;
    }
  }

  // Net drift of log(nu / (1-r^2)^b) per dyadic step over the tail window.
  const int steps = n_max + 1 - tail_start;
  auto drift = [&](double b) {
    const double d_nu = log_nu[n_max + 1] - log_nu[tail_start];
    const double d_gap = log_gap[n_max + 1] - log_gap[tail_start];
    return (d_nu - b * d_gap) / steps;
  };
  // Exponent estimates are the sharp crossing points; `tol` only enters the
  // strict inequalities that consume them.
  auto almost_increasing = [&](double b) { return drift(b) >= 0.0; };
  auto almost_decreasing = [&](double b) { return drift(b) <= 0.0; };

  constexpr double kExponentCap = 8.0;
  constexpr double kExponentFloor = 1e-3;
  if (almost_increasing(kExponentCap)) {
    double lo = 0.0, hi = kExponentCap;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (almost_increasing(mid) ? hi : lo) = mid;
    }
    report.beta_estimate = hi;
  }
  if (almost_decreasing(kExponentFloor)) {
    double lo = kExponentFloor, hi = kExponentCap;
    if (almost_decreasing(hi)) {
      report.gamma_estimate = hi;
    } else {
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (almost_decreasing(mid) ? lo : hi) = mid;
      }
      report.gamma_estimate = lo;
    }
  }

  if (!(report.condition_i_inf > tol)) {
    report.verdict = NormalityVerdict::FailsI;
  } else if (!report.condition_ii_k) {
    report.verdict = NormalityVerdict::FailsII;
  } else {
    report.verdict = NormalityVerdict::Normal;
  }
  return report;
}

NormalPair make_normal_pair(const RadialWeight& nu, double alpha, const NormalityOptions& options) {
  const NormalityReport report = check_normality(nu, options);
  if (report.verdict != NormalityVerdict::Normal) {
    throw InvalidWeightError("weight " + nu.spec() + " is not normal (" +
                             to_string(report.verdict) + ")");
  }
  if (!report.beta_estimate) {
    throw InvalidWeightError("weight " + nu.spec() + " needs beta > 8 (unsupported range)");
  }
  const double beta = *report.beta_estimate;
  if (!(alpha > beta - 1.0 + options.tol)) {
    throw PreconditionError("normal pair requires alpha > beta - 1 = " +
                            text::format_number(beta - 1.0) + ", got alpha = " +
                            text::format_number(alpha));
  }
  return NormalPair{nu, RadialWeight::pair_dual(nu, alpha), alpha, beta};
}

}  // namespace nucheck
