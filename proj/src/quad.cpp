#include "nucheck/quad.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include "nucheck/error.hpp"
#include "nucheck/parallel.hpp"
#include "nucheck/summation.hpp"

namespace nucheck {

namespace {

Rule1D make_gauss_legendre(int n) {
  Rule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p1 = x, p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0, p1 = x;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map [-1,1] -> [0,1]; ascending order.
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.weights[i] = 0.5 * w;
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

Rule1D make_tanh_sinh(int n) {
  // Double-exponential rule on [0,1], renormalized so that the weights sum to 1.
  constexpr double kT = 3.2;
  const double h = 2.0 * kT / (n - 1);
  Rule1D rule;
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    const double t = -kT + h * k;
    const double u = 0.5 * std::numbers::pi * std::sinh(t);
    const double ch = std::cosh(u);
    rule.nodes.push_back(0.5 * (1.0 + std::tanh(u)));
    const double w = 0.25 * h * std::numbers::pi * std::cosh(t) / (ch * ch);
    rule.weights.push_back(w);
    total += w;
  }
  for (auto& w : rule.weights) w /= total;
  return rule;
}

void check_sizes(int n_r, int n_theta) {
  if (n_r < 8 || n_theta < 16) {
    throw PreconditionError("quadrature needs n_r >= 8 and n_theta >= 16 (got " +
                            std::to_string(n_r) + " x " + std::to_string(n_theta) + ")");
  }
}

std::string describe_node(const DiskQuadrature& q, std::size_t i, int j) {
  std::ostringstream os;
  os.precision(17);
  const cplx z = q.node(i, j);
  os << "node (radial " << i << ", angular " << j << ") at z = " << z.real()
     << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
  return os.str();
}

template <class Value, class Sum, class Field>
Value integrate_impl(const Field& field, const DiskQuadrature& q) {
  const std::size_t n_rings = q.radial_count();
  std::vector<Value> ring_sums(n_rings);
  parallel_for(n_rings, [&](std::size_t i) {
    Sum ring;
    for (int j = 0; j < q.n_theta; ++j) {
      const Value v = field(q.node(i, j));
      if (!std::isfinite(std::abs(v))) {
        throw EvaluationError("non-finite integrand at " + describe_node(q, i, j));
      }
      ring += v;
    }
    ring_sums[i] = ring.value() * q.weight(i);
  });
  Sum total;
  for (const Value& v : ring_sums) total += v;
  return total.value();
}

}  // namespace

const Rule1D& gauss_legendre(int n) {
  if (n < 1) throw PreconditionError("gauss_legendre: n must be >= 1");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<Rule1D>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Rule1D>(make_gauss_legendre(n));
  return *slot;
}

Rule1D gauss_jacobi(int n, double a) {
  if (n < 1) throw PreconditionError("gauss_jacobi: n must be >= 1");
  if (!(a > -1.0)) throw PreconditionError("gauss_jacobi: exponent must be > -1");
  // Jacobi matrix for P^(a,0) on [-1,1].
  const double b = 0.0;
  Eigen::VectorXd diag(n), off(std::max(n - 1, 1));
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    diag(k) = (k == 0) ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
  }
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    const double num = 4.0 * k * (k + a) * (k + b) * (k + a + b);
    const double den = s * s * (s + 1.0) * (s - 1.0);
    off(k - 1) = std::sqrt(num / den);
  }
  Rule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  if (n == 1) {
    rule.nodes[0] = 0.5 * (1.0 + diag(0));
    rule.weights[0] = 1.0 / (a + 1.0);
    return rule;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, off.head(n - 1), Eigen::ComputeEigenvectors);
  // Weights for (1-s)^a ds on [0,1] sum to 1/(a+1).
  const double mu0 = 1.0 / (a + 1.0);
  for (int i = 0; i < n; ++i) {
    const double x = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    rule.nodes[i] = 0.5 * (1.0 + x);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;
}

cplx DiskQuadrature::node(std::size_t radial, int angular) const {
  const double r = std::sqrt(s_nodes[radial]);
  const double theta = angle_offset + 2.0 * std::numbers::pi * angular / n_theta;
  return std::polar(r, theta);
}

double DiskQuadrature::total_weight() const {
  CompensatedSum sum;
  for (double w : s_weights) sum += w;
  return sum.value();
}

DiskQuadrature build_annulus_quadrature(int n_r, int n_theta, double rho_inner, double rho_outer,
                                        RadialClustering clustering) {
  check_sizes(n_r, n_theta);
  if (!(rho_inner >= 0.0 && rho_inner < rho_outer && rho_outer <= 1.0)) {
    throw PreconditionError("annulus radii must satisfy 0 <= inner < outer <= 1");
  }
  DiskQuadrature q;
  q.n_theta = n_theta;
  q.rho_inner = rho_inner;
  q.rho_outer = rho_outer;
  q.clustering = clustering;
  const double s0 = rho_inner * rho_inner;
  const double length = (rho_outer - rho_inner) * (rho_outer + rho_inner);
  const Rule1D rule =
      clustering == RadialClustering::None ? gauss_legendre(n_r) : make_tanh_sinh(n_r);
  q.s_nodes.reserve(n_r);
  q.s_weights.reserve(n_r);
  for (int i = 0; i < n_r; ++i) {
    q.s_nodes.push_back(s0 + length * rule.nodes[i]);
    q.s_weights.push_back(length * rule.weights[i]);
  }
  return q;
}

DiskQuadrature build_quadrature(int n_r, int n_theta, double rho, RadialClustering clustering) {
  check_sizes(n_r, n_theta);
  if (!(rho > 0.0 && rho < 1.0)) throw PreconditionError("quadrature radius must lie in (0,1)");
  return build_annulus_quadrature(n_r, n_theta, 0.0, rho, clustering);
}

DiskQuadrature build_weighted_tail(int n_r, int n_theta, double rho, double a) {
  if (n_r < 1 || n_theta < 1) throw PreconditionError("tail rule needs positive sizes");
  const Rule1D rule = gauss_jacobi(n_r, a);
  const double gap = (1.0 - rho) * (1.0 + rho);
  const double scale = std::pow(gap, a + 1.0);
  DiskQuadrature q;
  q.n_theta = n_theta;
  q.rho_inner = rho;
  q.rho_outer = 1.0;
  for (int i = 0; i < n_r; ++i) {
    q.s_nodes.push_back(rho * rho + gap * rule.nodes[i]);
    q.s_weights.push_back(scale * rule.weights[i]);
  }
  return q;
}

DiskQuadrature rotated(const DiskQuadrature& q, double offset) {
  DiskQuadrature r = q;
  r.angle_offset = q.angle_offset + offset;
  return r;
}

double integrate_disk(const std::function<double(cplx)>& field, const DiskQuadrature& q) {
  return integrate_impl<double, CompensatedSum>(field, q);
}

cplx integrate_disk_complex(const std::function<cplx(cplx)>& field, const DiskQuadrature& q) {
  return integrate_impl<cplx, ComplexCompensatedSum>(field, q);
}

}  // namespace nucheck
