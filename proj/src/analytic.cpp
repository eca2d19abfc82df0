#include "nucheck/analytic.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nucheck/error.hpp"
#include "nucheck/quad.hpp"
#include "nucheck/text.hpp"

namespace nucheck {

struct AnalyticFunction::Node {
  enum class Kind { Poly, Kernel, Sum, Product, Scale, Compose, Integral };
  Kind kind = Kind::Poly;
  Polynomial poly;
  cplx center = 0.0;  // kernel centre, or the scale factor
  double power = 0.0;
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
};

namespace {

using Node = AnalyticFunction::Node;
using NodePtr = std::shared_ptr<const Node>;
constexpr int kPathNodes = 128;

NodePtr make_poly(Polynomial p) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Poly;
  n->poly = std::move(p);
  return n;
}

NodePtr make_node(Node::Kind kind, NodePtr a, NodePtr b = nullptr, cplx c = 0.0, double p = 0.0) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->a = std::move(a);
  n->b = std::move(b);
  n->center = c;
  n->power = p;
  return n;
}

const Polynomial* poly_of(const NodePtr& n) {
  return n->kind == Node::Kind::Poly ? &n->poly : nullptr;
}

bool is_zero_node(const NodePtr& n) { return n->kind == Node::Kind::Poly && n->poly.is_zero(); }

NodePtr sum(const NodePtr& a, const NodePtr& b) {
  if (is_zero_node(a)) return b;
  if (is_zero_node(b)) return a;
  if (poly_of(a) && poly_of(b)) return make_poly(a->poly + b->poly);
  return make_node(Node::Kind::Sum, a, b);
}

NodePtr scale(cplx s, const NodePtr& a) {
  if (s == cplx(0.0) || is_zero_node(a)) return make_poly({});
  if (s == cplx(1.0)) return a;
  if (poly_of(a)) return make_poly(s * a->poly);
  if (a->kind == Node::Kind::Scale) return scale(s * a->center, a->a);
  return make_node(Node::Kind::Scale, a, nullptr, s);
}

NodePtr product(const NodePtr& a, const NodePtr& b) {
  if (is_zero_node(a) || is_zero_node(b)) return make_poly({});
  if (poly_of(a) && poly_of(b)) return make_poly(a->poly * b->poly);
  if (poly_of(a) && a->poly.degree() == 0) return scale(a->poly.coefficient(0), b);
  if (poly_of(b) && b->poly.degree() == 0) return scale(b->poly.coefficient(0), a);
  return make_node(Node::Kind::Product, a, b);
}

bool is_identity_poly(const NodePtr& n) {
  return poly_of(n) && n->poly == Polynomial({0.0, 1.0});
}

NodePtr compose(const NodePtr& outer, const NodePtr& inner) {
  if (is_identity_poly(inner)) return outer;
  if (is_identity_poly(outer)) return inner;
  if (poly_of(outer) && outer->poly.degree() <= 0) return outer;
  if (poly_of(outer) && poly_of(inner)) return make_poly(outer->poly.compose(inner->poly));
  return make_node(Node::Kind::Compose, outer, inner);
}

cplx eval(const Node& n, cplx z) {
  switch (n.kind) {
    case Node::Kind::Poly:
      return n.poly(z);
    case Node::Kind::Kernel:
      return std::pow(1.0 - std::conj(n.center) * z, -n.power);
    case Node::Kind::Sum:
      return eval(*n.a, z) + eval(*n.b, z);
    case Node::Kind::Product:
      return eval(*n.a, z) * eval(*n.b, z);
    case Node::Kind::Scale:
      return n.center * eval(*n.a, z);
    case Node::Kind::Compose:
      return eval(*n.a, eval(*n.b, z));
    case Node::Kind::Integral: {
      const Rule1D& rule = gauss_legendre(kPathNodes);
      cplx acc = 0.0;
      for (int j = 0; j < kPathNodes; ++j) acc += rule.weights[j] * eval(*n.a, z * rule.nodes[j]);
      return z * acc;
    }
  }
  return 0.0;
}

NodePtr derivative(const NodePtr& n) {
  switch (n->kind) {
    case Node::Kind::Poly:
      return make_poly(n->poly.derivative());
    case Node::Kind::Kernel: {
      auto k = std::make_shared<Node>(*n);
      k->power = n->power + 1.0;
      return scale(n->power * std::conj(n->center), k);
    }
    case Node::Kind::Sum:
      return sum(derivative(n->a), derivative(n->b));
    case Node::Kind::Product:
      return sum(product(derivative(n->a), n->b), product(n->a, derivative(n->b)));
    case Node::Kind::Scale:
      return scale(n->center, derivative(n->a));
    case Node::Kind::Compose:
      return product(compose(derivative(n->a), n->b), derivative(n->b));
    case Node::Kind::Integral:
      return n->a;
  }
  return make_poly({});
}

void print(const Node& n, std::ostream& os) {
  using text::format_number;
  switch (n.kind) {
    case Node::Kind::Poly: {
      if (n.poly == Polynomial({0.0, 1.0})) {
        os << "z";
        return;
      }
      os << "poly:[";
      const auto& c = n.poly.coefficients();
      if (c.empty()) os << "0,0";
      for (std::size_t k = 0; k < c.size(); ++k) {
        if (k) os << ';';
        os << format_number(c[k].real()) << ',' << format_number(c[k].imag());
      }
      os << ']';
      return;
    }
    case Node::Kind::Kernel:
      os << "kernel:" << format_number(n.center.real()) << ',' << format_number(n.center.imag())
         << ',' << format_number(n.power);
      return;
    case Node::Kind::Sum:
      os << "(add ";
      print(*n.a, os);
      os << ' ';
      print(*n.b, os);
      os << ')';
      return;
    case Node::Kind::Product:
      os << "(mul ";
      print(*n.a, os);
      os << ' ';
      print(*n.b, os);
      os << ')';
      return;
    case Node::Kind::Scale:
      os << "(scale " << format_number(n.center.real()) << ',' << format_number(n.center.imag())
         << ' ';
      print(*n.a, os);
      os << ')';
      return;
    case Node::Kind::Compose:
      os << "(compose ";
      print(*n.a, os);
      os << ' ';
      print(*n.b, os);
      os << ')';
      return;
    case Node::Kind::Integral:
      os << "(integ ";
      print(*n.a, os);
      os << ')';
      return;
  }
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  NodePtr parse_all() {
    NodePtr n = parse_expr();
    skip_space();
    if (pos_ != s_.size()) fail("trailing characters");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("function expression: " + what + " at offset " + std::to_string(pos_) +
                         " in '" + std::string(s_) + "'",
                     0, "function");
  }

  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  std::string_view word() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) &&
           s_[pos_] != '(' && s_[pos_] != ')') {
      ++pos_;
    }
    if (start == pos_) fail("expected a token");
    return s_.substr(start, pos_ - start);
  }

  cplx complex_pair(std::string_view token) {
    const auto parts = text::split(token, ',');
    if (parts.size() != 2) fail("expected 're,im'");
    return {text::parse_double(parts[0], "real part"), text::parse_double(parts[1], "imaginary part")};
  }

  NodePtr parse_expr() {
    skip_space();
    if (pos_ >= s_.size()) fail("unexpected end");
    if (s_[pos_] == '(') {
      ++pos_;
      const std::string op(word());
      NodePtr result;
      if (op == "add" || op == "mul" || op == "compose") {
        NodePtr a = parse_expr();
        NodePtr b = parse_expr();
        result = op == "add" ? sum(a, b) : op == "mul" ? product(a, b) : compose(a, b);
      } else if (op == "scale") {
        const cplx s = complex_pair(word());
        result = scale(s, parse_expr());
      } else if (op == "deriv") {
        result = derivative(parse_expr());
      } else if (op == "integ") {
        NodePtr a = parse_expr();
        result = poly_of(a) ? make_poly(a->poly.antiderivative())
                            : make_node(Node::Kind::Integral, a);
      } else {
        fail("unknown operator '" + op + "'");
      }
      skip_space();
      if (pos_ >= s_.size() || s_[pos_] != ')') fail("expected ')'");
      ++pos_;
      return result;
    }
    if (s_.substr(pos_).starts_with("poly:[")) {
      pos_ += 6;
      const std::size_t close = s_.find(']', pos_);
      if (close == std::string_view::npos) fail("unterminated coefficient list");
      const std::string_view body = s_.substr(pos_, close - pos_);
      pos_ = close + 1;
      std::vector<cplx> coeffs;
      for (const auto& term : text::split(body, ';')) coeffs.push_back(complex_pair(text::trim(term)));
      return make_poly(Polynomial(std::move(coeffs)));
    }
    const std::string_view token = word();
    if (token == "z") return make_poly(Polynomial({0.0, 1.0}));
    if (token.starts_with("kernel:")) {
      const auto parts = text::split(token.substr(7), ',');
      if (parts.size() != 3) fail("kernel needs 'c_re,c_im,p'");
      const cplx c{text::parse_double(parts[0], "kernel centre"),
                   text::parse_double(parts[1], "kernel centre")};
      const double p = text::parse_double(parts[2], "kernel power");
      try {
        AnalyticFunction::kernel_power(c, p);
      } catch (const Error& e) {
        fail(e.what());
      }
      if (c == cplx(0.0)) return make_poly(Polynomial::constant(1.0));
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Kernel;
      n->center = c;
      n->power = p;
      return n;
    }
    fail("unknown atom '" + std::string(token) + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

AnalyticFunction::AnalyticFunction() : node_(make_poly({})) {}

AnalyticFunction::AnalyticFunction(Polynomial p) : node_(make_poly(std::move(p))) {}

AnalyticFunction AnalyticFunction::constant(cplx c) { return Polynomial::constant(c); }

AnalyticFunction AnalyticFunction::identity() { return Polynomial({0.0, 1.0}); }

AnalyticFunction AnalyticFunction::monomial(int degree, cplx c) {
  return Polynomial::monomial(degree, c);
}

AnalyticFunction AnalyticFunction::kernel_power(cplx c, double p) {
  if (!(std::abs(c) < 1.0)) throw DomainError("kernel centre must satisfy |c| < 1");
  if (!(p > 0.0) || !std::isfinite(p)) throw PreconditionError("kernel power must be positive");
  if (c == cplx(0.0)) return constant(1.0);
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Kernel;
  n->center = c;
  n->power = p;
  return AnalyticFunction(NodePtr(n));
}

AnalyticFunction AnalyticFunction::parse(std::string_view text) {
  return AnalyticFunction(Parser(text).parse_all());
}

std::string AnalyticFunction::to_string() const {
  std::ostringstream os;
  print(*node_, os);
  return os.str();
}

cplx AnalyticFunction::operator()(cplx z) const {
  if (!(std::abs(z) < 1.0)) throw DomainError("evaluation point outside the open unit disk");
  return eval(*node_, z);
}

cplx AnalyticFunction::evaluate(cplx z) const { return eval(*node_, z); }

AnalyticFunction AnalyticFunction::derivative() const {
  return AnalyticFunction(nucheck::derivative(node_));
}

AnalyticFunction AnalyticFunction::antiderivative() const {
  if (const Polynomial* p = as_polynomial()) return p->antiderivative();
  return AnalyticFunction(make_node(Node::Kind::Integral, node_));
}

AnalyticFunction AnalyticFunction::compose(const AnalyticFunction& inner) const {
  return AnalyticFunction(nucheck::compose(node_, inner.node_));
}

bool AnalyticFunction::is_polynomial() const { return node_->kind == Node::Kind::Poly; }

const Polynomial* AnalyticFunction::as_polynomial() const { return poly_of(node_); }

bool AnalyticFunction::is_zero() const { return is_zero_node(node_); }

bool AnalyticFunction::is_monomial() const {
  const Polynomial* p = as_polynomial();
  if (!p) return false;
  int nonzero = 0;
  for (const cplx& c : p->coefficients()) nonzero += c != cplx(0.0);
  return nonzero <= 1;
}

AnalyticFunction operator+(const AnalyticFunction& a, const AnalyticFunction& b) {
  return AnalyticFunction(sum(a.node_, b.node_));
}

AnalyticFunction operator-(const AnalyticFunction& a, const AnalyticFunction& b) {
  return AnalyticFunction(sum(a.node_, scale(-1.0, b.node_)));
}

AnalyticFunction operator*(const AnalyticFunction& a, const AnalyticFunction& b) {
  return AnalyticFunction(product(a.node_, b.node_));
}

AnalyticFunction operator*(cplx s, const AnalyticFunction& a) {
  return AnalyticFunction(scale(s, a.node_));
}

SelfMap::SelfMap(AnalyticFunction phi) : phi_(std::move(phi)) {
  double m = 0.0;
  for (int k = 0; k < kCertificateAngles; ++k) {
    const double t = 2.0 * std::numbers::pi * k / kCertificateAngles;
    const double v = std::abs(phi_.evaluate(std::polar(kCertificateRadius, t)));
    if (!std::isfinite(v)) throw DomainError("self-map is not finite on the certificate circle");
    m = std::max(m, v);
  }
  sampled_max_ = m;
  if (m > 1.0 + 1e-9) {
    std::ostringstream os;
    os.precision(12);
    os << "function is not a self-map of the disk: max |phi| = " << m << " on |z| = "
       << kCertificateRadius;
    throw DomainError(os.str());
  }
}

SelfMap SelfMap::identity() { return SelfMap(AnalyticFunction::identity()); }

bool SelfMap::is_identity() const {
  const Polynomial* p = phi_.as_polynomial();
  return p && *p == Polynomial({0.0, 1.0});
}

std::optional<cplx> SelfMap::constant_value() const {
  const Polynomial* p = phi_.as_polynomial();
  if (p && p->degree() <= 0) return p->coefficient(0);
  return std::nullopt;
}

}  // namespace nucheck
