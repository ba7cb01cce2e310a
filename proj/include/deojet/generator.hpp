#pragma once

/**
 * Elementary test functions with closed-form derivatives of every order.
 *
 * Generators are the exact source of jets: each kind knows its m-th
 * derivative at any point, so jets built from them carry no truncation or
 * sampling error.  A central-difference oracle is provided as an
 * independent cross-check.
 */

#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "deojet/jet.hpp"

namespace deojet {

class Generator;

namespace gen {

struct Exponential {
  double rate = 1.0;  // e^(rate * t)
};

struct Cosine {
  double amplitude = 1.0;
  double omega = 1.0;
  double phase = 0.0;  // amplitude * cos(omega*t + phase)
};

struct Polynomial {
  std::vector<double> coeffs;  // sum_i coeffs[i] * t^i
};

struct Gaussian {
  double sigma = 1.0;
  double center = 0.0;  // exp(-((t - center)/sigma)^2)
};

struct Product {
  std::vector<Generator> factors;
};

struct Sum {
  std::vector<Generator> terms;
};

}  // namespace gen

class Generator {
 public:
  using Node = std::variant<gen::Exponential, gen::Cosine, gen::Polynomial, gen::Gaussian, gen::Product, gen::Sum>;

  Generator(gen::Exponential e) : node_(std::make_shared<Node>(e)) {}
  Generator(gen::Cosine c) : node_(std::make_shared<Node>(c)) {}
  Generator(gen::Polynomial p) : node_(std::make_shared<Node>(validated(std::move(p)))) {}
  Generator(gen::Gaussian g) : node_(std::make_shared<Node>(validated(g))) {}
  Generator(gen::Product p) : node_(std::make_shared<Node>(std::move(p))) {}
  Generator(gen::Sum s) : node_(std::make_shared<Node>(std::move(s))) {}

  /// Exact m-th derivative at t (m >= 0).
  double derivative(int m, double t) const {
    if (m < 0) throw std::invalid_argument("Generator::derivative: order must be >= 0");
    return deriv_node(*node_, m, t);
  }

  double value(double t) const { return derivative(0, t); }

  /// Closed-form first antiderivative where one exists for the kind
  /// (exponential, cosine, polynomial, gaussian via erf, sums of those).
  /// Decaying kinds use the primitive vanishing at -infinity.
  std::optional<double> antiderivative(double t) const { return anti_node(*node_, t); }

  /// Whether the function satisfies the negative-axis decay condition the
  /// energy integrals assume.  Exponential/cosine/polynomial probes are
  /// algebraic only and flagged false.
  bool schwartz_decaying() const { return decaying_node(*node_); }

  std::string describe() const { return describe_node(*node_); }

 private:
  static gen::Polynomial validated(gen::Polynomial p) {
    if (p.coeffs.empty()) throw std::invalid_argument("polynomial generator: empty coefficient list");
    return p;
  }
  static gen::Gaussian validated(gen::Gaussian g) {
    if (!(g.sigma > 0.0)) throw std::invalid_argument("gaussian generator: sigma must be > 0");
    return g;
  }

  static double deriv_node(const Node& n, int m, double t);
  static std::optional<double> anti_node(const Node& n, double t);
  static bool decaying_node(const Node& n);
  static std::string describe_node(const Node& n);

  std::shared_ptr<const Node> node_;
};

inline double Generator::deriv_node(const Node& n, int m, double t) {
  struct V {
    int m;
    double t;
    double operator()(const gen::Exponential& e) const {
      if (e.rate == 0.0) return m == 0 ? 1.0 : 0.0;
      return std::pow(e.rate, m) * std::exp(e.rate * t);
    }
    double operator()(const gen::Cosine& c) const {
      // d^m cos(x) cycles through {cos, -sin, -cos, sin}; staying on the
      // quadrant table keeps derivatives exact at phase multiples of pi/2.
      const double x = c.omega * t + c.phase;
      double q;
      switch (m & 3) {
        case 0: q = std::cos(x); break;
        case 1: q = -std::sin(x); break;
        case 2: q = -std::cos(x); break;
        default: q = std::sin(x); break;
      }
      return c.amplitude * std::pow(c.omega, m) * q;
    }
    double operator()(const gen::Polynomial& p) const {
      double acc = 0.0;
      const int deg = static_cast<int>(p.coeffs.size()) - 1;
      for (int i = m; i <= deg; ++i) {
        double falling = 1.0;
        for (int j = 0; j < m; ++j) falling *= static_cast<double>(i - j);
        acc += p.coeffs[static_cast<std::size_t>(i)] * falling * std::pow(t, i - m);
      }
      return acc;
    }
    double operator()(const gen::Gaussian& g) const {
      // f = exp(-z^2), z = (t-c)/sigma;  d^m/dz^m e^{-z^2} = (-1)^m H_m(z) e^{-z^2}
      const double z = (t - g.center) / g.sigma;
      double hprev = 1.0, h = 2.0 * z;  // physicists' Hermite H_0, H_1
      if (m == 0) h = 1.0;
      for (int i = 1; i < m; ++i) {
        const double hnext = 2.0 * z * h - 2.0 * i * hprev;
        hprev = h;
        h = hnext;
      }
      const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
      return sgn * h * std::exp(-z * z) / std::pow(g.sigma, m);
    }
    double operator()(const gen::Product& p) const {
      if (p.factors.empty()) throw std::invalid_argument("product generator: no factors");
      // fold with the general Leibniz rule
      double acc = 0.0;
      if (p.factors.size() == 1) return p.factors[0].derivative(m, t);
      gen::Product rest{std::vector<Generator>(p.factors.begin() + 1, p.factors.end())};
      const Generator& head = p.factors[0];
      for (int i = 0; i <= m; ++i)
        acc += binomial(m, i) * head.derivative(i, t) * V{m - i, t}(rest);
      return acc;
    }
    double operator()(const gen::Sum& s) const {
      if (s.terms.empty()) throw std::invalid_argument("sum generator: no terms");
      double acc = 0.0;
      for (const Generator& g : s.terms) acc += g.derivative(m, t);
      return acc;
    }
  };
  return std::visit(V{m, t}, n);
}

inline std::optional<double> Generator::anti_node(const Node& n, double t) {
  struct V {
    double t;
    std::optional<double> operator()(const gen::Exponential& e) const {
      if (e.rate == 0.0) return t;
      return std::exp(e.rate * t) / e.rate;
    }
    std::optional<double> operator()(const gen::Cosine& c) const {
      if (c.omega == 0.0) return c.amplitude * std::cos(c.phase) * t;
      return c.amplitude / c.omega * std::sin(c.omega * t + c.phase);
    }
    std::optional<double> operator()(const gen::Polynomial& p) const {
      double acc = 0.0;
      for (std::size_t i = 0; i < p.coeffs.size(); ++i)
        acc += p.coeffs[i] * std::pow(t, static_cast<int>(i) + 1) / (static_cast<double>(i) + 1.0);
      return acc;
    }
    std::optional<double> operator()(const gen::Gaussian& g) const {
      const double z = (t - g.center) / g.sigma;
      return g.sigma * std::sqrt(std::numbers::pi) / 2.0 * (1.0 + std::erf(z));
    }
    std::optional<double> operator()(const gen::Product&) const { return std::nullopt; }
    std::optional<double> operator()(const gen::Sum& s) const {
      double acc = 0.0;
      for (const Generator& g : s.terms) {
        auto a = g.antiderivative(t);
        if (!a) return std::nullopt;
        acc += *a;
      }
      return acc;
    }
  };
  return std::visit(V{t}, n);
}

inline bool Generator::decaying_node(const Node& n) {
  if (std::holds_alternative<gen::Gaussian>(n)) return true;
  if (const auto* s = std::get_if<gen::Sum>(&n)) {
    for (const Generator& g : s->terms)
      if (!g.schwartz_decaying()) return false;
    return true;
  }
  return false;
}

inline std::string Generator::describe_node(const Node& n) {
  struct V {
    std::string operator()(const gen::Exponential& e) const {
      std::ostringstream os;
      os << "exp:" << e.rate;
      return os.str();
    }
    std::string operator()(const gen::Cosine& c) const {
      std::ostringstream os;
      os << "cos:" << c.omega << ":" << c.phase;
      if (c.amplitude != 1.0) os << ":" << c.amplitude;
      return os.str();
    }
    std::string operator()(const gen::Polynomial& p) const {
      std::ostringstream os;
      os << "poly:";
      for (std::size_t i = 0; i < p.coeffs.size(); ++i) os << (i ? "," : "") << p.coeffs[i];
      return os.str();
    }
    std::string operator()(const gen::Gaussian& g) const {
      std::ostringstream os;
      os << "gauss:" << g.sigma;
      if (g.center != 0.0) os << ":" << g.center;
      return os.str();
    }
    std::string operator()(const gen::Product& p) const {
      std::string s = "prod(";
      for (std::size_t i = 0; i < p.factors.size(); ++i) s += (i ? ";" : "") + p.factors[i].describe();
      return s + ")";
    }
    std::string operator()(const gen::Sum& p) const {
      std::string s = "sum(";
      for (std::size_t i = 0; i < p.terms.size(); ++i) s += (i ? ";" : "") + p.terms[i].describe();
      return s + ")";
    }
  };
  return std::visit(V{}, n);
}

/// Exact jet of a generator at t0.  Non-negative orders are closed-form
/// derivatives; orders -1..-neg_depth are filled per the antiderivative
/// policy (they are free constants, not derivable data).
inline Jet jet_from_generator(const Generator& g, double t0, const JetConfig& cfg) {
  cfg.validate();
  std::vector<double> values(static_cast<std::size_t>(cfg.order + cfg.neg_depth + 1), 0.0);
  if (cfg.antideriv_policy == AntiderivPolicy::randomized && cfg.neg_depth > 0) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int order = -1; order >= -cfg.neg_depth; --order)
      values[static_cast<std::size_t>(order + cfg.neg_depth)] = u(rng);
  }
  for (int m = 0; m <= cfg.order; ++m)
    values[static_cast<std::size_t>(m + cfg.neg_depth)] = g.derivative(m, t0);
  return Jet(t0, -cfg.neg_depth, std::move(values));
}

/// Central-difference derivative with one Richardson extrapolation step,
/// error O(h^4).  Supports order <= 6; completely independent of the jet
/// arithmetic, which is the point.
inline double finite_difference_oracle(const Generator& g, int order, double t, double h) {
  if (order < 0 || order > 6) throw std::invalid_argument("finite_difference_oracle: order must be in [0, 6]");
  if (!(h > 0.0)) throw std::invalid_argument("finite_difference_oracle: h must be > 0");
  if (order == 0) return g.value(t);
  auto central = [&](double step) {
    double acc = 0.0;
    for (int i = 0; i <= order; ++i) {
      const double sign = (i % 2 == 0) ? 1.0 : -1.0;
      acc += sign * binomial(order, i) * g.value(t + (order / 2.0 - i) * step);
    }
    return acc / std::pow(step, order);
  };
  return (4.0 * central(h / 2.0) - central(h)) / 3.0;
}

}  // namespace deojet
