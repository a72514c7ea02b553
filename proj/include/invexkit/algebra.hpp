// Constructors that build function objects together with explicit invexity
// kernels: convex atoms, invertible-map composites, fractional quotients,
// increasing-concave composites, separable and weighted sums, canonical
// kernels, and grid-based stationarity audits.
#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "invexkit/core.hpp"

namespace invexkit {

// Points where the subdifferential switches to interval form are detected at
// this distance from a declared kink locus.
inline constexpr double kKinkDetectTol = 1e-12;

namespace detail {

// Deterministic probe points used by construction-time sampled checks
// (sign/range/Jacobian preconditions).  Fixed internal seed: construction
// must not depend on caller RNG state.
inline std::vector<Vector> construction_probes(const DomainSpec& dom,
                                               std::size_t count = 256) {
  const Box& b = dom.sample_region();
  std::vector<Vector> pts;
  pts.reserve(count + 2);
  pts.push_back(b.lo);
  pts.push_back(b.hi);
  Rng rng(0x5eedc0de);
  for (std::size_t k = 0; k < count; ++k) {
    Vector p(b.dim());
    for (std::size_t i = 0; i < b.dim(); ++i)
      p[i] = rng.uniform(b.lo[i], b.hi[i]);
    pts.push_back(std::move(p));
  }
  return pts;
}

inline std::shared_ptr<const DomainSpec> shared_domain(const DomainSpec& d) {
  return std::make_shared<const DomainSpec>(d);
}

// alpha(x,y) == 1: kernel of every convex atom
inline KernelFn const_alpha_kernel(const DomainSpec& dom) {
  return KernelFn::scaled_difference(
             RuleId{"alpha_const", {1.0}},
             [](const Vector&, const Vector&) { return 1.0; })
      .with_domain(shared_domain(dom));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Convex atoms.  Each carries the kernel eta(x,y) = y - x and convexity (and
// where true, concavity) certificates.

struct ConvexAtomSpec {
  enum class Kind { abs, square, sum_squares, affine, norm1, sum_abs_shifted, exp };

  Kind kind = Kind::abs;
  double shift = 0.0;       // abs
  double offset = 0.0;      // abs: |t - shift| + offset
  double a = 1.0, b = 0.0;  // affine: a t + b
  Vector shifts;            // sum_abs_shifted
  std::size_t dim = 1;      // norm1 / sum_squares
  std::optional<DomainSpec> domain;  // overrides the default domain

  static ConvexAtomSpec abs(double shift = 0.0, double offset = 0.0) {
    ConvexAtomSpec s;
    s.kind = Kind::abs;
    s.shift = shift;
    s.offset = offset;
    return s;
  }
  static ConvexAtomSpec square() {
    ConvexAtomSpec s;
    s.kind = Kind::square;
    return s;
  }
  static ConvexAtomSpec sum_squares(std::size_t dim) {
    ConvexAtomSpec s;
    s.kind = Kind::sum_squares;
    s.dim = dim;
    return s;
  }
  // affine scalar map a t + b; when used as a denominator it must be
  // positive on its declared domain (validated at construction)
  static ConvexAtomSpec affine(double a, double b) {
    ConvexAtomSpec s;
    s.kind = Kind::affine;
    s.a = a;
    s.b = b;
    return s;
  }
  static ConvexAtomSpec norm1(std::size_t dim) {
    ConvexAtomSpec s;
    s.kind = Kind::norm1;
    s.dim = dim;
    return s;
  }
  static ConvexAtomSpec sum_abs_shifted(Vector shifts) {
    ConvexAtomSpec s;
    s.kind = Kind::sum_abs_shifted;
    s.shifts = std::move(shifts);
    return s;
  }
  static ConvexAtomSpec exp() {
    ConvexAtomSpec s;
    s.kind = Kind::exp;
    return s;
  }

  ConvexAtomSpec with_domain(DomainSpec d) const {
    ConvexAtomSpec s = *this;
    s.domain = std::move(d);
    return s;
  }
};

inline FunctionObject make_convex_atom(const ConvexAtomSpec& spec) {
  using Kind = ConvexAtomSpec::Kind;
  std::string desc;
  EvalFn eval;
  SubdiffFn subdiff;
  std::vector<std::vector<double>> kinks;
  bool concave = false;
  std::size_t dim = 1;

  switch (spec.kind) {
    case Kind::abs: {
      double s = spec.shift, o = spec.offset;
      desc = "abs(" + format_double(s) + "," + format_double(o) + ")";
      eval = [s, o](const Vector& x) { return std::abs(x[0] - s) + o; };
      subdiff = [s](const Vector& x) {
        double t = x[0] - s;
        if (std::abs(t) <= kKinkDetectTol)
          return SubgradientSet({0.0}, {-1.0}, {1.0});
        return SubgradientSet::singleton({t > 0 ? 1.0 : -1.0});
      };
      kinks = {{s}};
      break;
    }
    case Kind::square: {
      desc = "square";
      eval = [](const Vector& x) { return x[0] * x[0]; };
      subdiff = [](const Vector& x) {
        return SubgradientSet::singleton({2.0 * x[0]});
      };
      break;
    }
    case Kind::sum_squares: {
      dim = spec.dim;
      desc = "sum_squares(" + std::to_string(dim) + ")";
      eval = [](const Vector& x) {
        double s = 0;
        for (double t : x) s += t * t;
        return s;
      };
      subdiff = [](const Vector& x) {
        return SubgradientSet::singleton(scaled(x, 2.0));
      };
      break;
    }
    case Kind::affine: {
      double a = spec.a, b = spec.b;
      desc = "affine(" + format_double(a) + "," + format_double(b) + ")";
      eval = [a, b](const Vector& x) { return a * x[0] + b; };
      subdiff = [a](const Vector&) { return SubgradientSet::singleton({a}); };
      concave = true;
      break;
    }
    case Kind::norm1: {
      dim = spec.dim;
      desc = "norm1(" + std::to_string(dim) + ")";
      eval = [](const Vector& x) {
        double s = 0;
        for (double t : x) s += std::abs(t);
        return s;
      };
      subdiff = [dim](const Vector& x) {
        Vector sm(dim, 0.0), lo(dim, 0.0), hi(dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i) {
          if (std::abs(x[i]) <= kKinkDetectTol) {
            lo[i] = -1.0;
            hi[i] = 1.0;
          } else {
            sm[i] = x[i] > 0 ? 1.0 : -1.0;
          }
        }
        return SubgradientSet(std::move(sm), std::move(lo), std::move(hi));
      };
      kinks.assign(dim, {0.0});
      break;
    }
    case Kind::sum_abs_shifted: {
      Vector sh = spec.shifts;
      if (sh.empty()) throw InvalidSpec("sum_abs_shifted: empty shifts");
      dim = sh.size();
      desc = "sumabs(";
      for (std::size_t i = 0; i < sh.size(); ++i)
        desc += (i ? "," : "") + format_double(sh[i]);
      desc += ")";
      eval = [sh](const Vector& x) {
        double s = 0;
        for (std::size_t i = 0; i < sh.size(); ++i) s += std::abs(x[i] - sh[i]);
        return s;
      };
      subdiff = [sh](const Vector& x) {
        std::size_t n = sh.size();
        Vector sm(n, 0.0), lo(n, 0.0), hi(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
          double t = x[i] - sh[i];
          if (std::abs(t) <= kKinkDetectTol) {
            lo[i] = -1.0;
            hi[i] = 1.0;
          } else {
            sm[i] = t > 0 ? 1.0 : -1.0;
          }
        }
        return SubgradientSet(std::move(sm), std::move(lo), std::move(hi));
      };
      kinks.resize(dim);
      for (std::size_t i = 0; i < dim; ++i) kinks[i] = {sh[i]};
      break;
    }
    case Kind::exp: {
      desc = "exp";
      eval = [](const Vector& x) { return std::exp(x[0]); };
      subdiff = [](const Vector& x) {
        return SubgradientSet::singleton({std::exp(x[0])});
      };
      break;
    }
  }

  // the affine atom serves as a positive denominator/inner function, so it
  // defaults to the open half-line where a t + b > 0 and is validated there
  DomainSpec dom = [&]() -> DomainSpec {
    if (spec.domain) return *spec.domain;
    if (spec.kind == Kind::affine) {
      if (spec.a > 0.0) {
        double t0 = -spec.b / spec.a;
        return DomainSpec::half_line(t0, true,
                                     Box({t0 + 0.05}, {t0 + 10.0}));
      }
      if (spec.a == 0.0 && spec.b > 0.0)
        return DomainSpec::all_space(1, Box::cube(1, -5, 5));
      throw InvalidSpec(
          "make_convex_atom: affine atom with a <= 0 needs an explicit domain "
          "on which it is positive");
    }
    return DomainSpec::all_space(dim, Box::cube(dim, -5, 5));
  }();
  if (dom.dim() != dim) throw DimMismatch("make_convex_atom: domain dimension");

  if (spec.kind == Kind::affine) {
    for (const auto& p : detail::construction_probes(dom))
      if (!(spec.a * p[0] + spec.b > 0.0))
        throw SignViolation("make_convex_atom: affine atom sampled nonpositive at " +
                            to_string(p));
  }

  FunctionObject::Init init;
  init.descriptor = std::move(desc);
  init.eval = std::move(eval);
  init.subdiff = std::move(subdiff);
  init.domain = dom;
  init.kernel = detail::const_alpha_kernel(dom);
  init.provenance = Provenance::convex_atom;
  init.kink_loci = std::move(kinks);
  init.convex_certified = true;
  init.concave_certified = concave;
  init.invex_certified = true;
  return FunctionObject(std::move(init));
}

// Linear functional c.x + d on R^n: convex and concave, kernel y - x.
inline FunctionObject make_affine_functional(Vector c, double d,
                                             DomainSpec dom) {
  if (c.size() != dom.dim())
    throw DimMismatch("make_affine_functional: coefficient dimension");
  std::string desc = "linear(";
  for (std::size_t i = 0; i < c.size(); ++i)
    desc += (i ? "," : "") + format_double(c[i]);
  desc += ";" + format_double(d) + ")";
  FunctionObject::Init init;
  init.descriptor = std::move(desc);
  init.eval = [c, d](const Vector& x) { return dot(c, x) + d; };
  init.subdiff = [c](const Vector&) { return SubgradientSet::singleton(c); };
  init.domain = dom;
  init.kernel = detail::const_alpha_kernel(dom);
  init.provenance = Provenance::convex_atom;
  init.convex_certified = true;
  init.concave_certified = true;
  init.invex_certified = true;
  return FunctionObject(std::move(init));
}

// User-supplied function with no certificate; audits below can certify it.
struct RawFunctionSpec {
  std::string descriptor;
  EvalFn eval;
  SubdiffFn subdiff;
  DomainSpec domain = DomainSpec::all_space(1, Box(Vector{-1.0}, Vector{1.0}));
  std::vector<std::vector<double>> kink_loci;
  bool convex_certified = false;
  bool concave_certified = false;
};

inline FunctionObject make_function(RawFunctionSpec spec) {
  FunctionObject::Init init;
  init.descriptor = std::move(spec.descriptor);
  init.eval = std::move(spec.eval);
  init.subdiff = std::move(spec.subdiff);
  init.domain = std::move(spec.domain);
  init.provenance = Provenance::raw;
  init.kink_loci = std::move(spec.kink_loci);
  init.convex_certified = spec.convex_certified;
  init.concave_certified = spec.concave_certified;
  return FunctionObject(std::move(init));
}

// ---------------------------------------------------------------------------
// compose_transform: f(x) = g(Phi(x)) for convex-certified g and an
// invertible differentiable map Phi with supplied Jacobian and inverse
// Jacobian.  Kernel: eta(x,y) = JacInv(x) (Phi(y) - Phi(x)).

// Construction checks JacInv(x) Jac(x) == I within this tolerance at probe
// points.
inline constexpr double kJacobianIdentityTol = 1e-10;

inline FunctionObject compose_transform(
    const FunctionObject& g, RuleId phi_id, MapFn phi, MatrixFn jac,
    MatrixFn jac_inv, DomainSpec domain,
    std::optional<std::function<double(double)>> phi_coord_inverse =
        std::nullopt) {
  if (!g.convex_certified())
    throw UncertifiedFunction("compose_transform: inner function " +
                              g.descriptor() + " lacks a convexity certificate");
  const std::size_t n = domain.dim();
  if (g.dim() != n)
    throw DimMismatch("compose_transform: map/inner dimension mismatch");

  bool g_nonsmooth = false;
  for (const auto& loci : g.kink_loci())
    if (!loci.empty()) g_nonsmooth = true;

  // probe the inverse-Jacobian identity, and diagonality when g is nonsmooth
  for (const auto& p : detail::construction_probes(domain, 64)) {
    Matrix J = jac(p), Ji = jac_inv(p);
    if (J.rows != n || J.cols != n || Ji.rows != n || Ji.cols != n)
      throw DimMismatch("compose_transform: Jacobian must be n-by-n");
    Matrix prod = Ji.multiply(J);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double want = i == j ? 1.0 : 0.0;
        if (std::abs(prod(i, j) - want) > kJacobianIdentityTol)
          throw SingularJacobian(
              "compose_transform: JacInv*Jac deviates from identity by " +
              format_double(std::abs(prod(i, j) - want)) + " at " +
              to_string(p));
      }
    if (g_nonsmooth && !J.is_diagonal())
      throw RepresentationError(
          "compose_transform: nonsmooth inner function requires a diagonal "
          "Jacobian to keep the smooth+box subgradient form");
  }

  std::string desc = "compose(" + g.descriptor() + "," + phi_id.name + ")";
  EvalFn g_eval = g.eval_fn();
  SubdiffFn g_sub = g.subdiff_fn();
  EvalFn eval = [g_eval, phi](const Vector& x) { return g_eval(phi(x)); };
  // chain rule: d(g o Phi)(x) = Jac(x)^T dg(Phi(x)); with a diagonal Jacobian
  // the box part scales per coordinate, otherwise the box is degenerate
  SubdiffFn subdiff = [g_sub, phi, jac, n](const Vector& x) {
    SubgradientSet s = g_sub(phi(x));
    Matrix J = jac(x);
    Vector sm = J.transpose().apply(s.smooth_part());
    if (s.is_singleton()) return SubgradientSet::singleton(std::move(sm));
    Vector lo(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) {
      double d = J(i, i);
      lo[i] = d >= 0 ? d * s.box_lo()[i] : d * s.box_hi()[i];
      hi[i] = d >= 0 ? d * s.box_hi()[i] : d * s.box_lo()[i];
    }
    return SubgradientSet(std::move(sm), std::move(lo), std::move(hi));
  };

  // map inner kink loci back through the (coordinatewise) inverse when given
  std::vector<std::vector<double>> kinks(n);
  if (phi_coord_inverse) {
    for (std::size_t i = 0; i < n; ++i)
      for (double t : g.kink_loci()[i]) {
        double xi = (*phi_coord_inverse)(t);
        if (std::isfinite(xi)) kinks[i].push_back(xi);
      }
  }

  KernelFn kernel = KernelFn::jacobian_transform(
                        RuleId{"jac:" + phi_id.name, phi_id.params}, phi,
                        jac_inv)
                        .with_domain(detail::shared_domain(domain));

  FunctionObject::Init init;
  init.descriptor = std::move(desc);
  init.eval = std::move(eval);
  init.subdiff = std::move(subdiff);
  init.domain = std::move(domain);
  init.kernel = std::move(kernel);
  init.provenance = Provenance::transform_composite;
  init.kink_loci = std::move(kinks);
  init.invex_certified = true;
  return FunctionObject(std::move(init));
}

// ---------------------------------------------------------------------------
// fractional: f = g / h with g convex-certified and sampled >= 0, h
// concave-certified and sampled > 0.  Kernel: alpha(x,y) = h(x)/h(y).

inline FunctionObject fractional(const FunctionObject& g,
                                 const FunctionObject& h,
                                 std::optional<DomainSpec> domain_opt =
                                     std::nullopt) {
  if (!g.convex_certified())
    throw UncertifiedFunction("fractional: numerator " + g.descriptor() +
                              " lacks a convexity certificate");
  if (!h.concave_certified())
    throw UncertifiedFunction("fractional: denominator " + h.descriptor() +
                              " lacks a concavity certificate");
  if (g.dim() != h.dim()) throw DimMismatch("fractional: dimension mismatch");
  DomainSpec domain = domain_opt ? *domain_opt : h.domain();
  if (domain.dim() != g.dim())
    throw DimMismatch("fractional: domain dimension mismatch");

  EvalFn ge = g.eval_fn(), he = h.eval_fn();
  for (const auto& p : detail::construction_probes(domain)) {
    if (ge(p) < 0.0)
      throw SignViolation("fractional: numerator sampled negative at " +
                          to_string(p));
    if (!(he(p) > 0.0))
      throw SignViolation("fractional: denominator sampled nonpositive at " +
                          to_string(p));
  }

  std::string desc = "frac(" + g.descriptor() + "," + h.descriptor() + ")";
  EvalFn eval = [ge, he](const Vector& x) { return ge(x) / he(x); };
  // quotient rule: d(g/h) subset (dg - f dh) / h, box arithmetic throughout
  SubdiffFn g_sub = g.subdiff_fn(), h_sub = h.subdiff_fn();
  SubdiffFn subdiff = [ge, he, g_sub, h_sub](const Vector& x) {
    double hx = he(x);
    double fx = ge(x) / hx;
    SubgradientSet num = g_sub(x).minkowski_add(h_sub(x).scale(-fx));
    return num.scale(1.0 / hx);
  };

  std::vector<std::vector<double>> kinks(domain.dim());
  for (std::size_t i = 0; i < domain.dim(); ++i) {
    kinks[i] = g.kink_loci()[i];
    kinks[i].insert(kinks[i].end(), h.kink_loci()[i].begin(),
                    h.kink_loci()[i].end());
  }

  KernelFn kernel =
      KernelFn::scaled_difference(
          RuleId{"alpha_ratio:" + h.descriptor(), {}},
          [he](const Vector& x, const Vector& y) { return he(x) / he(y); })
          .with_domain(detail::shared_domain(domain));

  FunctionObject::Init init;
  init.descriptor = std::move(desc);
  init.eval = std::move(eval);
  init.subdiff = std::move(subdiff);
  init.domain = std::move(domain);
  init.kernel = std::move(kernel);
  init.provenance = Provenance::fractional_quotient;
  init.kink_loci = std::move(kinks);
  init.invex_certified = true;
  return FunctionObject(std::move(init));
}

// ---------------------------------------------------------------------------
// Increasing concave scalar maps and their composites f = phi(g(x)).
// Kernel: alpha(x,y) = phi'(g(y)) / phi'(g(x)) > 0.

struct ScalarConcaveSpec {
  std::string id;  // structural identity, e.g. "log", "pow", "shift_ratio"
  std::function<double(double)> phi;
  std::function<double(double)> phi_prime;
  double lo, hi;  // open interval on which phi is defined

  // Monotonicity (phi' > 0) and midpoint concavity are checked on a
  // 1e4-point grid over a finite window of (lo, hi) at construction.
  ScalarConcaveSpec(std::string id_, std::function<double(double)> phi_,
                    std::function<double(double)> phi_prime_, double lo_,
                    double hi_)
      : id(std::move(id_)),
        phi(std::move(phi_)),
        phi_prime(std::move(phi_prime_)),
        lo(lo_),
        hi(hi_) {
    if (!(lo < hi)) throw InvalidSpec("ScalarConcaveSpec: empty interval");
    double a = std::isfinite(lo) ? lo + 1e-6 : -1e3;
    double b = std::isfinite(hi) ? hi - 1e-6 : 1e3;
    if (std::isfinite(lo) && !std::isfinite(hi)) b = a + 1e3;
    if (!std::isfinite(lo) && std::isfinite(hi)) a = b - 1e3;
    const int n = 10000;
    double prev_t = a, prev_v = phi(a);
    for (int k = 0; k <= n; ++k) {
      double t = a + (b - a) * k / n;
      if (!(phi_prime(t) > 0.0))
        throw InvalidSpec("ScalarConcaveSpec " + id +
                          ": derivative not positive at t=" + format_double(t));
      double v = phi(t);
      if (k > 0) {
        double mid = phi(0.5 * (prev_t + t));
        if (mid < 0.5 * (prev_v + v) - 1e-12)
          throw InvalidSpec("ScalarConcaveSpec " + id +
                            ": midpoint concavity fails near t=" +
                            format_double(t));
      }
      prev_t = t;
      prev_v = v;
    }
  }
};

namespace detail {

inline FunctionObject concave_composite_impl(
    const ScalarConcaveSpec& phi, const FunctionObject& g,
    std::optional<DomainSpec> domain_opt, std::string desc, KernelFn kernel,
    double range_lo, double range_hi) {
  if (!g.convex_certified())
    throw UncertifiedFunction("concave composite: inner function " +
                              g.descriptor() +
                              " lacks a convexity certificate");
  DomainSpec domain = domain_opt ? *domain_opt : g.domain();
  if (domain.dim() != g.dim())
    throw DimMismatch("concave composite: domain dimension mismatch");

  EvalFn ge = g.eval_fn();
  for (const auto& p : construction_probes(domain)) {
    double v = ge(p);
    if (!(v > range_lo) || !(v < range_hi))
      throw RangeError("concave composite " + phi.id +
                       ": inner value " + format_double(v) + " at " +
                       to_string(p) + " leaves (" + format_double(range_lo) +
                       ", " + format_double(range_hi) + ")");
  }

  auto ph = phi.phi;
  auto phd = phi.phi_prime;
  EvalFn eval = [ge, ph](const Vector& x) { return ph(ge(x)); };
  SubdiffFn g_sub = g.subdiff_fn();
  SubdiffFn subdiff = [ge, phd, g_sub](const Vector& x) {
    return g_sub(x).scale(phd(ge(x)));  // phd > 0: box orientation kept
  };

  FunctionObject::Init init;
  init.descriptor = std::move(desc);
  init.eval = std::move(eval);
  init.subdiff = std::move(subdiff);
  init.domain = domain;
  init.kernel = kernel.with_domain(shared_domain(domain));
  init.provenance = Provenance::concave_composite;
  init.kink_loci = g.kink_loci();
  init.invex_certified = true;
  return FunctionObject(std::move(init));
}

}  // namespace detail

inline FunctionObject concave_composite(const ScalarConcaveSpec& phi,
                                        const FunctionObject& g,
                                        std::optional<DomainSpec> domain =
                                            std::nullopt) {
  EvalFn ge = g.eval_fn();
  auto phd = phi.phi_prime;
  KernelFn kernel = KernelFn::scaled_difference(
      RuleId{"alpha_phi_ratio:" + phi.id + ":" + g.descriptor(), {}},
      [ge, phd](const Vector& x, const Vector& y) {
        return phd(ge(y)) / phd(ge(x));
      });
  return detail::concave_composite_impl(phi, g, std::move(domain),
                                        "phi(" + phi.id + "," + g.descriptor() + ")",
                                        std::move(kernel), phi.lo, phi.hi);
}

// f = log(g): alpha(x,y) = g(x)/g(y).  Shares rule identity with the
// fractional kernel for the same inner function, so sums of a fractional
// f = p/g and log(g) combine under weighted_sum.
inline FunctionObject log_compose(const FunctionObject& g,
                                  std::optional<DomainSpec> domain =
                                      std::nullopt) {
  static const ScalarConcaveSpec phi(
      "log", [](double t) { return std::log(t); },
      [](double t) { return 1.0 / t; }, 0.0,
      std::numeric_limits<double>::infinity());
  EvalFn ge = g.eval_fn();
  KernelFn kernel = KernelFn::scaled_difference(
      RuleId{"alpha_ratio:" + g.descriptor(), {}},
      [ge](const Vector& x, const Vector& y) { return ge(x) / ge(y); });
  return detail::concave_composite_impl(phi, g, std::move(domain),
                                        "log(" + g.descriptor() + ")",
                                        std::move(kernel), 0.0,
                                        std::numeric_limits<double>::infinity());
}

// f = g^p for p in (0,1): alpha(x,y) = (g(y)/g(x))^(p-1).
inline FunctionObject power_compose(const FunctionObject& g, double p,
                                    std::optional<DomainSpec> domain =
                                        std::nullopt) {
  if (!(p > 0.0 && p < 1.0))
    throw ParamError("power_compose: exponent p=" + format_double(p) +
                     " outside (0,1)");
  ScalarConcaveSpec phi(
      "pow", [p](double t) { return std::pow(t, p); },
      [p](double t) { return p * std::pow(t, p - 1.0); }, 0.0,
      std::numeric_limits<double>::infinity());
  EvalFn ge = g.eval_fn();
  KernelFn kernel = KernelFn::scaled_difference(
      RuleId{"alpha_power_ratio:" + g.descriptor(), {p}},
      [ge, p](const Vector& x, const Vector& y) {
        return std::pow(ge(y) / ge(x), p - 1.0);
      });
  return detail::concave_composite_impl(
      phi, g, std::move(domain),
      "pow(" + g.descriptor() + "," + format_double(p) + ")",
      std::move(kernel), 0.0, std::numeric_limits<double>::infinity());
}

// f = g/(g+c) for c > 0: alpha(x,y) = ((g(x)+c)/(g(y)+c))^2.  The scalar map
// t -> t/(t+c) is increasing and concave on (-c, inf), so g is only required
// to stay above -c; the catalog uses it with g >= 0.
inline FunctionObject ratio_compose(const FunctionObject& g, double c,
                                    std::optional<DomainSpec> domain =
                                        std::nullopt) {
  if (!(c > 0.0))
    throw ParamError("ratio_compose: offset c=" + format_double(c) +
                     " must be positive");
  ScalarConcaveSpec phi(
      "shift_ratio", [c](double t) { return t / (t + c); },
      [c](double t) { return c / ((t + c) * (t + c)); }, -c,
      std::numeric_limits<double>::infinity());
  EvalFn ge = g.eval_fn();
  KernelFn kernel = KernelFn::scaled_difference(
      RuleId{"alpha_shifted_ratio_sq:" + g.descriptor(), {c}},
      [ge, c](const Vector& x, const Vector& y) {
        double r = (ge(x) + c) / (ge(y) + c);
        return r * r;
      });
  return detail::concave_composite_impl(
      phi, g, std::move(domain),
      "ratio(" + g.descriptor() + "," + format_double(c) + ")",
      std::move(kernel), -c, std::numeric_limits<double>::infinity());
}

// ---------------------------------------------------------------------------
// separable_sum: f(x) = sum_i f_i(x_i) with one-dimensional certified parts;
// the kernel acts componentwise.

inline FunctionObject separable_sum(const std::vector<FunctionObject>& parts,
                                    std::optional<DomainSpec> domain_opt =
                                        std::nullopt) {
  if (parts.empty()) throw InvalidSpec("separable_sum: no parts");
  std::vector<KernelFn> part_kernels;
  for (const auto& p : parts) {
    if (p.dim() != 1)
      throw DimMismatch("separable_sum: part " + p.descriptor() +
                        " is not one-dimensional");
    if (!p.kernel())
      throw MissingKernel("separable_sum: part " + p.descriptor() +
                          " has no kernel");
    if (!p.invex_certified())
      throw UncertifiedFunction("separable_sum: part " + p.descriptor() +
                                " is not certified");
    part_kernels.push_back(*p.kernel());
  }
  const std::size_t n = parts.size();

  DomainSpec domain = [&]() -> DomainSpec {
    if (domain_opt) return *domain_opt;
    Vector lo(n), hi(n);
    bool all_space = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (parts[i].domain().kind() != DomainSpec::Kind::all_space)
        all_space = false;
      lo[i] = parts[i].domain().sample_region().lo[0];
      hi[i] = parts[i].domain().sample_region().hi[0];
    }
    if (!all_space)
      throw InvalidSpec(
          "separable_sum: pass an explicit domain unless every part lives on "
          "the whole line");
    return DomainSpec::all_space(n, Box(std::move(lo), std::move(hi)));
  }();
  if (domain.dim() != n)
    throw DimMismatch("separable_sum: domain dimension mismatch");

  std::string desc = "sum(";
  for (std::size_t i = 0; i < n; ++i)
    desc += (i ? "," : "") + parts[i].descriptor();
  desc += ")";

  std::vector<EvalFn> evals;
  std::vector<SubdiffFn> subs;
  for (const auto& p : parts) {
    evals.push_back(p.eval_fn());
    subs.push_back(p.subdiff_fn());
  }
  EvalFn eval = [evals](const Vector& x) {
    double s = 0;
    for (std::size_t i = 0; i < evals.size(); ++i) s += evals[i]({x[i]});
    return s;
  };
  SubdiffFn subdiff = [subs](const Vector& x) {
    std::size_t n = subs.size();
    Vector sm(n), lo(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) {
      SubgradientSet si = subs[i]({x[i]});
      sm[i] = si.smooth_part()[0];
      lo[i] = si.box_lo()[0];
      hi[i] = si.box_hi()[0];
    }
    return SubgradientSet(std::move(sm), std::move(lo), std::move(hi));
  };

  std::vector<std::vector<double>> kinks(n);
  bool all_convex = true;
  for (std::size_t i = 0; i < n; ++i) {
    kinks[i] = parts[i].kink_loci()[0];
    all_convex = all_convex && parts[i].convex_certified();
  }

  FunctionObject::Init init;
  init.descriptor = std::move(desc);
  init.eval = std::move(eval);
  init.subdiff = std::move(subdiff);
  init.domain = domain;
  init.kernel = KernelFn::componentwise(std::move(part_kernels))
                    .with_domain(detail::shared_domain(domain));
  init.provenance = Provenance::separable_sum;
  init.kink_loci = std::move(kinks);
  init.convex_certified = all_convex;
  init.invex_certified = true;
  return FunctionObject(std::move(init));
}

// ---------------------------------------------------------------------------
// weighted_sum: alpha f + beta g for alpha, beta >= 0; requires structurally
// equal kernels, which the sum inherits.

inline FunctionObject weighted_sum(const FunctionObject& f,
                                   const FunctionObject& g, double alpha,
                                   double beta) {
  if (!(alpha >= 0.0) || !(beta >= 0.0))
    throw ParamError("weighted_sum: weights must be nonnegative");
  if (f.dim() != g.dim()) throw DimMismatch("weighted_sum: dimension mismatch");
  if (!f.kernel())
    throw MissingKernel("weighted_sum: " + f.descriptor() + " has no kernel");
  if (!g.kernel())
    throw MissingKernel("weighted_sum: " + g.descriptor() + " has no kernel");
  if (!f.kernel()->structurally_equal(*g.kernel()))
    throw KernelMismatch("weighted_sum: kernels of " + f.descriptor() +
                         " and " + g.descriptor() +
                         " are not structurally equal (" +
                         f.kernel()->id().to_string() + " vs " +
                         g.kernel()->id().to_string() + ")");
  if (alpha == 1.0 && beta == 0.0) return f;
  if (alpha == 0.0 && beta == 1.0) return g;

  // the sum lives on f's domain; g must cover f's sampling box
  const Box& sr = f.domain().sample_region();
  if (!g.domain().contains(sr.lo) || !g.domain().contains(sr.hi))
    throw DomainError("weighted_sum: " + g.descriptor() +
                      " does not cover the sampling region of " +
                      f.descriptor());

  std::string desc = "wsum(" + format_double(alpha) + "*" + f.descriptor() +
                     "+" + format_double(beta) + "*" + g.descriptor() + ")";
  EvalFn fe = f.eval_fn(), ge = g.eval_fn();
  SubdiffFn fs = f.subdiff_fn(), gs = g.subdiff_fn();
  EvalFn eval = [fe, ge, alpha, beta](const Vector& x) {
    return alpha * fe(x) + beta * ge(x);
  };
  SubdiffFn subdiff = [fs, gs, alpha, beta](const Vector& x) {
    return fs(x).scale(alpha).minkowski_add(gs(x).scale(beta));
  };

  std::vector<std::vector<double>> kinks(f.dim());
  for (std::size_t i = 0; i < f.dim(); ++i) {
    kinks[i] = f.kink_loci()[i];
    kinks[i].insert(kinks[i].end(), g.kink_loci()[i].begin(),
                    g.kink_loci()[i].end());
  }

  FunctionObject::Init init;
  init.descriptor = std::move(desc);
  init.eval = std::move(eval);
  init.subdiff = std::move(subdiff);
  init.domain = f.domain();
  init.kernel = *f.kernel();
  init.provenance = Provenance::weighted_sum;
  init.kink_loci = std::move(kinks);
  init.convex_certified = f.convex_certified() && g.convex_certified();
  init.invex_certified = f.invex_certified() && g.invex_certified();
  return FunctionObject(std::move(init));
}

// ---------------------------------------------------------------------------
// Canonical kernels, defined for any certified invex function:
//   smooth:     eta(x,y) = (f(y)-f(x)) grad f(x) / ||grad f(x)||^2
//   nonsmooth:  eta(x,y) = -|f(y)-f(x)| xi_x / ||xi_x||^2,
// with xi_x the minimum-norm subgradient; eta = 0 at stationary points
// (||xi_x|| <= 1e-10).

inline KernelFn canonical_kernel(const FunctionObject& f,
                                 KernelFn::CanonicalVariant variant) {
  if (!f.invex_certified())
    throw UncertifiedFunction("canonical_kernel: " + f.descriptor() +
                              " carries no invexity certificate");
  return KernelFn::canonical(f.uid(), variant, f.eval_fn(), f.subdiff_fn())
      .with_domain(detail::shared_domain(f.domain()));
}

// ---------------------------------------------------------------------------
// Grid stationarity audits.  Both walk a uniform lattice with about
// grid_density points spread evenly across the region's axes and demand a
// minimum-norm subgradient of norm >= floor at every lattice point (outside
// the exclusion ball, when a known minimum is given).

namespace detail {

struct GridWalker {
  Box region;
  std::vector<long> per_axis;
  long total = 1;

  GridWalker(const Box& r, long density) : region(r) {
    std::size_t d = r.dim();
    long m = std::max<long>(2, (long)std::ceil(std::pow(double(density), 1.0 / double(d))));
    per_axis.assign(d, m);
    for (std::size_t i = 0; i < d; ++i) total *= m;
  }

  Vector point(long idx) const {
    Vector p(region.dim());
    for (std::size_t i = 0; i < region.dim(); ++i) {
      long m = per_axis[i];
      long j = idx % m;
      idx /= m;
      p[i] = region.lo[i] + (region.hi[i] - region.lo[i]) * double(j) / double(m - 1);
    }
    return p;
  }
};

}  // namespace detail

// Certify f invex on `region` by checking that the only near-stationary
// behaviour happens inside a small ball around known_min, and that known_min
// attains the least sampled value.  On success the returned copy of f carries
// the nonsmooth canonical kernel.
inline FunctionObject declare_invex_by_stationarity_audit(
    const FunctionObject& f, const Vector& known_min, const Box& region,
    long grid_density, double audit_floor = 1e-6,
    double exclusion_radius = 1e-3) {
  require_dim(known_min, f.dim(), "declare_invex_by_stationarity_audit");
  if (region.dim() != f.dim())
    throw DimMismatch("stationarity audit: region dimension mismatch");
  if (!f.domain().contains(known_min))
    throw DomainError("stationarity audit: known_min outside domain");
  if (!region.contains(known_min))
    throw InvalidSpec("stationarity audit: known_min outside region");
  if (!(audit_floor > 0.0) || !(exclusion_radius > 0.0))
    throw ParamError("stationarity audit: floor and radius must be positive");

  detail::GridWalker grid(region, grid_density);
  const double f_min = f.value(known_min);
  for (long idx = 0; idx < grid.total; ++idx) {
    Vector p = grid.point(idx);
    if (!f.domain().contains(p))
      throw DomainError("stationarity audit: grid point " + to_string(p) +
                        " outside domain");
    if (f.value(p) < f_min)
      throw AuditFailed("stationarity audit: f(" + to_string(p) + ") = " +
                            format_double(f.value(p)) +
                            " undercuts the declared minimum value " +
                            format_double(f_min),
                        p);
    if (norm2(sub(p, known_min)) <= exclusion_radius) continue;
    double r = norm2(min_norm_subgradient(f.subgradient(p)));
    if (r < audit_floor)
      throw AuditFailed(
          "stationarity audit: subgradient norm " + format_double(r) +
              " below floor at " + to_string(p),
          p);
  }

  AuditCertificate cert{region, grid.total, audit_floor, exclusion_radius,
                        known_min};
  FunctionObject base = f;
  // certify first, then derive the kernel from the certified object so the
  // kernel's owner id matches
  FunctionObject out = base.certified(
      Provenance::stationarity_audit,
      KernelFn::canonical(base.uid(), KernelFn::CanonicalVariant::nonsmooth,
                          base.eval_fn(), base.subdiff_fn())
          .with_domain(detail::shared_domain(base.domain())),
      cert);
  return out;
}

// Certify f invex on `region` by checking it has no stationary point there at
// all (subgradient norm >= floor everywhere).  Vacuously, every stationary
// point is then a global minimum.
inline FunctionObject declare_invex_by_no_stationary_audit(
    const FunctionObject& f, const Box& region, long grid_density,
    double audit_floor = 1e-6) {
  if (region.dim() != f.dim())
    throw DimMismatch("no-stationary audit: region dimension mismatch");
  if (!(audit_floor > 0.0))
    throw ParamError("no-stationary audit: floor must be positive");

  detail::GridWalker grid(region, grid_density);
  for (long idx = 0; idx < grid.total; ++idx) {
    Vector p = grid.point(idx);
    if (!f.domain().contains(p))
      throw DomainError("no-stationary audit: grid point " + to_string(p) +
                        " outside domain");
    double r = norm2(min_norm_subgradient(f.subgradient(p)));
    if (r < audit_floor)
      throw AuditFailed("no-stationary audit: subgradient norm " +
                            format_double(r) + " below floor at " +
                            to_string(p),
                        p);
  }

  AuditCertificate cert{region, grid.total, audit_floor, 0.0, std::nullopt};
  FunctionObject base = f;
  return base.certified(
      Provenance::no_stationary_audit,
      KernelFn::canonical(base.uid(), KernelFn::CanonicalVariant::nonsmooth,
                          base.eval_fn(), base.subdiff_fn())
          .with_domain(detail::shared_domain(base.domain())),
      cert);
}

}  // namespace invexkit
