// Numerical verification of generalized-convexity properties: invexity
// against a kernel, stationary-point globality, pseudo/quasi-convexity,
// quasar-convexity, Polyak-Lojasiewicz bounds, and the kernels those last two
// properties induce.
//
// All checks draw deterministic samples (seeded mt19937_64) and return a
// CheckReport; identical seeds give bit-identical reports.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "invexkit/algebra.hpp"
#include "invexkit/core.hpp"

namespace invexkit {

// Default tolerances, pinned once:
//  - sampled function inequalities carry 1e-9 of slack,
//  - stationarity is declared at subgradient norm <= 1e-8,
//  - smoothness-only checks skip points within 1e-9 of a kink locus.
inline constexpr double kInequalityTol = 1e-9;
inline constexpr double kStationaryTol = 1e-8;
inline constexpr double kKinkSkipTol = 1e-9;

struct SamplerConfig {
  std::optional<Box> region;  // defaults to the function's sampling region
  long pair_count = 100000;
  double kink_probability = 0.1;  // per coordinate, per sample
  std::uint64_t seed = 42;
};

namespace detail {

inline Box resolve_region(const FunctionObject& f, const SamplerConfig& cfg) {
  Box region = cfg.region ? *cfg.region : f.domain().sample_region();
  if (region.dim() != f.dim())
    throw DimMismatch("sampler: region dimension mismatch");
  if (!f.domain().contains(region.lo) || !f.domain().contains(region.hi))
    throw DomainError("sampler: region corners leave the domain of " +
                      f.descriptor());
  return region;
}

// Uniform sampler over a box that pins coordinates to declared kink loci
// with the configured probability, so interval-form subdifferentials are
// actually exercised.
class PointSampler {
 public:
  PointSampler(Box region, const std::vector<std::vector<double>>& loci,
               double kink_probability, std::uint64_t seed)
      : region_(std::move(region)),
        kink_prob_(kink_probability),
        rng_(seed),
        loci_(region_.dim()) {
    for (std::size_t i = 0; i < region_.dim() && i < loci.size(); ++i)
      for (double t : loci[i])
        if (t >= region_.lo[i] && t <= region_.hi[i]) loci_[i].push_back(t);
  }

  Vector next() {
    Vector x(region_.dim());
    for (std::size_t i = 0; i < region_.dim(); ++i) {
      if (!loci_[i].empty() && rng_.bernoulli(kink_prob_))
        x[i] = loci_[i][loci_[i].size() == 1 ? 0 : rng_.index(loci_[i].size())];
      else
        x[i] = rng_.uniform(region_.lo[i], region_.hi[i]);
    }
    return x;
  }

 private:
  Box region_;
  double kink_prob_;
  Rng rng_;
  std::vector<std::vector<double>> loci_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// check_invexity: f(y) - f(x) >= <xi, eta(x,y)> for every extreme
// subgradient xi at x, over sampled pairs.

inline CheckReport check_invexity(const FunctionObject& f,
                                  const SamplerConfig& cfg = {},
                                  double tol = kInequalityTol) {
  if (!f.kernel())
    throw MissingKernel("check_invexity: " + f.descriptor() + " has no kernel");
  Box region = detail::resolve_region(f, cfg);
  detail::PointSampler sampler(region, f.kink_loci(), cfg.kink_probability,
                               cfg.seed);
  const KernelFn& k = *f.kernel();

  double worst = -std::numeric_limits<double>::infinity();
  std::optional<Witness> witness;
  long work = 0;
  for (long n = 0; n < cfg.pair_count; ++n) {
    Vector x = sampler.next(), y = sampler.next();
    double gap = f.value(y) - f.value(x);
    Vector eta = kernel_eval(k, x, y);
    for (const Vector& xi : subgradient_extreme_points(f.subgradient(x))) {
      double v = dot(xi, eta) - gap;
      ++work;
      if (v > worst) {
        worst = v;
        witness = Witness{x, y, xi};
      }
    }
  }
  return detail::finish_report("invexity", tol, cfg.seed, cfg.pair_count, work,
                               worst, std::move(witness));
}

// ---------------------------------------------------------------------------
// check_stationary_global: every stationary point found (0 within 1e-8 of the
// subdifferential) must attain the least sampled value up to 1e-9.
//
// Stationary points are located two ways: directly among the kink-aware
// samples, and by deterministic pattern searches that minimize the residual
// r(x) = ||argmin-norm subgradient||.  Residual minimization (rather than
// descent on f) also finds interior maximizers and saddles, which is the
// point of the check.

namespace detail {

inline double stationarity_residual(const FunctionObject& f, const Vector& x) {
  return norm2(min_norm_subgradient(f.subgradient(x)));
}

// coordinate pattern search for small residual; deterministic
inline Vector hunt_stationary(const FunctionObject& f, const Box& region,
                              Vector x, long* work) {
  double r = region.max_extent() / 8.0;
  double best = stationarity_residual(f, x);
  int iter = 0;
  while (r >= 1e-13 && iter < 600) {
    ++iter;
    bool improved = false;
    for (std::size_t i = 0; i < x.size() && !improved; ++i) {
      std::vector<double> cands = {x[i] - r, x[i] + r};
      for (double locus : f.kink_loci()[i])
        if (std::abs(locus - x[i]) <= r) cands.push_back(locus);
      for (double c : cands) {
        double ci = std::min(std::max(c, region.lo[i]), region.hi[i]);
        Vector probe = x;
        probe[i] = ci;
        double v = stationarity_residual(f, probe);
        ++*work;
        if (v < best) {
          best = v;
          x = std::move(probe);
          improved = true;
          break;
        }
      }
    }
    if (!improved) r *= 0.5;
  }
  return x;
}

}  // namespace detail

inline CheckReport check_stationary_global(const FunctionObject& f,
                                           const SamplerConfig& cfg = {},
                                           double tol = kInequalityTol) {
  Box region = detail::resolve_region(f, cfg);
  detail::PointSampler sampler(region, f.kink_loci(), cfg.kink_probability,
                               cfg.seed);
  long work = 0;

  std::vector<Vector> points(cfg.pair_count);
  std::vector<double> values(cfg.pair_count);
  std::vector<Vector> stationary;
  auto note_stationary = [&](const Vector& s) {
    for (const Vector& t : stationary)
      if (norm2(sub(s, t)) <= 1e-12) return;
    stationary.push_back(s);
  };

  for (long n = 0; n < cfg.pair_count; ++n) {
    points[n] = sampler.next();
    values[n] = f.value(points[n]);
    ++work;
    if (detail::stationarity_residual(f, points[n]) <= kStationaryTol)
      note_stationary(points[n]);
  }
  const long hunts = std::min<long>(50, cfg.pair_count);
  for (long h = 0; h < hunts; ++h) {
    Vector s = detail::hunt_stationary(f, region, points[h], &work);
    if (detail::stationarity_residual(f, s) <= kStationaryTol)
      note_stationary(s);
  }

  double worst = -std::numeric_limits<double>::infinity();
  std::optional<Witness> witness;
  bool vacuous = stationary.empty();
  for (const Vector& s : stationary) {
    double fs = f.value(s);
    Vector xi = min_norm_subgradient(f.subgradient(s));
    for (long n = 0; n < cfg.pair_count; ++n) {
      double v = fs - values[n];
      ++work;
      if (v > worst) {
        worst = v;
        witness = Witness{s, points[n], xi};
      }
    }
  }
  if (vacuous) worst = 0.0;
  return detail::finish_report(
      "stationary_global", tol, cfg.seed, cfg.pair_count, work, worst,
      std::move(witness), 0,
      vacuous ? "no stationary point found on the region"
              : std::to_string(stationary.size()) + " stationary point(s)");
}

// ---------------------------------------------------------------------------
// check_pseudoconvex_definitional: whenever some subgradient xi at x has
// <xi, y-x> >= 0, then f(x) <= f(y) (+tol).

inline CheckReport check_pseudoconvex_definitional(const FunctionObject& f,
                                                   const SamplerConfig& cfg = {},
                                                   double tol = kInequalityTol) {
  Box region = detail::resolve_region(f, cfg);
  detail::PointSampler sampler(region, f.kink_loci(), cfg.kink_probability,
                               cfg.seed);
  double worst = -std::numeric_limits<double>::infinity();
  std::optional<Witness> witness;
  long work = 0;
  bool compared = false;
  for (long n = 0; n < cfg.pair_count; ++n) {
    Vector a = sampler.next(), b = sampler.next();
    // the definition is direction-sensitive, so try both orientations
    for (int swap = 0; swap < 2; ++swap) {
      const Vector& x = swap ? b : a;
      const Vector& y = swap ? a : b;
      Vector d = sub(y, x);
      // exists xi with <xi, d> >= 0?
      const auto extremes = subgradient_extreme_points(f.subgradient(x));
      const Vector* best_xi = nullptr;
      double best_ip = -std::numeric_limits<double>::infinity();
      for (const Vector& xi : extremes) {
        double ip = dot(xi, d);
        ++work;
        if (ip > best_ip) {
          best_ip = ip;
          best_xi = &xi;
        }
      }
      if (best_ip < 0.0) continue;
      compared = true;
      double v = f.value(x) - f.value(y);
      ++work;
      if (v > worst) {
        worst = v;
        witness = Witness{x, y, *best_xi};
      }
    }
  }
  if (!compared) worst = 0.0;
  return detail::finish_report("pseudoconvex", tol, cfg.seed, cfg.pair_count,
                               work, worst, std::move(witness));
}

// ---------------------------------------------------------------------------
// check_pseudoconvex_structural: a scaled-difference kernel with
// alpha(x,y) >= 0 certifies pseudoconvexity structurally.  Componentwise
// kernels qualify only if their per-coordinate alphas agree on every sampled
// pair; any other form throws NotScaledDifference.

inline CheckReport check_pseudoconvex_structural(const KernelFn& k,
                                                 const SamplerConfig& cfg = {},
                                                 double tol = 1e-12) {
  Box region = [&]() -> Box {
    if (cfg.region) return *cfg.region;
    if (k.attached_domain()) return k.attached_domain()->sample_region();
    throw InvalidSpec(
        "check_pseudoconvex_structural: no region configured and the kernel "
        "has no attached domain");
  }();

  std::vector<const KernelFn*> parts;
  switch (k.form()) {
    case KernelFn::Form::scaled_difference:
      parts = {&k};
      break;
    case KernelFn::Form::componentwise:
      for (const KernelFn& p : k.components()) {
        if (p.form() != KernelFn::Form::scaled_difference)
          throw NotScaledDifference(
              "check_pseudoconvex_structural: componentwise kernel has a "
              "non-scaled-difference part (" + p.id().to_string() + ")");
        parts.push_back(&p);
      }
      if (parts.size() != region.dim())
        throw DimMismatch("check_pseudoconvex_structural: region dimension");
      break;
    default:
      throw NotScaledDifference(
          "check_pseudoconvex_structural: kernel form is not a scaled "
          "difference (" + k.id().to_string() + ")");
  }

  detail::PointSampler sampler(region, {}, 0.0, cfg.seed);
  double worst = -std::numeric_limits<double>::infinity();
  std::optional<Witness> witness;
  long work = 0;
  for (long n = 0; n < cfg.pair_count; ++n) {
    Vector x = sampler.next(), y = sampler.next();
    double a0 = 0.0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      double a = parts.size() == 1 ? parts[i]->alpha(x, y)
                                   : parts[i]->alpha({x[i]}, {y[i]});
      ++work;
      if (i == 0) {
        a0 = a;
      } else if (std::abs(a - a0) >
                 1e-12 * std::max(1.0, std::max(std::abs(a), std::abs(a0)))) {
        throw NotScaledDifference(
            "check_pseudoconvex_structural: componentwise alphas disagree (" +
            format_double(a0) + " vs " + format_double(a) + " at x=" +
            to_string(x) + ", y=" + to_string(y) + ")");
      }
      double v = -a;  // require alpha >= -tol
      if (v > worst) {
        worst = v;
        witness = Witness{x, y, {}};
      }
    }
  }
  return detail::finish_report("pseudoconvex_structural", tol, cfg.seed,
                               cfg.pair_count, work, worst,
                               std::move(witness));
}

// ---------------------------------------------------------------------------
// check_quasiconvex: f((1-t)x + t y) <= max(f(x), f(y)) on a 9-point segment
// grid.  Requires a convex domain (all supported domains are).

inline CheckReport check_quasiconvex(const FunctionObject& f,
                                     const SamplerConfig& cfg = {},
                                     double tol = kInequalityTol) {
  if (!f.domain().is_convex())
    throw InvalidSpec("check_quasiconvex: needs a convex domain");
  Box region = detail::resolve_region(f, cfg);
  detail::PointSampler sampler(region, f.kink_loci(), cfg.kink_probability,
                               cfg.seed);
  double worst = -std::numeric_limits<double>::infinity();
  std::optional<Witness> witness;
  long work = 0;
  for (long n = 0; n < cfg.pair_count; ++n) {
    Vector x = sampler.next(), y = sampler.next();
    double fmax = std::max(f.value(x), f.value(y));
    for (int j = 1; j <= 9; ++j) {
      double t = 0.1 * j;
      Vector mid = add(scaled(x, 1.0 - t), scaled(y, t));
      double v = f.value(mid) - fmax;
      ++work;
      if (v > worst) {
        worst = v;
        witness = Witness{x, y, {}};
      }
    }
  }
  return detail::finish_report("quasiconvex", tol, cfg.seed, cfg.pair_count,
                               work, worst, std::move(witness));
}

// Midpoint convexity probe, used to classify catalog entries.
inline CheckReport check_convex_midpoint(const FunctionObject& f,
                                         const SamplerConfig& cfg = {},
                                         double tol = kInequalityTol) {
  Box region = detail::resolve_region(f, cfg);
  detail::PointSampler sampler(region, f.kink_loci(), cfg.kink_probability,
                               cfg.seed);
  double worst = -std::numeric_limits<double>::infinity();
  std::optional<Witness> witness;
  long work = 0;
  for (long n = 0; n < cfg.pair_count; ++n) {
    Vector x = sampler.next(), y = sampler.next();
    Vector mid = scaled(add(x, y), 0.5);
    double v = f.value(mid) - 0.5 * (f.value(x) + f.value(y));
    ++work;
    if (v > worst) {
      worst = v;
      witness = Witness{x, y, {}};
    }
  }
  return detail::finish_report("convex", tol, cfg.seed, cfg.pair_count, work,
                               worst, std::move(witness));
}

// ---------------------------------------------------------------------------
// Quasar-convexity toward x* with parameter gamma in (0, 1]:
//   f(x*) >= f(x) + (1/gamma) <grad f(x), x* - x>.
// Defined through gradients, so points within 1e-9 of a kink are skipped and
// counted.

namespace detail {
inline Vector smooth_gradient(const FunctionObject& f, const Vector& x) {
  SubgradientSet s = f.subgradient(x);
  if (!s.is_singleton())
    throw RepresentationError(
        f.descriptor() + ": interval subdifferential at " + to_string(x) +
        " outside declared kink loci; gradient-based check cannot proceed");
  return s.smooth_part();
}
}  // namespace detail

inline CheckReport check_quasar_convex(const FunctionObject& f,
                                       const Vector& x_star, double gamma,
                                       const SamplerConfig& cfg = {},
                                       double tol = kInequalityTol) {
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw ParamError("check_quasar_convex: gamma=" + format_double(gamma) +
                     " outside (0,1]");
  double f_star = f.value(x_star);  // also validates membership
  Box region = detail::resolve_region(f, cfg);
  detail::PointSampler sampler(region, f.kink_loci(), cfg.kink_probability,
                               cfg.seed);
  double worst = -std::numeric_limits<double>::infinity();
  std::optional<Witness> witness;
  long work = 0, skipped = 0, used = 0;
  for (long n = 0; n < cfg.pair_count; ++n) {
    Vector x = sampler.next();
    if (f.near_kink(x, kKinkSkipTol)) {
      ++skipped;
      continue;
    }
    Vector g = detail::smooth_gradient(f, x);
    double v = f.value(x) + dot(g, sub(x_star, x)) / gamma - f_star;
    ++work;
    ++used;
    if (v > worst) {
      worst = v;
      witness = Witness{x, {}, g};
    }
  }
  if (used == 0) worst = 0.0;
  return detail::finish_report("quasar_convex", tol, cfg.seed, cfg.pair_count,
                               work, worst, std::move(witness), skipped);
}

// Polyak-Lojasiewicz bound with constant mu > 0 and optimal value f_star:
//   (1/2) ||grad f(x)||^2 >= mu (f(x) - f_star).
inline CheckReport check_pl(const FunctionObject& f, double f_star, double mu,
                            const SamplerConfig& cfg = {},
                            double tol = kInequalityTol) {
  if (!(mu > 0.0))
    throw ParamError("check_pl: mu must be positive");
  Box region = detail::resolve_region(f, cfg);
  detail::PointSampler sampler(region, f.kink_loci(), cfg.kink_probability,
                               cfg.seed);
  double worst = -std::numeric_limits<double>::infinity();
  std::optional<Witness> witness;
  long work = 0, skipped = 0, used = 0;
  for (long n = 0; n < cfg.pair_count; ++n) {
    Vector x = sampler.next();
    if (f.near_kink(x, kKinkSkipTol)) {
      ++skipped;
      continue;
    }
    Vector g = detail::smooth_gradient(f, x);
    double v = mu * (f.value(x) - f_star) - 0.5 * dot(g, g);
    ++work;
    ++used;
    if (v > worst) {
      worst = v;
      witness = Witness{x, {}, g};
    }
  }
  if (used == 0) worst = 0.0;
  return detail::finish_report("pl_bound", tol, cfg.seed, cfg.pair_count, work,
                               worst, std::move(witness), skipped);
}

// ---------------------------------------------------------------------------
// Kernels induced by quasar-convexity and PL bounds.  Both are explicit
// rules: eta(x,y) = (x* - x)/gamma, and eta(x,y) = -grad f(x) / (2 mu).
// Neither vanishes at y = x, which is why they are not scaled differences.

inline KernelFn induced_kernel_from_quasar(const Vector& x_star, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw ParamError("induced_kernel_from_quasar: gamma outside (0,1]");
  std::vector<double> params = {gamma};
  params.insert(params.end(), x_star.begin(), x_star.end());
  return KernelFn::explicit_rule(
      RuleId{"quasar_kernel", std::move(params)},
      [x_star, gamma](const Vector& x, const Vector&) {
        return scaled(sub(x_star, x), 1.0 / gamma);
      });
}

inline KernelFn induced_kernel_from_pl(const FunctionObject& f, double mu) {
  if (!(mu > 0.0)) throw ParamError("induced_kernel_from_pl: mu must be positive");
  SubdiffFn sub_fn = f.subdiff_fn();
  return KernelFn::explicit_rule(
      RuleId{"pl_kernel:" + f.descriptor(), {mu}},
      [sub_fn, mu](const Vector& x, const Vector&) {
        return scaled(min_norm_subgradient(sub_fn(x)), -0.5 / mu);
      });
}

}  // namespace invexkit
