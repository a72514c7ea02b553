// The worked-example catalog: each entry names a function, how it is
// constructed, the generalized-convexity classes it is expected to land in,
// and (when known) its global minimum.  Entries on x > 0 sample [0.05, 10];
// entries on R^n sample [-5, 5]^n except pert2, which samples [-10, 10].
#pragma once

#include <cmath>
#include <functional>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "invexkit/algebra.hpp"
#include "invexkit/core.hpp"

namespace invexkit {

struct CatalogEntry {
  std::string id;
  std::string formula;  // display form
  std::string recipe;   // construction summary
  std::string figure;   // plot-data figure fed by this entry, if any
  std::vector<std::string> expected_classes;  // of invex/pseudoconvex/quasiconvex/convex
  std::optional<double> f_star;  // known global minimum value on the domain
  std::optional<Vector> x_star;  // a global minimizer
  std::function<FunctionObject()> build;
};

namespace catalog_detail {

inline DomainSpec positive_line() {
  return DomainSpec::half_line(0.0, true, Box({0.05}, {10.0}));
}

inline FunctionObject build_abslog() {
  FunctionObject g = make_convex_atom(ConvexAtomSpec::abs());
  return compose_transform(
      g, RuleId{"log", {}},
      [](const Vector& x) { return Vector{std::log(x[0])}; },
      [](const Vector& x) {
        Matrix j(1, 1);
        j(0, 0) = 1.0 / x[0];
        return j;
      },
      [](const Vector& x) {
        Matrix j(1, 1);
        j(0, 0) = x[0];
        return j;
      },
      positive_line(), [](double t) { return std::exp(t); });
}

inline FunctionObject build_fracx() {
  return fractional(make_convex_atom(ConvexAtomSpec::abs(1.0)),
                    make_convex_atom(ConvexAtomSpec::affine(1.0, 0.0)),
                    positive_line());
}

inline FunctionObject build_fraclog() {
  FunctionObject logx = log_compose(
      make_convex_atom(ConvexAtomSpec::affine(1.0, 0.0)), positive_line());
  return weighted_sum(build_fracx(), logx, 1.0, 1.0);
}

inline FunctionObject build_logreg_part() {
  return log_compose(make_convex_atom(ConvexAtomSpec::abs(0.0, 1.0)));
}

inline FunctionObject build_powreg_part() {
  return power_compose(make_convex_atom(ConvexAtomSpec::abs(0.0, 0.1)), 0.5);
}

inline FunctionObject build_ratioreg_part() {
  return ratio_compose(make_convex_atom(ConvexAtomSpec::abs()), 1.0);
}

inline FunctionObject build_pert2_raw(double lo, double hi) {
  RawFunctionSpec s;
  s.descriptor = "pert2";
  s.eval = [](const Vector& x) { return x[0] * x[0] - 6.0 * std::cos(x[0]); };
  s.subdiff = [](const Vector& x) {
    return SubgradientSet::singleton({2.0 * x[0] + 6.0 * std::sin(x[0])});
  };
  s.domain = DomainSpec::all_space(1, Box({lo}, {hi}));
  return make_function(std::move(s));
}

inline FunctionObject build_pert2() {
  return declare_invex_by_stationarity_audit(build_pert2_raw(-10.0, 10.0),
                                             {0.0}, Box({-10.0}, {10.0}),
                                             100000);
}

inline FunctionObject build_pert1() {
  RawFunctionSpec s;
  s.descriptor = "pert1";
  s.eval = [](const Vector& x) {
    return 2.0 * (std::abs(x[0]) + std::abs(x[1])) - std::cos(norm2(x));
  };
  s.subdiff = [](const Vector& x) {
    double r = norm2(x);
    Vector sm(2, 0.0), lo(2, 0.0), hi(2, 0.0);
    if (r > 0.0) sm = scaled(x, std::sin(r) / r);  // gradient of -cos||x||
    for (int i = 0; i < 2; ++i) {
      if (std::abs(x[i]) <= kKinkDetectTol) {
        lo[i] = -2.0;
        hi[i] = 2.0;
      } else {
        sm[i] += x[i] > 0 ? 2.0 : -2.0;
      }
    }
    return SubgradientSet(std::move(sm), std::move(lo), std::move(hi));
  };
  s.domain = DomainSpec::all_space(2, Box::cube(2, -5, 5));
  s.kink_loci = {{0.0}, {0.0}};
  return declare_invex_by_stationarity_audit(make_function(std::move(s)),
                                             {0.0, 0.0}, Box::cube(2, -5, 5),
                                             100000);
}

inline FunctionObject build_sep_pert() {
  FunctionObject part = declare_invex_by_stationarity_audit(
      build_pert2_raw(-10.0, 10.0), {0.0}, Box({-10.0}, {10.0}), 100000);
  return separable_sum({part, part},
                       DomainSpec::all_space(2, Box::cube(2, -5, 5)));
}

inline FunctionObject build_no_stat() {
  RawFunctionSpec s;
  s.descriptor = "noStat";
  s.eval = [](const Vector& x) { return x[0] - x[1] * x[1]; };
  s.subdiff = [](const Vector& x) {
    return SubgradientSet::singleton({1.0, -2.0 * x[1]});
  };
  s.domain = DomainSpec::all_space(2, Box::cube(2, -5, 5));
  return declare_invex_by_no_stationary_audit(make_function(std::move(s)),
                                              Box::cube(2, -5, 5), 100000);
}

}  // namespace catalog_detail

inline const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = [] {
    using namespace catalog_detail;
    std::vector<CatalogEntry> v;
    auto I = [](std::initializer_list<const char*> cs) {
      return std::vector<std::string>(cs.begin(), cs.end());
    };

    v.push_back({"square", "x^2", "make_convex_atom(square)", "",
                 I({"invex", "pseudoconvex", "quasiconvex", "convex"}), 0.0,
                 Vector{0.0},
                 [] { return make_convex_atom(ConvexAtomSpec::square()); }});

    v.push_back({"abslog", "|log x|  on x > 0",
                 "compose_transform(abs, log)", "",
                 I({"invex", "pseudoconvex", "quasiconvex"}), 0.0, Vector{1.0},
                 build_abslog});

    v.push_back({"fracx", "|x-1|/x  on x > 0",
                 "fractional(abs(1), affine(1,0))", "",
                 I({"invex", "pseudoconvex", "quasiconvex"}), 0.0, Vector{1.0},
                 build_fracx});

    v.push_back({"fraclog", "|x-1|/x + log x  on x > 0",
                 "weighted_sum(fracx, log_compose(affine(1,0)), 1, 1)", "",
                 I({"invex", "pseudoconvex", "quasiconvex"}), 0.0, Vector{1.0},
                 build_fraclog});

    v.push_back({"logreg1", "log(1+|x|)", "log_compose(abs(0,1))", "fig3a",
                 I({"invex", "pseudoconvex", "quasiconvex"}), 0.0, Vector{0.0},
                 build_logreg_part});

    v.push_back({"logreg", "sum_i log(1+|x_i|), n=2",
                 "separable_sum(log_compose(abs(0,1)) x 2)", "fig3b",
                 I({"invex"}), 0.0, Vector{0.0, 0.0},
                 [] { return separable_sum({build_logreg_part(),
                                            build_logreg_part()}); }});

    v.push_back({"powreg", "sum_i (|x_i|+0.1)^0.5, n=2",
                 "separable_sum(power_compose(abs(0,0.1), 0.5) x 2)", "",
                 I({"invex"}), 2.0 * std::sqrt(0.1), Vector{0.0, 0.0},
                 [] { return separable_sum({build_powreg_part(),
                                            build_powreg_part()}); }});

    v.push_back({"ratioreg", "sum_i |x_i|/(|x_i|+1), n=2",
                 "separable_sum(ratio_compose(abs, 1) x 2)", "",
                 I({"invex"}), 0.0, Vector{0.0, 0.0},
                 [] { return separable_sum({build_ratioreg_part(),
                                            build_ratioreg_part()}); }});

    v.push_back({"tangentDemo", "x^2/(x^2+1)", "ratio_compose(square, 1)",
                 "fig1", I({"invex", "pseudoconvex", "quasiconvex"}), 0.0,
                 Vector{0.0},
                 [] { return ratio_compose(
                          make_convex_atom(ConvexAtomSpec::square()), 1.0); }});

    v.push_back({"pert1", "2||x||_1 - cos ||x||_2, n=2",
                 "declare_invex_by_stationarity_audit(raw)", "fig5a",
                 I({"invex"}), -1.0, Vector{0.0, 0.0}, build_pert1});

    v.push_back({"pert2", "x^2 - 6 cos x",
                 "declare_invex_by_stationarity_audit(raw)", "fig5b",
                 I({"invex", "pseudoconvex", "quasiconvex"}), -6.0,
                 Vector{0.0}, build_pert2});

    v.push_back({"sepPert", "sum_i (x_i^2 - 6 cos x_i), n=2",
                 "separable_sum(audited(x^2 - 6 cos x) x 2)", "fig5c",
                 I({"invex"}), -12.0, Vector{0.0, 0.0}, build_sep_pert});

    v.push_back({"noStat", "x - y^2",
                 "declare_invex_by_no_stationary_audit(raw)", "fig2",
                 I({"invex"}), std::nullopt, std::nullopt, build_no_stat});

    return v;
  }();
  return entries;
}

inline const CatalogEntry& catalog_entry(const std::string& id) {
  for (const auto& e : catalog())
    if (e.id == id) return e;
  throw UnknownEntry("catalog: no entry named '" + id + "'");
}

}  // namespace invexkit
