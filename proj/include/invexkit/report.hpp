// Catalog classification and machine-readable outputs: per-entry JSON check
// reports (schema "invexkit/1") and the CSV tables behind the figures.  The
// command-line tool is a thin wrapper around these functions, which keeps
// them directly testable.
//
// Reports must be byte-identical for identical seeds, so the "runtime" field
// is a deterministic work count (inequality evaluations), not wall time.
#pragma once

#include <algorithm>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "invexkit/analysis.hpp"
#include "invexkit/catalog.hpp"
#include "invexkit/core.hpp"

namespace invexkit {

using ordered_json = nlohmann::ordered_json;

inline const std::vector<std::string>& class_names() {
  static const std::vector<std::string> names = {"invex", "pseudoconvex",
                                                 "quasiconvex", "convex"};
  return names;
}

struct ClassifyConfig {
  std::uint64_t seed = 42;
  long pairs = 100000;
  double tol = 1e-9;
  std::set<std::string> properties;  // empty = all four classes
};

struct EntryResult {
  std::string id;
  std::vector<std::string> expected;  // restricted to requested properties
  std::vector<std::string> observed;
  std::vector<CheckReport> checks;
  bool match = false;
};

// Observed membership per class:
//  - invex: the kernel inequality holds on sampled pairs (when a kernel is
//    attached) and every located stationary point is globally minimal;
//  - pseudoconvex / quasiconvex / convex: the definitional sampled checks.
inline EntryResult classify_entry(const CatalogEntry& entry,
                                  const ClassifyConfig& cfg = {}) {
  for (const auto& p : cfg.properties)
    if (std::find(class_names().begin(), class_names().end(), p) ==
        class_names().end())
      throw UnknownEntry("classify: unknown property '" + p + "'");
  auto wanted = [&](const std::string& c) {
    return cfg.properties.empty() || cfg.properties.count(c) > 0;
  };

  FunctionObject f = entry.build();
  SamplerConfig scfg;
  scfg.seed = cfg.seed;
  scfg.pair_count = cfg.pairs;

  EntryResult r;
  r.id = entry.id;
  for (const auto& c : entry.expected_classes)
    if (wanted(c)) r.expected.push_back(c);

  auto observe = [&](const std::string& c, bool member) {
    if (member) r.observed.push_back(c);
  };

  if (wanted("invex")) {
    bool invex = true;
    if (f.kernel()) {
      r.checks.push_back(check_invexity(f, scfg, cfg.tol));
      invex = r.checks.back().passed;
    }
    r.checks.push_back(check_stationary_global(f, scfg, cfg.tol));
    invex = invex && r.checks.back().passed;
    observe("invex", invex);
  }
  if (wanted("pseudoconvex")) {
    r.checks.push_back(check_pseudoconvex_definitional(f, scfg, cfg.tol));
    observe("pseudoconvex", r.checks.back().passed);
  }
  if (wanted("quasiconvex")) {
    r.checks.push_back(check_quasiconvex(f, scfg, cfg.tol));
    observe("quasiconvex", r.checks.back().passed);
  }
  if (wanted("convex")) {
    r.checks.push_back(check_convex_midpoint(f, scfg, cfg.tol));
    observe("convex", r.checks.back().passed);
  }

  r.match = r.expected == r.observed;  // both follow class_names() order
  return r;
}

// ---------------------------------------------------------------------------
// JSON serialization

inline ordered_json to_json(const CheckReport& c) {
  ordered_json j;
  j["property"] = c.property;
  j["passed"] = c.passed;
  j["worst_violation"] = c.worst_violation;
  j["tolerance"] = c.tolerance;
  j["samples"] = c.samples;
  j["skipped_kinks"] = c.skipped_kinks;
  j["seed"] = c.rng_seed;
  j["runtime"] = c.work;  // deterministic work units, see header comment
  if (c.witness) {
    ordered_json w;
    w["x"] = c.witness->x;
    w["y"] = c.witness->y;
    w["xi"] = c.witness->xi;
    j["witness"] = w;
  } else {
    j["witness"] = nullptr;
  }
  j["note"] = c.note;
  return j;
}

inline ordered_json to_json(const CatalogEntry& entry, const EntryResult& r) {
  ordered_json j;
  j["id"] = r.id;
  j["formula"] = entry.formula;
  j["recipe"] = entry.recipe;
  j["figure"] = entry.figure;
  j["expected"] = r.expected;
  j["observed"] = r.observed;
  j["match"] = r.match;
  ordered_json checks = ordered_json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  j["checks"] = checks;
  return j;
}

inline ordered_json report_header(const ClassifyConfig& cfg) {
  ordered_json doc;
  doc["schema"] = "invexkit/1";
  doc["seed"] = cfg.seed;
  doc["pairs"] = cfg.pairs;
  doc["tolerance"] = cfg.tol;
  return doc;
}

// Full-catalog report; the CLI `report` verb prints exactly this string.
inline std::string run_report_json(const ClassifyConfig& cfg = {}) {
  ordered_json doc = report_header(cfg);
  ordered_json entries = ordered_json::array();
  bool all = true;
  for (const auto& e : catalog()) {
    EntryResult r = classify_entry(e, cfg);
    all = all && r.match;
    entries.push_back(to_json(e, r));
  }
  doc["entries"] = entries;
  doc["all_match"] = all;
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Figure data.  Grids are generated from integer indices so that landmark
// abscissae (e.g. x = 2 in fig1) are hit exactly.

struct PlotTable {
  std::vector<std::string> header;
  std::vector<Vector> rows;
};

inline void write_csv(std::ostream& os, const PlotTable& t) {
  for (std::size_t i = 0; i < t.header.size(); ++i)
    os << (i ? "," : "") << t.header[i];
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      os << (i ? "," : "") << format_double(row[i]);
    os << "\n";
  }
}

namespace detail {

inline PlotTable surface_table(const FunctionObject& f, double lo, double hi,
                               int steps) {
  PlotTable t;
  t.header = {"x", "y", "f"};
  for (int i = 0; i <= steps; ++i) {
    double x = lo + (hi - lo) * i / steps;
    for (int j = 0; j <= steps; ++j) {
      double y = lo + (hi - lo) * j / steps;
      t.rows.push_back({x, y, f.value({x, y})});
    }
  }
  return t;
}

inline PlotTable curve_table(const FunctionObject& f, double lo, double hi,
                             int steps) {
  PlotTable t;
  t.header = {"x", "f"};
  for (int i = 0; i <= steps; ++i) {
    double x = lo + (hi - lo) * i / steps;
    t.rows.push_back({x, f.value({x})});
  }
  return t;
}

}  // namespace detail

inline const std::vector<std::string>& figure_names() {
  static const std::vector<std::string> names = {
      "fig1", "fig2", "fig3a", "fig3b", "fig5a", "fig5b", "fig5c"};
  return names;
}

inline PlotTable plot_table(const std::string& figure) {
  if (figure == "fig1") {
    // x^2/(x^2+1) against its kernel tangent at x0 = 2:
    // tangent(x) = 4/5 + 4 (x-2) / (x^2+1)^2, a global lower bound
    FunctionObject f = catalog_entry("tangentDemo").build();
    PlotTable t;
    t.header = {"x", "f", "tangent"};
    for (int k = 0; k <= 800; ++k) {
      double x = double(k - 400) / 100.0;
      double d = x * x + 1.0;
      t.rows.push_back({x, f.value({x}), 0.8 + 4.0 * (x - 2.0) / (d * d)});
    }
    return t;
  }
  if (figure == "fig2")
    return detail::surface_table(catalog_entry("noStat").build(), -2, 2, 100);
  if (figure == "fig3a")
    return detail::curve_table(catalog_entry("logreg1").build(), -5, 5, 1000);
  if (figure == "fig3b")
    return detail::surface_table(catalog_entry("logreg").build(), -5, 5, 100);
  if (figure == "fig5a")
    return detail::surface_table(catalog_entry("pert1").build(), -5, 5, 100);
  if (figure == "fig5b")
    return detail::curve_table(catalog_entry("pert2").build(), -10, 10, 2000);
  if (figure == "fig5c")
    return detail::surface_table(catalog_entry("sepPert").build(), -5, 5, 100);
  throw UnknownEntry("plot_table: no figure named '" + figure + "'");
}

}  // namespace invexkit
