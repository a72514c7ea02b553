#include <doctest.h>

#include <invexkit/report.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <string>

using namespace invexkit;

namespace {

Vector sample_in(const Box& box, Rng& rng) {
    Vector x(box.dim());
    for (std::size_t i = 0; i < box.dim(); ++i)
        x[i] = rng.uniform(box.lo[i], box.hi[i]);
    return x;
}

Box shrunk(const Box& box, double margin) {
    Vector lo = box.lo, hi = box.hi;
    for (std::size_t i = 0; i < box.dim(); ++i) {
        lo[i] += margin;
        hi[i] -= margin;
    }
    return Box(lo, hi);
}

}  // namespace

TEST_SUITE("catalog") {

TEST_CASE("the catalog lists thirteen distinct worked examples") {
    const auto& entries = catalog();
    CHECK(entries.size() == 13);
    std::set<std::string> ids;
    for (const auto& e : entries) ids.insert(e.id);
    CHECK(ids.size() == entries.size());
    CHECK(catalog_entry("square").id == "square");
    CHECK_THROWS_AS((void)catalog_entry("nope"), UnknownEntry);
}

TEST_CASE("every entry builds with consistent metadata") {
    for (const auto& e : catalog()) {
        CAPTURE(e.id);
        FunctionObject f = e.build();
        CHECK(f.kernel().has_value());
        CHECK(f.dim() == f.domain().dim());

        // expected classes form an ordered sub-list of the known class names
        std::size_t cursor = 0;
        for (const auto& c : e.expected_classes) {
            auto it = std::find(class_names().begin() + cursor,
                                class_names().end(), c);
            REQUIRE(it != class_names().end());
            cursor = std::size_t(it - class_names().begin()) + 1;
        }

        if (e.x_star) {
            REQUIRE(e.f_star.has_value());
            REQUIRE(e.x_star->size() == f.dim());
            CHECK(std::fabs(f.value(*e.x_star) - *e.f_star) <= 1e-12);

            // the declared minimum beats 1000 sampled points
            Rng rng(2024);
            const Box& region = f.domain().sample_region();
            for (int s = 0; s < 1000; ++s)
                CHECK(*e.f_star <= f.value(sample_in(region, rng)) + 1e-9);
        }
    }
}

TEST_CASE("a few entries carry their construction provenance") {
    CHECK(catalog_entry("square").build().provenance() == Provenance::convex_atom);
    CHECK(catalog_entry("fraclog").build().provenance() == Provenance::weighted_sum);
    CHECK(catalog_entry("pert2").build().provenance() ==
          Provenance::stationarity_audit);
    CHECK(catalog_entry("noStat").build().provenance() ==
          Provenance::no_stationary_audit);
    CHECK(catalog_entry("sepPert").build().provenance() ==
          Provenance::separable_sum);
}

TEST_CASE("kernels vanish on the diagonal") {
    Rng rng(99);
    for (const auto& e : catalog()) {
        CAPTURE(e.id);
        FunctionObject f = e.build();
        const Box& region = f.domain().sample_region();
        for (int s = 0; s < 20; ++s) {
            Vector x = sample_in(region, rng);
            CHECK(kernel_eval(*f.kernel(), x, x) == zeros(f.dim()));
        }
    }
}

TEST_CASE("declared subgradients agree with central differences") {
    const double h = 1e-6;
    for (const auto& e : catalog()) {
        CAPTURE(e.id);
        FunctionObject f = e.build();
        Box region = shrunk(f.domain().sample_region(), 1e-3);
        Rng rng(7);
        for (int s = 0; s < 150; ++s) {
            Vector x = sample_in(region, rng);
            if (f.near_kink(x, 1e-5)) continue;
            SubgradientSet sg = f.subgradient(x);
            if (!sg.is_singleton()) continue;
            const Vector& g = sg.smooth_part();
            for (std::size_t i = 0; i < f.dim(); ++i) {
                Vector xp = x, xm = x;
                xp[i] += h;
                xm[i] -= h;
                double fd = (f.value(xp) - f.value(xm)) / (2.0 * h);
                CHECK(std::fabs(fd - g[i]) <= 1e-4 * std::max(1.0, std::fabs(g[i])));
            }
        }
    }
}

TEST_CASE("classification can be restricted to a property subset") {
    ClassifyConfig cfg;
    cfg.pairs = 3000;
    cfg.properties = {"convex"};
    EntryResult r = classify_entry(catalog_entry("square"), cfg);
    CHECK(r.expected == std::vector<std::string>{"convex"});
    CHECK(r.observed == std::vector<std::string>{"convex"});
    CHECK(r.match);
    REQUIRE(r.checks.size() == 1);
    CHECK(r.checks[0].property == "convex");

    cfg.properties = {"bogus"};
    CHECK_THROWS_AS((void)classify_entry(catalog_entry("square"), cfg),
                    UnknownEntry);
}

TEST_CASE("the fractional example lands exactly in its expected classes") {
    ClassifyConfig cfg;
    cfg.pairs = 5000;
    EntryResult r = classify_entry(catalog_entry("fracx"), cfg);
    CHECK(r.match);
    CHECK(r.observed ==
          std::vector<std::string>{"invex", "pseudoconvex", "quasiconvex"});
    // invexity + stationarity + three definitional checks
    CHECK(r.checks.size() == 5);
    CHECK_FALSE(r.checks.back().passed);  // midpoint convexity fails
}

TEST_CASE("the JSON report is structurally sound and byte-deterministic") {
    ClassifyConfig cfg;
    cfg.pairs = 500;
    cfg.seed = 9;
    std::string text = run_report_json(cfg);
    CHECK(run_report_json(cfg) == text);

    ordered_json doc = ordered_json::parse(text);
    CHECK(doc["schema"] == "invexkit/1");
    CHECK(doc["seed"] == 9);
    CHECK(doc["pairs"] == 500);
    CHECK(doc["tolerance"] == 1e-9);
    REQUIRE(doc["entries"].size() == 13);
    CHECK(doc.contains("all_match"));

    const auto& entries = catalog();
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& j = doc["entries"][i];
        CHECK(j["id"] == entries[i].id);
        CHECK(j["formula"] == entries[i].formula);
        REQUIRE(!j["checks"].empty());
        for (const auto& c : j["checks"]) {
            CHECK(c.contains("property"));
            CHECK(c.contains("passed"));
            CHECK(c.contains("worst_violation"));
            CHECK(c.contains("tolerance"));
            CHECK(c.contains("samples"));
            CHECK(c.contains("skipped_kinks"));
            CHECK(c.contains("seed"));
            CHECK(c.contains("runtime"));
            CHECK(c.contains("note"));
            if (c["passed"].get<bool>()) CHECK(c["witness"].is_null());
        }
    }
}

TEST_CASE("figure tables have the advertised shapes") {
    CHECK(figure_names() ==
          std::vector<std::string>{"fig1", "fig2", "fig3a", "fig3b", "fig5a",
                                   "fig5b", "fig5c"});
    CHECK_THROWS_AS((void)plot_table("fig9"), UnknownEntry);

    // every named figure is claimed by exactly one catalog entry
    std::set<std::string> claimed;
    for (const auto& e : catalog())
        if (!e.figure.empty()) CHECK(claimed.insert(e.figure).second);
    CHECK(claimed ==
          std::set<std::string>(figure_names().begin(), figure_names().end()));

    PlotTable fig1 = plot_table("fig1");
    CHECK(fig1.header == std::vector<std::string>{"x", "f", "tangent"});
    REQUIRE(fig1.rows.size() == 801);
    CHECK(fig1.rows[600][0] == 2.0);
    CHECK(fig1.rows[600][1] == 0.8);   // curve and tangent touch exactly
    CHECK(fig1.rows[600][2] == 0.8);

    CHECK(plot_table("fig3a").rows.size() == 1001);
    CHECK(plot_table("fig5b").rows.size() == 2001);
    for (const char* surf : {"fig2", "fig3b", "fig5a", "fig5c"}) {
        PlotTable t = plot_table(surf);
        CHECK(t.header == std::vector<std::string>{"x", "y", "f"});
        CHECK(t.rows.size() == 10201);
    }

    std::ostringstream os;
    write_csv(os, fig1);
    CHECK(os.str().rfind("x,f,tangent\n-4,", 0) == 0);
}

}  // TEST_SUITE("catalog")
