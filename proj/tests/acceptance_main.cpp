// Acceptance harness: one pass/fail line per criterion, exit 1 on any failure.
#include <invexkit/report.hpp>
#include <invexkit/solve.hpp>

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

using namespace invexkit;

namespace {

int failures = 0;

void criterion(int num, const std::string& title,
               const std::function<void()>& body) {
    try {
        body();
        std::printf("[PASS] %02d %s\n", num, title.c_str());
    } catch (const std::exception& e) {
        ++failures;
        std::printf("[FAIL] %02d %s: %s\n", num, title.c_str(), e.what());
    }
    std::fflush(stdout);
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::runtime_error(msg);
}

SamplerConfig default_sampler() {
    SamplerConfig cfg;
    cfg.pair_count = 100000;
    cfg.seed = 42;
    return cfg;
}

}  // namespace

int main() {
    criterion(1, "kernel tangent at x=2 minorizes x^2/(x^2+1) and touches exactly", [] {
        PlotTable t = plot_table("fig1");
        require(t.rows.size() == 801, "expected 801 grid rows");
        require(t.rows[600][0] == 2.0, "row 600 should sit at x=2");
        require(std::fabs(t.rows[600][1] - t.rows[600][2]) <= 1e-12,
                "curve and tangent must touch at x=2");

        FunctionObject f = catalog_entry("tangentDemo").build();
        const KernelFn& k = *f.kernel();
        const double f2 = f.value({2.0});
        const double g2 = min_norm_subgradient(f.subgradient({2.0}))[0];
        for (const auto& row : t.rows) {
            require(row[1] - row[2] >= -1e-12,
                    "tangent exceeds the curve at x=" + format_double(row[0]));
            double model = f2 + g2 * kernel_eval(k, {2.0}, {row[0]})[0];
            require(std::fabs(model - row[2]) <= 1e-12,
                    "kernel tangent deviates from the table at x=" +
                        format_double(row[0]));
        }
    });

    criterion(2, "sampled kernel inequality holds for seven composed catalog entries", [] {
        for (const char* id : {"abslog", "fracx", "fraclog", "logreg", "powreg",
                               "ratioreg", "tangentDemo"}) {
            CheckReport r =
                check_invexity(catalog_entry(id).build(), default_sampler());
            require(r.passed, std::string(id) + ": worst violation " +
                                  format_double(r.worst_violation));
        }
    });

    criterion(3, "log/power/ratio sums fail quasiconvexity with explicit midpoints", [] {
        for (const char* id : {"logreg", "powreg", "ratioreg"}) {
            CheckReport r =
                check_quasiconvex(catalog_entry(id).build(), default_sampler());
            require(!r.passed, std::string(id) + " unexpectedly looked quasiconvex");
        }
        auto midpoint_gap = [](const FunctionObject& f) {
            return f.value({1.5, 1.5}) -
                   std::max(f.value({3.0, 0.0}), f.value({0.0, 3.0}));
        };
        double lr = midpoint_gap(catalog_entry("logreg").build());
        require(std::fabs(lr - (2.0 * std::log(2.5) - std::log(4.0))) <= 1e-12,
                "logreg midpoint gap is " + format_double(lr));
        require(midpoint_gap(catalog_entry("powreg").build()) > 0.1,
                "powreg midpoint gap too small");
        require(midpoint_gap(catalog_entry("ratioreg").build()) > 0.1,
                "ratioreg midpoint gap too small");
    });

    criterion(4, "full catalog classification matches expectations at seed 42", [] {
        ClassifyConfig cfg;  // seed 42, 100000 pairs, tol 1e-9
        std::map<std::string, std::set<std::string>> observed;
        std::map<std::string, std::size_t> dims;
        for (const auto& e : catalog()) {
            EntryResult r = classify_entry(e, cfg);
            std::string got;
            for (const auto& c : r.observed) got += (got.empty() ? "" : ",") + c;
            require(r.match, e.id + " observed {" + got + "}");
            observed[e.id] = {r.observed.begin(), r.observed.end()};
            dims[e.id] = e.build().dim();
        }
        for (const auto& [id, obs] : observed) {
            if (dims[id] == 1 && obs.count("invex"))
                require(obs.count("pseudoconvex") == 1,
                        id + ": one-dimensional and invex but not pseudoconvex");
            if (obs.count("invex") && obs.count("quasiconvex"))
                require(obs.count("pseudoconvex") == 1,
                        id + ": invex and quasiconvex but not pseudoconvex");
        }
    });

    criterion(5, "cosine perturbations certify by audit and descend to their minima", [] {
        FunctionObject p1 = catalog_entry("pert1").build();
        require(p1.invex_certified() && p1.audit().has_value(),
                "pert1 should carry an audit certificate");
        require(p1.audit()->known_min == Vector({0.0, 0.0}),
                "pert1 audit should record the origin as minimum");
        require(p1.audit()->grid_points >= 100000, "pert1 audit grid too small");

        FunctionObject p2 = catalog_entry("pert2").build();
        require(p2.invex_certified() && p2.audit().has_value(),
                "pert2 should carry an audit certificate");
        require(p2.audit()->grid_points >= 100000, "pert2 audit grid too small");

        for (double x0 : {-10.0, -3.0, 2.0, 8.0}) {
            DescentConfig dc;
            dc.step = PolyakStep{-6.0, 1.0};
            dc.max_iter = 100000;
            dc.record_every = 1000;
            Trajectory t = subgradient_descent(p2, {x0}, dc);
            require(t.iterations <= 100000,
                    "descent from " + format_double(x0) + " exceeded the budget");
            require(t.final_value() <= -6.0 + 1e-8,
                    "descent from " + format_double(x0) + " ends at f=" +
                        format_double(t.final_value()));
            require(std::fabs(t.final_point()[0]) <= 1e-6,
                    "descent from " + format_double(x0) + " ends at x=" +
                        format_double(t.final_point()[0]));
        }
    });

    criterion(6, "box KKT corner of the saddle passes checks but fails the global audit", [] {
        FunctionObject f = catalog_entry("noStat").build();
        Box box = Box::cube(2, -1.0, 1.0);
        DescentConfig dc;
        dc.max_iter = 1000;
        Trajectory t = projected_descent_box(f, box, {0.5, 0.0}, dc);
        require(t.final_point() == Vector({-1.0, 0.0}),
                "projected descent should park at (-1, 0)");

        Vector lambda = derive_box_multipliers(f, box, t.final_point());
        require(lambda == Vector({1.0, 0.0, 0.0, 0.0}),
                "multipliers should be (1,0,0,0), got " + to_string(lambda));

        ConstrainedProblem p(f, box_constraint_functions(box, f.domain()));
        KKTPoint cand{t.final_point(), lambda};
        CheckReport kkt = kkt_check(p, cand);
        require(kkt.passed && kkt.worst_violation <= 1e-12,
                "KKT residual " + format_double(kkt.worst_violation));

        SamplerConfig cfg;
        cfg.pair_count = 20000;
        CheckReport audit = kkt_global_audit(p, cand, cfg);
        require(!audit.passed, "the corner is not globally optimal");
        require(audit.note == "shared-kernel-hypothesis-not-met",
                "unexpected note '" + audit.note + "'");
        require(audit.witness.has_value(), "audit failure must carry a witness");
        require(f.value(audit.witness->y) <= -2.0 + 1e-9,
                "witness should reach the true corner minimum, got f=" +
                    format_double(f.value(audit.witness->y)));
    });

    criterion(7, "kernel algebra composes compatible sums and rejects mismatches", [] {
        FunctionObject fx = catalog_entry("fracx").build();
        DomainSpec positive =
            DomainSpec::half_line(0.0, true, Box({0.05}, {10.0}));
        FunctionObject lg = log_compose(
            make_convex_atom(ConvexAtomSpec::affine(1.0, 0.0)), positive);
        FunctionObject sum = weighted_sum(fx, lg, 1.0, 1.0);
        CheckReport r = check_invexity(sum, default_sampler());
        require(r.passed, "fracx + log sum should stay invex, worst " +
                              format_double(r.worst_violation));

        FunctionObject ns = catalog_entry("noStat").build();
        FunctionObject aff =
            make_affine_functional(Vector{-1.0, 0.0}, 0.0, ns.domain());
        bool refused = false;
        try {
            (void)weighted_sum(ns, aff, 1.0, 1.0);
        } catch (const KernelMismatch&) {
            refused = true;
        }
        require(refused, "canonical + constant-alpha kernels must not combine");

        RawFunctionSpec s;
        s.descriptor = "saddle_sheet";
        s.eval = [](const Vector& x) { return -x[1] * x[1]; };
        s.subdiff = [](const Vector& x) {
            return SubgradientSet::singleton({0.0, -2.0 * x[1]});
        };
        s.domain = DomainSpec::all_space(2, Box::cube(2, -5.0, 5.0));
        CheckReport sg =
            check_stationary_global(make_function(std::move(s)), default_sampler());
        require(!sg.passed, "-y^2 has non-minimal stationary points");
        require(sg.worst_violation >= 20.0,
                "violation should be large, got " +
                    format_double(sg.worst_violation));
        require(sg.witness.has_value(), "failure must carry a witness");
        require(std::fabs(sg.witness->x[1]) <= 1e-6 &&
                    sg.witness->y[1] * sg.witness->y[1] >= 20.0,
                "witness should pair a ridge point with a far lower sample");
    });

    criterion(8, "minimum-norm subgradient selection is optimal on random sets", [] {
        Rng rng(2718);
        for (int trial = 0; trial < 10000; ++trial) {
            std::size_t d = 1 + rng.index(6);
            Vector sm(d), lo(d), hi(d);
            for (std::size_t i = 0; i < d; ++i) {
                sm[i] = rng.uniform(-10.0, 10.0);
                lo[i] = rng.uniform(-5.0, 5.0);
                hi[i] = lo[i] + rng.uniform(0.0, 5.0);
            }
            SubgradientSet set(sm, lo, hi);
            Vector star = min_norm_subgradient(set);
            require(set.contains(star, 1e-15), "minimum-norm point left the set");

            Vector ref(d);
            for (std::size_t i = 0; i < d; ++i) {
                double a = set.smooth_part()[i] + set.box_lo()[i];
                double b = set.smooth_part()[i] + set.box_hi()[i];
                ref[i] = std::min(std::max(0.0, a), b);
            }
            require(star == ref, "disagrees with per-coordinate clamp");

            const double nsq = dot(star, star);
            for (const Vector& xi : subgradient_extreme_points(set)) {
                require(dot(star, xi) >= nsq - 1e-12,
                        "variational inequality violated");
                require(norm2(star) <= norm2(xi) + 1e-12,
                        "an extreme point is shorter than the projection");
            }
        }
    });

    criterion(9, "gradient-domination and star-shaped bounds match their certificates", [] {
        FunctionObject sq = make_convex_atom(ConvexAtomSpec::square());
        CheckReport tight = check_pl(sq, 0.0, 2.0, default_sampler());
        require(tight.passed && std::fabs(tight.worst_violation) <= 1e-12,
                "mu=2 should be exact for x^2, worst " +
                    format_double(tight.worst_violation));
        CheckReport loose = check_pl(sq, 0.0, 2.5, default_sampler());
        require(!loose.passed && loose.worst_violation >= 1.0,
                "mu=2.5 overstates the curvature of x^2");

        RawFunctionSpec s;
        s.descriptor = "gaussian_well";
        s.eval = [](const Vector& x) { return 1.0 - std::exp(-x[0] * x[0]); };
        s.subdiff = [](const Vector& x) {
            return SubgradientSet::singleton(
                {2.0 * x[0] * std::exp(-x[0] * x[0])});
        };
        s.domain = DomainSpec::all_space(1, Box::cube(1, -5.0, 5.0));
        CheckReport gw = check_quasar_convex(make_function(std::move(s)),
                                             {0.0}, 1.0, default_sampler());
        require(!gw.passed, "flat tails must defeat the gamma=1 bound");
        require(gw.witness.has_value() && std::fabs(gw.witness->x[0]) >= 3.0,
                "witness should live in the flat tail");

        FunctionObject certified = sq.with_kernel(induced_kernel_from_pl(sq, 2.0));
        CheckReport inv = check_invexity(certified, default_sampler());
        require(inv.passed, "kernel induced by the mu=2 bound must certify x^2");
    });

    criterion(10, "catalog JSON reports are byte-identical across runs", [] {
        ClassifyConfig cfg;
        std::string a = run_report_json(cfg);
        std::string b = run_report_json(cfg);
        require(a == b, "two runs differ");
        require(a.find("\"invexkit/1\"") != std::string::npos,
                "schema marker missing");
    });

    std::printf("acceptance: %d/10 criteria passed\n", 10 - failures);
    return failures ? 1 : 0;
}
