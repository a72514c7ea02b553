#include <doctest.h>

#include <invexkit/algebra.hpp>
#include <invexkit/analysis.hpp>

#include <cmath>
#include <string>

using namespace invexkit;

namespace {

DomainSpec wide_line() {
    return DomainSpec::all_space(1, Box::cube(1, -5.0, 5.0));
}

DomainSpec positive_line() {
    return DomainSpec::half_line(0.0, true, Box(Vector{0.05}, Vector{10.0}));
}

FunctionObject fracx() {
    return fractional(
        make_convex_atom(ConvexAtomSpec::abs(1.0)),
        make_convex_atom(ConvexAtomSpec::affine(1.0, 0.0).with_domain(positive_line())),
        positive_line());
}

// f(x1,x2) = log(1+|x1|) + log(1+|x2|): invex but neither quasi- nor
// pseudoconvex on the plane.
FunctionObject log_pair() {
    FunctionObject part = log_compose(make_convex_atom(ConvexAtomSpec::abs(0.0, 1.0)));
    return separable_sum({part, part});
}

// concave cap with a unique interior maximizer at t = 0
FunctionObject negative_square() {
    RawFunctionSpec s;
    s.descriptor = "neg_square";
    s.eval = [](const Vector& x) { return -x[0] * x[0]; };
    s.subdiff = [](const Vector& x) {
        return SubgradientSet::singleton(Vector{-2.0 * x[0]});
    };
    s.domain = wide_line();
    return make_function(std::move(s));
}

// smooth gaussian well f(t) = 1 - exp(-t^2); flattens out for large |t|
FunctionObject gaussian_well() {
    RawFunctionSpec s;
    s.descriptor = "gaussian_well";
    s.eval = [](const Vector& x) { return 1.0 - std::exp(-x[0] * x[0]); };
    s.subdiff = [](const Vector& x) {
        return SubgradientSet::singleton(Vector{2.0 * x[0] * std::exp(-x[0] * x[0])});
    };
    s.domain = wide_line();
    return make_function(std::move(s));
}

SamplerConfig pairs(long n, std::uint64_t seed = 42) {
    SamplerConfig cfg;
    cfg.pair_count = n;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("invexity check accepts certified constructions") {
    FunctionObject sq = make_convex_atom(ConvexAtomSpec::square());
    auto r = check_invexity(sq, pairs(5000));
    CHECK(r.passed);
    CHECK(r.property == "invexity");
    CHECK(r.worst_violation <= r.tolerance);
    CHECK(r.samples == 5000);
    CHECK(r.rng_seed == 42);
    CHECK(r.work >= 5000);
    CHECK_FALSE(r.witness.has_value());

    auto r2 = check_invexity(fracx(), pairs(5000));
    CHECK(r2.passed);

    CHECK_THROWS_AS((void)check_invexity(negative_square(), pairs(10)),
                    MissingKernel);
}

TEST_CASE("invexity check reports a reproducible witness on failure") {
    FunctionObject sq = make_convex_atom(ConvexAtomSpec::square());
    // deliberately broken kernel: eta(x,y) = -(y-x)
    FunctionObject bad = sq.with_kernel(KernelFn::scaled_difference(
        RuleId{"alpha_const", {-1.0}},
        [](const Vector&, const Vector&) { return -1.0; }));
    auto r = check_invexity(bad, pairs(2000));
    CHECK_FALSE(r.passed);
    CHECK(r.worst_violation > 1.0);
    REQUIRE(r.witness.has_value());
    const Witness& w = *r.witness;
    Vector eta = kernel_eval(*bad.kernel(), w.x, w.y);
    const double replay = dot(w.xi, eta) - (bad.value(w.y) - bad.value(w.x));
    CHECK(replay == r.worst_violation);
}

TEST_CASE("checks are deterministic for a fixed seed") {
    FunctionObject f = fracx();
    auto a = check_invexity(f, pairs(3000, 7));
    auto b = check_invexity(f, pairs(3000, 7));
    CHECK(a.worst_violation == b.worst_violation);
    CHECK(a.work == b.work);
    CHECK(a.rng_seed == 7);
}

TEST_CASE("sampling region can be overridden but must stay in the domain") {
    FunctionObject sq = make_convex_atom(ConvexAtomSpec::square());
    SamplerConfig cfg = pairs(500);
    cfg.region = Box(Vector{1.0}, Vector{2.0});
    CHECK(check_invexity(sq, cfg).passed);

    FunctionObject f = fracx();
    SamplerConfig bad = pairs(500);
    bad.region = Box(Vector{-1.0}, Vector{1.0});
    CHECK_THROWS_AS((void)check_invexity(f, bad), DomainError);
}

TEST_CASE("stationary points must be global minimizers") {
    auto good = check_stationary_global(make_convex_atom(ConvexAtomSpec::square()),
                                        pairs(4000));
    CHECK(good.passed);
    CHECK(good.property == "stationary_global");
    CHECK(good.note.find("stationary point(s)") != std::string::npos);

    auto vac = check_stationary_global(
        make_affine_functional(Vector{1.0}, 0.0, wide_line()), pairs(1000));
    CHECK(vac.passed);
    CHECK(vac.worst_violation == 0.0);
    CHECK(vac.note == "no stationary point found on the region");

    auto bad = check_stationary_global(negative_square(), pairs(4000));
    CHECK_FALSE(bad.passed);
    CHECK(bad.worst_violation >= 20.0);
    REQUIRE(bad.witness.has_value());
    CHECK(std::fabs(bad.witness->x[0]) <= 1e-6);
    CHECK(negative_square().value(bad.witness->y) < 0.0);
}

TEST_CASE("definitional pseudoconvexity separates the catalog shapes") {
    CHECK(check_pseudoconvex_definitional(make_convex_atom(ConvexAtomSpec::square()),
                                          pairs(4000))
              .passed);
    CHECK(check_pseudoconvex_definitional(make_convex_atom(ConvexAtomSpec::abs()),
                                          pairs(4000))
              .passed);
    CHECK(check_pseudoconvex_definitional(fracx(), pairs(4000)).passed);

    auto cap = check_pseudoconvex_definitional(negative_square(), pairs(4000));
    CHECK_FALSE(cap.passed);
    CHECK(cap.witness.has_value());

    auto pair = check_pseudoconvex_definitional(log_pair(), pairs(20000));
    CHECK_FALSE(pair.passed);
    CHECK(pair.worst_violation > 1e-3);
}

TEST_CASE("structural pseudoconvexity needs a positive scale factor") {
    FunctionObject f = fracx();
    auto r = check_pseudoconvex_structural(*f.kernel(), pairs(2000));
    CHECK(r.passed);
    CHECK(r.property == "pseudoconvex_structural");
    CHECK(r.worst_violation < 0.0);  // alpha stays strictly positive

    FunctionObject cs = separable_sum({make_convex_atom(ConvexAtomSpec::square()),
                                       make_convex_atom(ConvexAtomSpec::abs())});
    CHECK(check_pseudoconvex_structural(*cs.kernel(), pairs(2000)).passed);

    // componentwise scale factors that disagree across coordinates
    CHECK_THROWS_AS(
        (void)check_pseudoconvex_structural(*log_pair().kernel(), pairs(100)),
        NotScaledDifference);

    auto canon = canonical_kernel(make_convex_atom(ConvexAtomSpec::square()),
                                  KernelFn::CanonicalVariant::smooth);
    CHECK_THROWS_AS((void)check_pseudoconvex_structural(canon, pairs(100)),
                    NotScaledDifference);

    auto naked = KernelFn::scaled_difference(
        RuleId{"alpha_const", {1.0}},
        [](const Vector&, const Vector&) { return 1.0; });
    CHECK_THROWS_AS((void)check_pseudoconvex_structural(naked, pairs(100)),
                    InvalidSpec);
}

TEST_CASE("quasiconvexity compares segment values against endpoints") {
    CHECK(check_quasiconvex(make_convex_atom(ConvexAtomSpec::abs()), pairs(4000))
              .passed);
    CHECK(check_quasiconvex(fracx(), pairs(4000)).passed);

    auto r = check_quasiconvex(log_pair(), pairs(20000));
    CHECK_FALSE(r.passed);
    CHECK(r.worst_violation > 0.1);
    CHECK(r.property == "quasiconvex");
}

TEST_CASE("midpoint convexity rejects saturating curves") {
    CHECK(check_convex_midpoint(make_convex_atom(ConvexAtomSpec::square()),
                                pairs(4000))
              .passed);
    auto r = check_convex_midpoint(
        ratio_compose(make_convex_atom(ConvexAtomSpec::square()), 1.0), pairs(4000));
    CHECK_FALSE(r.passed);
    CHECK(r.property == "convex");
}

TEST_CASE("quasar convexity holds for cones from the minimizer") {
    CHECK_THROWS_AS(
        (void)check_quasar_convex(make_convex_atom(ConvexAtomSpec::square()),
                                  Vector{0.0}, 0.0, pairs(10)),
        ParamError);
    CHECK_THROWS_AS(
        (void)check_quasar_convex(make_convex_atom(ConvexAtomSpec::square()),
                                  Vector{0.0}, 1.5, pairs(10)),
        ParamError);

    auto sq = check_quasar_convex(make_convex_atom(ConvexAtomSpec::square()),
                                  Vector{0.0}, 1.0, pairs(4000));
    CHECK(sq.passed);
    CHECK(sq.property == "quasar_convex");

    auto ab = check_quasar_convex(make_convex_atom(ConvexAtomSpec::abs()),
                                  Vector{0.0}, 1.0, pairs(4000));
    CHECK(ab.passed);
    CHECK(ab.skipped_kinks > 0);

    // the flat tails of the gaussian well defeat every useful gamma
    auto gw = check_quasar_convex(gaussian_well(), Vector{0.0}, 1.0, pairs(4000));
    CHECK_FALSE(gw.passed);
    REQUIRE(gw.witness.has_value());
    CHECK(std::fabs(gw.witness->x[0]) >= 3.0);

    // undeclared interval subdifferentials are a representation error
    RawFunctionSpec s;
    s.descriptor = "undeclared_box";
    s.eval = [](const Vector& x) { return std::fabs(x[0]); };
    s.subdiff = [](const Vector&) {
        return SubgradientSet(Vector{0.0}, Vector{-1.0}, Vector{1.0});
    };
    s.domain = wide_line();
    FunctionObject box_everywhere = make_function(std::move(s));
    CHECK_THROWS_AS((void)check_quasar_convex(box_everywhere, Vector{0.0}, 1.0,
                                              pairs(100)),
                    RepresentationError);
}

TEST_CASE("gradient-domination bound is tight for the parabola") {
    FunctionObject sq = make_convex_atom(ConvexAtomSpec::square());
    CHECK_THROWS_AS((void)check_pl(sq, 0.0, 0.0, pairs(10)), ParamError);

    auto tight = check_pl(sq, 0.0, 2.0, pairs(4000));
    CHECK(tight.passed);
    CHECK(std::fabs(tight.worst_violation) <= 1e-12);
    CHECK(tight.property == "pl_bound");

    auto loose = check_pl(sq, 0.0, 2.5, pairs(4000));
    CHECK_FALSE(loose.passed);
    CHECK(loose.worst_violation >= 10.0);
    REQUIRE(loose.witness.has_value());
    CHECK(std::fabs(loose.witness->x[0]) >= 4.0);
}

TEST_CASE("induced kernels certify invexity of their source bounds") {
    CHECK_THROWS_AS((void)induced_kernel_from_quasar(Vector{0.0}, 0.0), ParamError);

    auto qk = induced_kernel_from_quasar(Vector{0.0}, 0.5);
    CHECK(qk.form() == KernelFn::Form::explicit_rule);
    CHECK(qk.id().name == "quasar_kernel");
    CHECK(qk.id().params == std::vector<double>{0.5, 0.0});
    CHECK(kernel_eval(qk, Vector{2.0}, Vector{77.0}) == Vector{-4.0});

    FunctionObject sq = make_convex_atom(ConvexAtomSpec::square());
    CHECK_THROWS_AS((void)induced_kernel_from_pl(sq, 0.0), ParamError);
    auto pk = induced_kernel_from_pl(sq, 2.0);
    CHECK(pk.id().name == "pl_kernel:square");
    CHECK(kernel_eval(pk, Vector{3.0}, Vector{77.0}) == Vector{-1.5});

    CHECK(check_invexity(sq.with_kernel(pk), pairs(4000)).passed);
    CHECK(check_invexity(sq.with_kernel(induced_kernel_from_quasar(Vector{0.0}, 1.0)),
                         pairs(4000))
              .passed);
}

}  // TEST_SUITE("analysis")
