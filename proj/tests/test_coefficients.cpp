#include <catch2/catch_amalgamated.hpp>

#include <numbers>
#include <random>

#include "qsl/coefficients.hpp"

using namespace qsl;
using Catch::Approx;

namespace {

PiecewiseFunction random_piecewise_constant(std::mt19937& rng, const Interval& iv, int pieces) {
    std::uniform_real_distribution<double> val(-2.0, 2.0);
    std::vector<double> cuts{iv.a, iv.b};
    std::uniform_real_distribution<double> pos(iv.a + 0.05 * iv.length(),
                                               iv.b - 0.05 * iv.length());
    for (int i = 1; i < pieces; ++i) cuts.push_back(pos(rng));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<Segment> segs;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        segs.push_back({cuts[i], cuts[i + 1], ConstantRule{{val(rng), 0.0}}});
    return PiecewiseFunction(iv, std::move(segs));
}

} // namespace

TEST_CASE("build_coefficients validates and reports the three norms") {
    const Interval ipi{0.0, std::numbers::pi};
    const auto c = build_coefficients(PiecewiseFunction::constant({1.0, 0.0}, ipi),
                                      PiecewiseFunction::constant({0.0, 0.0}, ipi));
    CHECK(c.l1_report().inv_p == Approx(std::numbers::pi).epsilon(1e-12));
    CHECK(c.l1_report().q_over_p == Approx(0.0).margin(1e-12));

    const Interval iv{0.0, 1.0};
    const auto delta = build_coefficients(
        PiecewiseFunction::constant({1.0, 0.0}, iv),
        PiecewiseFunction::step(iv, 0.5, {0.0, 0.0}, {1.0, 0.0}));
    CHECK(delta.l1_report().q_over_p == Approx(0.5).epsilon(1e-12));
    CHECK(delta.mesh() == std::vector<double>{0.0, 0.5, 1.0});

    // p = sqrt(t): integral of 1/p is 2
    const PiecewiseFunction sqrtp(iv, {{0.0, 1.0, ScaledPowerRule{{1.0, 0.0}, 0.0, 0.5}}});
    const auto sing = build_coefficients(sqrtp, PiecewiseFunction::constant({0.0, 0.0}, iv));
    CHECK(sing.l1_report().inv_p == Approx(2.0).margin(2e-10));

    CHECK_THROWS_AS(build_coefficients(
                        PiecewiseFunction::constant({1.0, 0.0}, iv),
                        PiecewiseFunction::constant({0.0, 0.0}, Interval{0.0, 2.0})),
                    ValidationError);
    CHECK_THROWS_AS(PiecewiseFunction::constant({1.0, 0.0}, Interval{1.0, 1.0}), ValidationError);

    // p = t^0.999 makes 1/p integrable only marginally; the quadrature gives
    // up within budget and validation reports 1/p as the offender
    const PiecewiseFunction nearline(iv, {{0.0, 1.0, ScaledPowerRule{{1.0, 0.0}, 0.0, 0.999}}});
    CHECK_THROWS_AS(build_coefficients(nearline, PiecewiseFunction::constant({0.0, 0.0}, iv)),
                    ValidationError);
}

TEST_CASE("ratios of constants and steps") {
    const Interval iv{0.0, 1.0};
    const auto c = build_coefficients(PiecewiseFunction::constant({2.0, 0.0}, iv),
                                      PiecewiseFunction::constant({1.0, 0.0}, iv));
    const RatioSet r(c);
    CHECK(r.r1_at(0.3) == Complex(0.5, 0.0));
    CHECK(r.r2_at(0.3) == Complex(0.5, 0.0));
    CHECK(r.r3_at(0.3) == Complex(0.5, 0.0));

    // Q a 0/1 step: Q^2 = Q, so r3 is the same step
    const auto d = build_coefficients(PiecewiseFunction::constant({1.0, 0.0}, iv),
                                      PiecewiseFunction::step(iv, 0.5, {0.0, 0.0}, {1.0, 0.0}));
    const RatioSet rd(d);
    CHECK(rd.r3_at(0.25) == Complex(0.0, 0.0));
    CHECK(rd.r3_at(0.75) == Complex(1.0, 0.0));

    // p = sqrt(t), Q = 1: integral of r3 = integral of t^(-1/2) = 2
    const PiecewiseFunction sqrtp(iv, {{0.0, 1.0, ScaledPowerRule{{1.0, 0.0}, 0.0, 0.5}}});
    const auto s = build_coefficients(sqrtp, PiecewiseFunction::constant({1.0, 0.0}, iv));
    const auto r3 = RatioSet(s).r3();
    const double integral =
        integrate([&](double t) { return r3(t); }, 0.0, 1.0, r3.breakpoints, r3.singular_points)
            .value.real();
    CHECK(integral == Approx(2.0).margin(2e-10));
}

TEST_CASE("ratio consistency r2^2 = r1 r3 at random points") {
    std::mt19937 rng(1234);
    const Interval iv{0.0, 1.0};
    std::uniform_real_distribution<double> pts(0.0, 1.0);
    for (int rep = 0; rep < 5; ++rep) {
        auto p = random_piecewise_constant(rng, iv, 3).shifted({3.0, 0.0}); // keep p away from 0
        auto q = random_piecewise_constant(rng, iv, 3);
        const RatioSet r(build_coefficients(std::move(p), std::move(q)));
        for (int k = 0; k < 100; ++k) {
            const double t = pts(rng);
            const Complex lhs = r.r2_at(t) * r.r2_at(t);
            const Complex rhs = r.r1_at(t) * r.r3_at(t);
            CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(r.r3_at(t))));
        }
    }
}

TEST_CASE("l1_distance is a pseudometric on random piecewise constants") {
    std::mt19937 rng(99);
    const Interval iv{0.0, 1.0};
    for (int rep = 0; rep < 10; ++rep) {
        const auto f = random_piecewise_constant(rng, iv, 4);
        const auto g = random_piecewise_constant(rng, iv, 4);
        const auto h = random_piecewise_constant(rng, iv, 4);
        const double fg = l1_distance(f, g, iv);
        const double gf = l1_distance(g, f, iv);
        const double fh = l1_distance(f, h, iv);
        const double hg = l1_distance(h, g, iv);
        CHECK(fg == Approx(gf).margin(1e-10));
        CHECK(fg <= fh + hg + 1e-10);
    }
}

TEST_CASE("mollified family of a unit step") {
    const Interval iv{0.0, 1.0};
    const auto q0 = PiecewiseFunction::step(iv, 0.5, {0.0, 0.0}, {1.0, 0.0});
    const auto family = mollified_family(q0, {0.2, 0.1});
    REQUIRE(family.epsilons == std::vector<double>{0.2, 0.1, 0.0});

    CHECK(family.member(0.0).Q() == q0);
    CHECK(l1_distance(family.member(0.1).Q(), q0, iv) == Approx(0.025).margin(1e-11));

    // distance is eps/4 for a unit jump, strictly decreasing in eps
    double prev = 1e300;
    for (double eps : {0.2, 0.1, 0.05}) {
        const double d = l1_distance(mollify_steps(q0, eps), q0, iv);
        CHECK(d == Approx(eps / 4.0).margin(1e-11));
        CHECK(d < prev);
        prev = d;
    }

    CHECK_THROWS_AS(mollified_family(q0, {0.1, 0.2}), ValidationError);
    CHECK_THROWS_AS(mollified_family(q0, {1.5}), ValidationError);

    // ramps of adjacent jumps must not collide
    const PiecewiseFunction q2(iv, {{0.0, 0.45, ConstantRule{{0.0, 0.0}}},
                                    {0.45, 0.55, ConstantRule{{1.0, 0.0}}},
                                    {0.55, 1.0, ConstantRule{{0.0, 0.0}}}});
    CHECK_THROWS_AS(mollified_family(q2, {0.2}), ValidationError);
    CHECK_NOTHROW(mollified_family(q2, {0.05}));
}

TEST_CASE("adjoint coefficients conjugate and are involutive") {
    const Interval iv{0.0, 1.0};
    const auto real_c = build_coefficients(PiecewiseFunction::constant({2.0, 0.0}, iv),
                                           PiecewiseFunction::step(iv, 0.5, {0.0, 0.0}, {1.0, 0.0}));
    const auto adj = adjoint_coefficients(real_c);
    CHECK(adj.p() == real_c.p());
    CHECK(adj.Q() == real_c.Q());

    const auto cplx = build_coefficients(PiecewiseFunction::constant({1.0, 0.0}, iv),
                                         PiecewiseFunction::constant({0.0, 1.0}, iv));
    CHECK(adjoint_coefficients(cplx).Q()(0.5) == Complex(0.0, -1.0));
    const auto twice = adjoint_coefficients(adjoint_coefficients(cplx));
    CHECK(twice.p() == cplx.p());
    CHECK(twice.Q() == cplx.Q());
    CHECK_FALSE(cplx.is_real());
}
