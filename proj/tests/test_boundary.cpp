#include <catch2/catch_amalgamated.hpp>

#include "qsl/boundary.hpp"
#include "support.hpp"

using namespace qsl;
using Catch::Approx;

namespace {

double residual_norm(const TwoPointBC& bc, const Vec2& wa, const Vec2& wb) {
    return bc.residual(wa, wb).max_abs();
}

/// Traces satisfying the canonical condition, from the parametric form
/// Gamma1 = -i (K + I) F, Gamma2 = (K - I) F.
std::pair<Vec2, Vec2> traces_from_parameter(const Mat2& k, const Vec2& f) {
    const Vec2 g1 = (Complex(0.0, -1.0) * (k + Mat2::identity())) * f;
    const Vec2 g2 = (k - Mat2::identity()) * f;
    // Gamma1 = (D1y(a), -D1y(b)), Gamma2 = (y(a), y(b))
    return {Vec2{g2.x, g1.x}, Vec2{g2.y, -g1.y}};
}

} // namespace

TEST_CASE("gamma maps are plain substitutions") {
    const auto t1 = gamma_maps({{1.0, 0.0}, {2.0, 0.0}}, {{3.0, 0.0}, {4.0, 0.0}});
    CHECK(t1.gamma1.x == Complex(2.0, 0.0));
    CHECK(t1.gamma1.y == Complex(-4.0, 0.0));
    CHECK(t1.gamma2.x == Complex(1.0, 0.0));
    CHECK(t1.gamma2.y == Complex(3.0, 0.0));

    const auto t2 = gamma_maps({}, {});
    CHECK(t2.gamma1.max_abs() == 0.0);
    CHECK(t2.gamma2.max_abs() == 0.0);

    const auto t3 = gamma_maps({{0.0, 0.0}, {1.0, 0.0}}, {{0.0, 0.0}, {-1.0, 0.0}});
    CHECK(t3.gamma1.x == Complex(1.0, 0.0));
    CHECK(t3.gamma1.y == Complex(1.0, 0.0));
    CHECK(t3.gamma2.max_abs() == 0.0);
}

TEST_CASE("canonical conversion: identity gives Dirichlet, minus identity quasi-Neumann") {
    const auto dirichlet = canonical_to_two_point(CanonicalK{Mat2::identity()});
    // y(a) = y(b) = 0 passes, anything with nonzero endpoint values fails
    CHECK(residual_norm(dirichlet, {{0.0, 0.0}, {3.0, 0.0}}, {{0.0, 0.0}, {-2.0, 0.0}}) < 1e-14);
    CHECK(residual_norm(dirichlet, {{1.0, 0.0}, {0.0, 0.0}}, {{0.0, 0.0}, {0.0, 0.0}}) > 0.5);

    const auto neumann = canonical_to_two_point(CanonicalK{Mat2::diag(-1.0, -1.0)});
    CHECK(residual_norm(neumann, {{3.0, 0.0}, {0.0, 0.0}}, {{-2.0, 0.0}, {0.0, 0.0}}) < 1e-14);
    CHECK(residual_norm(neumann, {{0.0, 0.0}, {1.0, 0.0}}, {{0.0, 0.0}, {0.0, 0.0}}) > 0.5);
}

TEST_CASE("diagonal K produces the separated row system") {
    const Complex ka{0.3, 0.4}, kb{-0.7, 0.2};
    const auto bc = canonical_to_two_point(CanonicalK{Mat2::diag(ka, kb)});
    // row 1 touches only traces at a, row 2 only traces at b
    CHECK(std::abs(bc.beta.a) == 0.0);
    CHECK(std::abs(bc.beta.b) == 0.0);
    CHECK(std::abs(bc.alpha.c) == 0.0);
    CHECK(std::abs(bc.alpha.d) == 0.0);

    // the row at a is (K_a - 1) D1y(a) + i (K_a + 1) y(a) = 0
    const Complex ya{0.8, -0.1};
    const Complex d1ya = -Complex(0.0, 1.0) * (ka + 1.0) * ya / (ka - 1.0);
    const Vec2 wa{ya, d1ya};
    const Complex row_a = bc.alpha.a * wa.x + bc.alpha.b * wa.y;
    CHECK(std::abs(row_a) < 1e-14);
    CHECK(std::abs((ka - 1.0) * d1ya + Complex(0.0, 1.0) * (ka + 1.0) * ya) < 1e-14);
}

TEST_CASE("round trip: canonical condition annihilates exactly its trace set") {
    auto g = qsl_test::rng(314);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const Mat2 k = qsl_test::random_unitary(g);
        const auto bc = canonical_to_two_point(CanonicalK{k});
        const Vec2 f{Complex(n(g), n(g)), Complex(n(g), n(g))};
        const auto [wa, wb] = traces_from_parameter(k, f);
        CHECK(residual_norm(bc, wa, wb) < 1e-10 * (1.0 + wa.max_abs() + wb.max_abs()));

        const Vec2 ra{Complex(n(g) + 3.0, n(g)), Complex(n(g), n(g))};
        const Vec2 rb{Complex(n(g), n(g) - 3.0), Complex(n(g), n(g))};
        CHECK(residual_norm(bc, ra, rb) > 1e-3);
    }
}

TEST_CASE("zero traces satisfy every canonical condition") {
    auto g = qsl_test::rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        const auto bc = canonical_to_two_point(CanonicalK{qsl_test::random_contraction(g)});
        CHECK(residual_norm(bc, {}, {}) == 0.0);
    }
}

TEST_CASE("classification of the canonical parameters") {
    const auto ci = classify(CanonicalK{Mat2::identity()});
    CHECK(ci.kind == ExtensionKind::SelfAdjoint);
    CHECK(ci.separated);

    const auto ch = classify(CanonicalK{Mat2::diag(0.5, 0.5)});
    CHECK(ch.kind == ExtensionKind::MaximalDissipativeStrict);
    CHECK(ch.separated);

    const auto cs = classify(CanonicalK{Mat2{0.0, 1.0, 1.0, 0.0}});
    CHECK(cs.kind == ExtensionKind::SelfAdjoint);
    CHECK_FALSE(cs.separated);

    // expansive: the 2x2 singular-value formula puts sigma_max above 1
    const Mat2 shear{1.0, 0.1, 0.0, 1.0};
    const double t = 0.5 * (1.0 + 0.01 + 1.0); // tr(K* K)/2
    const double smax = std::sqrt(t + std::sqrt(t * t - 1.0));
    CHECK(smax > 1.0);
    CHECK(spectral_norm(shear) == Approx(smax).epsilon(1e-12));
    const auto ce = classify(CanonicalK{shear});
    CHECK(ce.kind == ExtensionKind::None);
    CHECK_FALSE(ce.separated);
    CHECK_FALSE(ce.dissipative());
}

TEST_CASE("diagonal iff separated on random samples") {
    auto g = qsl_test::rng(2718);
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> off(1e-2, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        const Mat2 d = Mat2::diag(Complex(n(g), n(g)), Complex(n(g), n(g)));
        CHECK(classify(CanonicalK{d}).separated);

        Mat2 c = d;
        c.b = off(g) * qsl_test::random_unit_complex(g);
        CHECK_FALSE(classify(CanonicalK{c}).separated);
    }
}

TEST_CASE("unitary K always yields a rank-2 condition set") {
    auto g = qsl_test::rng(555);
    for (int rep = 0; rep < 100; ++rep) {
        const Mat2 k = qsl_test::random_unitary(g);
        CHECK_NOTHROW(canonical_to_two_point(CanonicalK{k}));
    }
    // a directly supplied rank-deficient pair is rejected
    CHECK_THROWS_AS(TwoPointBC(Mat2{1.0, 2.0, 2.0, 4.0}, Mat2{3.0, 0.0, 6.0, 0.0}),
                    ValidationError);
}

TEST_CASE("separated parameters and endpoint self-adjointness flags") {
    const auto s1 = separated_parameters(CanonicalK{Mat2::diag(1.0, -1.0)});
    CHECK(s1.K_a == Complex(1.0, 0.0));
    CHECK(s1.K_b == Complex(-1.0, 0.0));
    CHECK(s1.selfadjoint_at_a);
    CHECK(s1.selfadjoint_at_b);

    const auto s2 = separated_parameters(CanonicalK{Mat2::diag(Complex(0.0, 1.0), 1.0)});
    CHECK(s2.selfadjoint_at_a);
    CHECK(s2.selfadjoint_at_b);

    const auto s3 = separated_parameters(CanonicalK{Mat2::diag(0.5, 1.0)});
    CHECK_FALSE(s3.selfadjoint_at_a);
    CHECK(s3.selfadjoint_at_b);

    CHECK_THROWS_AS(separated_parameters(CanonicalK{Mat2{0.0, 1.0, 1.0, 0.0}}), ValidationError);
}
