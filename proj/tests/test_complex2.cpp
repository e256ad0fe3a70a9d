#include <catch2/catch_amalgamated.hpp>

#include "qsl/complex2.hpp"

using namespace qsl;
using Catch::Approx;

TEST_CASE("2x2 arithmetic basics") {
    const Mat2 a{1.0, 2.0, 3.0, 4.0};
    const Mat2 b{Complex(0.0, 1.0), 0.0, 0.0, Complex(0.0, -1.0)};

    CHECK((a * Mat2::identity() - a).max_abs() == 0.0);
    CHECK(a.det() == Complex(-2.0, 0.0));
    CHECK(a.trace() == Complex(5.0, 0.0));
    CHECK((a * inverse(a) - Mat2::identity()).max_abs() < 1e-14);
    CHECK((b.conj_transpose() * b - Mat2::identity()).max_abs() < 1e-15);

    const Vec2 v{Complex(1.0, 0.0), Complex(0.0, 1.0)};
    const Vec2 av = a * v;
    CHECK(av.x == Complex(1.0, 2.0));
    CHECK(av.y == Complex(3.0, 4.0));
}

TEST_CASE("singular values of diagonal and rotation matrices") {
    const auto [s1, s2] = singular_values(Mat2::diag(3.0, -0.5));
    CHECK(s1 == Approx(3.0));
    CHECK(s2 == Approx(0.5));

    const double th = 0.7;
    const Mat2 rot{std::cos(th), -std::sin(th), std::sin(th), std::cos(th)};
    const auto [r1, r2] = singular_values(rot);
    CHECK(r1 == Approx(1.0));
    CHECK(r2 == Approx(1.0));
    CHECK(spectral_norm(rot) == Approx(1.0));
}

TEST_CASE("matrix exponential closed form") {
    // nilpotent: exp([[0,1],[0,0]]) = [[1,1],[0,1]]
    const Mat2 n{0.0, 1.0, 0.0, 0.0};
    CHECK((exp2(n) - Mat2{1.0, 1.0, 0.0, 1.0}).max_abs() < 1e-15);

    // rotation generator: exp([[0,1],[-1,0]] * t) has cos/sin entries
    const double t = 0.3;
    const Mat2 g = Mat2{0.0, 1.0, -1.0, 0.0} * Complex(t, 0.0);
    const Mat2 e = exp2(g);
    CHECK(std::abs(e.a - std::cos(t)) < 1e-14);
    CHECK(std::abs(e.b - std::sin(t)) < 1e-14);

    // diagonal with distinct entries
    const Mat2 d = exp2(Mat2::diag(Complex(0.2, 0.1), Complex(-0.4, 0.0)));
    CHECK(std::abs(d.a - std::exp(Complex(0.2, 0.1))) < 1e-14);
    CHECK(std::abs(d.d - std::exp(Complex(-0.4, 0.0))) < 1e-14);

    // trace-free input has unit determinant image
    const Mat2 tf{Complex(0.3, 0.2), Complex(-1.1, 0.4), Complex(0.7, 0.0), Complex(-0.3, -0.2)};
    CHECK(std::abs(exp2(tf).det() - 1.0) < 1e-13);
}

TEST_CASE("stacked rank detection") {
    const Mat2 alpha{1.0, 0.0, 0.0, 0.0};
    const Mat2 beta{0.0, 0.0, 1.0, 0.0};
    const auto [s1, s2] = stacked_singular_values(alpha, beta);
    CHECK(s1 == Approx(1.0));
    CHECK(s2 == Approx(1.0));

    // second row a multiple of the first across the stack
    const Mat2 a2{1.0, 2.0, 2.0, 4.0};
    const Mat2 b2{3.0, 0.0, 6.0, 0.0};
    const auto [t1, t2] = stacked_singular_values(a2, b2);
    CHECK(t2 / t1 < 1e-15);
}
