#pragma once

#include <utility>

#include "qsl/complex2.hpp"
#include "qsl/errors.hpp"

namespace qsl {

/// Two-point condition alpha * w(a) + beta * w(b) = 0 acting on the quasi
/// states w = (y, D1y). The stacked 2x4 matrix [alpha | beta] must have rank 2.
struct TwoPointBC {
    Mat2 alpha;
    Mat2 beta;

    TwoPointBC(Mat2 a, Mat2 b, double rank_tol = 1e-10) : alpha(a), beta(b) {
        if (!alpha.finite() || !beta.finite())
            throw ValidationError("boundary matrices must have finite entries");
        const auto [s1, s2] = stacked_singular_values(alpha, beta);
        if (!(s2 > rank_tol * std::max(s1, 1e-300)))
            throw ValidationError("boundary condition is degenerate: rank [alpha|beta] < 2");
    }

    Vec2 residual(const Vec2& w_a, const Vec2& w_b) const { return alpha * w_a + beta * w_b; }
};

/// Parameter of the canonical condition (K - I) Gamma1 y + i (K + I) Gamma2 y = 0.
struct CanonicalK {
    Mat2 K;

    explicit CanonicalK(Mat2 k) : K(k) {
        if (!K.finite()) throw ValidationError("K must have finite entries");
    }
};

/// Boundary triplet trace values for one function.
struct BoundaryTraces {
    Vec2 gamma1; // (D1y(a), -D1y(b))
    Vec2 gamma2; // (y(a), y(b))
};

/// Trace maps from the quasi states at the endpoints.
inline BoundaryTraces gamma_maps(const Vec2& w_a, const Vec2& w_b) {
    return {Vec2{w_a.y, -w_b.y}, Vec2{w_a.x, w_b.x}};
}

/// Rewrites the canonical condition in the trace variables w(a), w(b).
/// Row j:  i(K+I)_j1 y(a) + (K-I)_j1 D1y(a) + i(K+I)_j2 y(b) - (K-I)_j2 D1y(b) = 0.
inline TwoPointBC canonical_to_two_point(const CanonicalK& k) {
    const Mat2 km = k.K - Mat2::identity();
    const Mat2 kp = k.K + Mat2::identity();
    const Mat2 alpha{kI * kp.a, km.a, kI * kp.c, km.c};
    const Mat2 beta{kI * kp.b, -km.b, kI * kp.d, -km.d};
    return TwoPointBC(alpha, beta);
}

enum class ExtensionKind {
    SelfAdjoint,              // K unitary
    MaximalDissipativeStrict, // K contractive but not unitary
    None,
};

struct Classification {
    ExtensionKind kind = ExtensionKind::None;
    bool separated = false;

    bool selfadjoint() const { return kind == ExtensionKind::SelfAdjoint; }
    bool dissipative() const { return kind != ExtensionKind::None; }
};

/// Unitary iff ||K*K - I|| <= tol; contractive iff sigma_max(K) <= 1 + tol.
/// The unitary test takes precedence on the boundary of the contraction set.
/// Separated iff both off-diagonal moduli are <= tol.
inline Classification classify(const CanonicalK& k, double tol = 1e-9) {
    if (!(tol > 0.0)) throw ValidationError("classification tolerance must be positive");
    Classification out;
    const Mat2 defect = k.K.conj_transpose() * k.K - Mat2::identity();
    if (spectral_norm(defect) <= tol) {
        out.kind = ExtensionKind::SelfAdjoint;
    } else if (singular_values(k.K).first <= 1.0 + tol) {
        out.kind = ExtensionKind::MaximalDissipativeStrict;
    }
    out.separated = std::abs(k.K.b) <= tol && std::abs(k.K.c) <= tol;
    return out;
}

struct SeparatedParameters {
    Complex K_a;
    Complex K_b;
    bool selfadjoint_at_a = false; // |K_a| = 1 within tolerance
    bool selfadjoint_at_b = false;
};

/// Diagonal entries of a separated K; each endpoint condition is self-adjoint
/// iff its entry is unimodular.
inline SeparatedParameters separated_parameters(const CanonicalK& k, double tol = 1e-9) {
    if (!classify(k, tol).separated)
        throw ValidationError("separated_parameters called on a non-separated K");
    SeparatedParameters out{k.K.a, k.K.d};
    out.selfadjoint_at_a = std::abs(std::abs(out.K_a) - 1.0) <= tol;
    out.selfadjoint_at_b = std::abs(std::abs(out.K_b) - 1.0) <= tol;
    return out;
}

} // namespace qsl
