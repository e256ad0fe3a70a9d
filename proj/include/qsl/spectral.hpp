#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "qsl/boundary.hpp"
#include "qsl/coefficients.hpp"
#include "qsl/ode.hpp"

namespace qsl {

/// Memo of W(b; lambda) for fixed coefficients. Determinant evaluations at
/// distinct lambda are independent; the map is guarded so searches over many
/// boundary conditions can share one cache.
class WbCache {
public:
    WbCache(const Coefficients& c, const IntegratorConfig& cfg = {})
        : ratios_(c), cfg_(cfg) {}

    Mat2 at(Complex lambda) const {
        const std::pair<double, double> key{lambda.real(), lambda.imag()};
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = memo_.find(key);
            if (it != memo_.end()) return it->second;
        }
        const Mat2 wb = fundamental_matrix(system_matrix(ratios_, lambda), cfg_).at_b();
        std::lock_guard<std::mutex> lock(mu_);
        memo_.emplace(key, wb);
        return wb;
    }

    const RatioSet& ratio_set() const { return ratios_; }
    const IntegratorConfig& config() const { return cfg_; }
    std::size_t size() const {
        std::lock_guard<std::mutex> lock(mu_);
        return memo_.size();
    }

private:
    RatioSet ratios_;
    IntegratorConfig cfg_;
    mutable std::map<std::pair<double, double>, Mat2> memo_;
    mutable std::mutex mu_;
};

/// Delta(lambda) = det(alpha + beta W(b; lambda)); zeros are the eigenvalues
/// of the two-point problem.
class CharacteristicDeterminant {
public:
    CharacteristicDeterminant(TwoPointBC bc, const Coefficients& c,
                              const IntegratorConfig& cfg = {},
                              std::shared_ptr<WbCache> cache = nullptr)
        : bc_(bc), cache_(cache ? std::move(cache) : std::make_shared<WbCache>(c, cfg)) {}

    Complex operator()(Complex lambda) const {
        return (bc_.alpha + bc_.beta * cache_->at(lambda)).det();
    }

    const TwoPointBC& bc() const { return bc_; }
    const std::shared_ptr<WbCache>& cache() const { return cache_; }

private:
    TwoPointBC bc_;
    std::shared_ptr<WbCache> cache_;
};

inline Complex characteristic_determinant(const TwoPointBC& bc, const Coefficients& c,
                                          Complex lambda, const IntegratorConfig& cfg = {}) {
    return CharacteristicDeterminant(bc, c, cfg)(lambda);
}

struct RealWindow {
    double lo = 0.0;
    double hi = 1.0;
};

struct ComplexRectangle {
    double re_lo = 0.0, re_hi = 1.0;
    double im_lo = -1.0, im_hi = 1.0;
};

struct Eigenvalue {
    Complex lambda;
    double residual = 0.0;         // |Delta(lambda)| / scale
    bool possibly_multiple = false; // |Delta'| small at the root
    bool near_boundary = false;     // within one grid step of the window edge
};

struct EigenvalueReport {
    std::vector<Eigenvalue> values;
    double window_re_lo = 0.0, window_re_hi = 0.0; // search window
    double window_im_lo = 0.0, window_im_hi = 0.0; // zero span for real scans
    double grid_step = 0.0;
    double scale = 1.0;                // normalization max(1, |Delta| on window boundary)
    std::vector<Complex> suspected;    // dips that did not polish to a confirmed zero
};

struct EigenSearchConfig {
    int grid = 0;                    // scan points per axis; 0 = automatic
    double residual_tol = 1e-9;      // relative to max(1, boundary |Delta|)
    double dip_rel_threshold = 1e-4; // |Delta|/sup dip considered a candidate
    int newton_max_iter = 60;
    double fd_step = 1e-6; // relative step for the central-difference Delta'
};

namespace detail {

inline Complex det_derivative(const CharacteristicDeterminant& det, Complex lambda, double rel) {
    const double h = rel * (1.0 + std::abs(lambda));
    return (det(lambda + h) - det(lambda - h)) / (2.0 * h);
}

/// Even-order zero probe: around a double root the centered samples nearly
/// coincide, around a simple root they nearly cancel, so the normalized slope
/// separates the two by orders of magnitude regardless of scaling.
inline bool probably_multiple(const CharacteristicDeterminant& det, Complex lambda) {
    const double h = 1e-4 * (1.0 + std::abs(lambda));
    const Complex up = det(lambda + h);
    const Complex dn = det(lambda - h);
    const double denom = std::abs(up) + std::abs(dn);
    if (denom == 0.0) return true;
    return std::abs(up - dn) / denom < 0.05;
}

/// Complex Newton iteration; returns true when |Delta| drops below tol.
inline bool newton_polish(const CharacteristicDeterminant& det, Complex& lambda, double tol,
                          const EigenSearchConfig& cfg, double escape_radius, Complex center) {
    for (int it = 0; it < cfg.newton_max_iter; ++it) {
        const Complex v = det(lambda);
        if (std::abs(v) <= tol) return true;
        const Complex dv = det_derivative(det, lambda, cfg.fd_step);
        if (dv == Complex{0.0, 0.0}) return false;
        const Complex step = v / dv;
        lambda -= step;
        if (std::abs(lambda - center) > escape_radius) return false;
        if (std::abs(step) < 1e-15 * (1.0 + std::abs(lambda))) return std::abs(det(lambda)) <= tol;
    }
    return std::abs(det(lambda)) <= tol;
}

inline void sort_dedupe(std::vector<Eigenvalue>& vals) {
    std::sort(vals.begin(), vals.end(), [](const Eigenvalue& x, const Eigenvalue& y) {
        if (x.lambda.real() != y.lambda.real()) return x.lambda.real() < y.lambda.real();
        return x.lambda.imag() < y.lambda.imag();
    });
    std::vector<Eigenvalue> out;
    for (const auto& v : vals) {
        if (!out.empty() &&
            std::abs(v.lambda - out.back().lambda) <= 1e-8 * (1.0 + std::abs(v.lambda))) {
            if (v.residual < out.back().residual) out.back() = v;
            continue;
        }
        out.push_back(v);
    }
    vals = std::move(out);
}

} // namespace detail

/// Real-window eigenvalue scan: uniform sampling, sign-change bracketing of a
/// phase-normalized determinant, bisection, then complex Newton polish. Dips
/// of |Delta| without a sign change are polished too (possible even-order
/// zeros) and reported as suspected when they fail to confirm.
inline EigenvalueReport eigenvalues(const TwoPointBC& bc, const Coefficients& c,
                                    const RealWindow& window, const EigenSearchConfig& cfg = {},
                                    const IntegratorConfig& icfg = {},
                                    std::shared_ptr<WbCache> cache = nullptr) {
    if (!(window.lo < window.hi)) throw ValidationError("eigenvalue window is empty");
    const CharacteristicDeterminant det(bc, c, icfg, std::move(cache));
    const double len = window.hi - window.lo;
    const int n = cfg.grid > 0 ? std::max(cfg.grid, 8)
                               : std::clamp(static_cast<int>(std::ceil(20.0 * len)) + 1, 201, 4001);
    const double step = len / (n - 1);

    std::vector<Complex> d(n);
    double sup = 0.0;
    for (int i = 0; i < n; ++i) {
        d[i] = det(window.lo + step * i);
        sup = std::max(sup, std::abs(d[i]));
    }
    if (sup == 0.0) throw NumericalError("characteristic determinant vanishes on the whole grid");
    const double boundary = std::max(std::abs(d.front()), std::abs(d.back()));
    const double scale = std::max(1.0, boundary);
    const double thr = cfg.residual_tol * scale;

    EigenvalueReport report;
    report.window_re_lo = window.lo;
    report.window_re_hi = window.hi;
    report.grid_step = step;
    report.scale = scale;

    std::vector<bool> bracketed(n, false);
    auto polish_and_add = [&](Complex seed, bool require_tol) {
        Complex lam = seed;
        if (!detail::newton_polish(det, lam, 1e-3 * thr, cfg, 10.0 * len + 10.0,
                                   Complex(0.5 * (window.lo + window.hi), 0.0))) {
            const double res = std::abs(det(lam));
            if (res > thr) {
                if (require_tol)
                    throw NumericalError("eigenvalue polish did not reach the residual tolerance");
                report.suspected.push_back(seed);
                return;
            }
        }
        if (lam.real() < window.lo - step || lam.real() > window.hi + step ||
            std::abs(lam.imag()) > step)
            return; // converged to a zero outside the window
        Eigenvalue ev;
        ev.lambda = lam;
        ev.residual = std::abs(det(lam)) / scale;
        ev.possibly_multiple = detail::probably_multiple(det, lam);
        ev.near_boundary =
            lam.real() < window.lo + step || lam.real() > window.hi - step;
        report.values.push_back(ev);
    };

    for (int i = 0; i + 1 < n; ++i) {
        const double m0 = std::abs(d[i]);
        if (m0 == 0.0) {
            bracketed[i] = true;
            polish_and_add(window.lo + step * i, true);
            continue;
        }
        const Complex phase = d[i] / m0;
        if ((d[i + 1] * std::conj(phase)).real() >= 0.0) continue;
        bracketed[i] = true;
        // bisection on the phase-normalized real part
        double lo = window.lo + step * i, hi = lo + step;
        double glo = m0;
        for (int it = 0; it < 60 && hi - lo > 1e-14 * (1.0 + std::abs(lo)); ++it) {
            const double mid = 0.5 * (lo + hi);
            const double gm = (det(mid) * std::conj(phase)).real();
            if ((gm >= 0.0) == (glo >= 0.0)) {
                lo = mid;
                glo = gm;
            } else {
                hi = mid;
            }
        }
        polish_and_add(Complex(0.5 * (lo + hi), 0.0), true);
    }

    // dips of |Delta| without a sign change; the window endpoints join as
    // candidates so a zero touching the boundary is reported, not dropped
    for (int i = 0; i < n; ++i) {
        const bool endpoint = i == 0 || i == n - 1;
        if (!endpoint && (bracketed[i] || bracketed[i - 1])) continue;
        const double m = std::abs(d[i]);
        if (m > cfg.dip_rel_threshold * sup) continue;
        if (!endpoint && (m >= std::abs(d[i - 1]) || m >= std::abs(d[i + 1]))) continue;
        polish_and_add(window.lo + step * i, false);
    }

    detail::sort_dedupe(report.values);
    return report;
}

/// Complex-rectangle search: |Delta| local minima on a coarse grid seed a
/// complex Newton iteration with central-difference derivative.
inline EigenvalueReport eigenvalues(const TwoPointBC& bc, const Coefficients& c,
                                    const ComplexRectangle& rect,
                                    const EigenSearchConfig& cfg = {},
                                    const IntegratorConfig& icfg = {},
                                    std::shared_ptr<WbCache> cache = nullptr) {
    if (!(rect.re_lo < rect.re_hi) || !(rect.im_lo < rect.im_hi))
        throw ValidationError("eigenvalue rectangle is empty");
    const CharacteristicDeterminant det(bc, c, icfg, std::move(cache));
    const double len_re = rect.re_hi - rect.re_lo;
    const double len_im = rect.im_hi - rect.im_lo;
    const int n_re = cfg.grid > 0
                         ? std::max(cfg.grid, 4)
                         : std::clamp(static_cast<int>(std::ceil(len_re / 0.5)) + 1, 31, 301);
    const int n_im = cfg.grid > 0
                         ? std::max(cfg.grid / 8, 4)
                         : std::clamp(static_cast<int>(std::ceil(len_im / 0.25)) + 1, 5, 81);
    const double step_re = len_re / (n_re - 1);
    const double step_im = len_im / (n_im - 1);

    std::vector<double> mag(static_cast<std::size_t>(n_re) * n_im);
    double sup = 0.0, boundary = 0.0;
    for (int j = 0; j < n_im; ++j)
        for (int i = 0; i < n_re; ++i) {
            const Complex lam(rect.re_lo + step_re * i, rect.im_lo + step_im * j);
            const double m = std::abs(det(lam));
            mag[static_cast<std::size_t>(j) * n_re + i] = m;
            sup = std::max(sup, m);
            if (i == 0 || j == 0 || i == n_re - 1 || j == n_im - 1) boundary = std::max(boundary, m);
        }
    if (sup == 0.0) throw NumericalError("characteristic determinant vanishes on the whole grid");
    const double scale = std::max(1.0, boundary);
    const double thr = cfg.residual_tol * scale;

    EigenvalueReport report;
    report.window_re_lo = rect.re_lo;
    report.window_re_hi = rect.re_hi;
    report.window_im_lo = rect.im_lo;
    report.window_im_hi = rect.im_hi;
    report.grid_step = std::max(step_re, step_im);
    report.scale = scale;

    const Complex center(0.5 * (rect.re_lo + rect.re_hi), 0.5 * (rect.im_lo + rect.im_hi));
    const double escape = 10.0 * (len_re + len_im) + 10.0;
    for (int j = 0; j < n_im; ++j)
        for (int i = 0; i < n_re; ++i) {
            const double m = mag[static_cast<std::size_t>(j) * n_re + i];
            bool is_min = true;
            for (int dj = -1; dj <= 1 && is_min; ++dj)
                for (int di = -1; di <= 1; ++di) {
                    if (di == 0 && dj == 0) continue;
                    const int ii = i + di, jj = j + dj;
                    if (ii < 0 || jj < 0 || ii >= n_re || jj >= n_im) continue;
                    if (mag[static_cast<std::size_t>(jj) * n_re + ii] < m) {
                        is_min = false;
                        break;
                    }
                }
            if (!is_min) continue;
            Complex lam(rect.re_lo + step_re * i, rect.im_lo + step_im * j);
            const Complex seed = lam;
            if (!detail::newton_polish(det, lam, 1e-3 * thr, cfg, escape, center) &&
                std::abs(det(lam)) > thr) {
                if (m <= cfg.dip_rel_threshold * sup) report.suspected.push_back(seed);
                continue;
            }
            if (lam.real() < rect.re_lo - step_re || lam.real() > rect.re_hi + step_re ||
                lam.imag() < rect.im_lo - step_im || lam.imag() > rect.im_hi + step_im)
                continue;
            Eigenvalue ev;
            ev.lambda = lam;
            ev.residual = std::abs(det(lam)) / scale;
            ev.possibly_multiple = detail::probably_multiple(det, lam);
            ev.near_boundary = lam.real() < rect.re_lo + step_re ||
                               lam.real() > rect.re_hi - step_re ||
                               lam.imag() < rect.im_lo + step_im ||
                               lam.imag() > rect.im_hi - step_im;
            report.values.push_back(ev);
        }

    detail::sort_dedupe(report.values);
    return report;
}

/// Canonical-form entry points; the canonical parametrization requires
/// real-valued coefficients.
inline void require_real_for_canonical(const Coefficients& c) {
    if (!c.is_real())
        throw ValidationError("the canonical boundary form requires real-valued p and Q");
}

template <class Window>
EigenvalueReport eigenvalues(const CanonicalK& k, const Coefficients& c, const Window& window,
                             const EigenSearchConfig& cfg = {}, const IntegratorConfig& icfg = {},
                             std::shared_ptr<WbCache> cache = nullptr) {
    require_real_for_canonical(c);
    return eigenvalues(canonical_to_two_point(k), c, window, cfg, icfg, std::move(cache));
}

/// Variation-of-constants kernel of the system boundary problem:
/// G(t,s) = W(t) D^-1 alpha W(s)^-1 for s <= t and -W(t) D^-1 beta W(b) W(s)^-1
/// for s > t, with D = alpha + beta W(b).
class GreenMatrixKernel {
public:
    GreenMatrixKernel(std::shared_ptr<const FundamentalMatrix> w, Mat2 p_lower, Mat2 n_upper,
                      std::vector<double> mesh)
        : w_(std::move(w)), p_(p_lower), n_(n_upper), mesh_(std::move(mesh)) {}

    Mat2 eval(double t, double s) const {
        const Mat2 wt = w_->eval(t);
        const Mat2 ws_inv = inverse(w_->eval(s));
        return (s <= t ? wt * p_ : wt * n_) * ws_inv;
    }

    Complex gamma(double t, double s) const { return -eval(t, s).b; }

    Complex lambda() const { return w_->lambda(); }
    const Interval& interval() const { return w_->interval(); }
    const std::vector<double>& mesh() const { return mesh_; }
    const FundamentalMatrix& fundamental() const { return *w_; }
    const Mat2& lower_factor() const { return p_; }
    const Mat2& upper_factor() const { return n_; }

private:
    std::shared_ptr<const FundamentalMatrix> w_;
    Mat2 p_; // D^-1 alpha
    Mat2 n_; // -D^-1 beta W(b)
    std::vector<double> mesh_;
};

inline GreenMatrixKernel green_matrix(const TwoPointBC& bc, const Coefficients& c, Complex lambda,
                                      const IntegratorConfig& cfg = {},
                                      double degeneracy_tol = 1e-12) {
    auto w = std::make_shared<FundamentalMatrix>(
        fundamental_matrix(system_matrix(RatioSet(c), lambda), cfg));
    const Mat2 wb = w->at_b();
    const Mat2 d = bc.alpha + bc.beta * wb;
    const auto [s1, s2] = singular_values(d);
    if (!(s2 > degeneracy_tol * std::max(s1, 1e-300)))
        throw NumericalError("lambda is at or near an eigenvalue: boundary matrix is singular");
    const Mat2 dinv = inverse(d);
    const Mat2 n_upper = Complex(-1.0, 0.0) * (dinv * bc.beta * wb);
    return GreenMatrixKernel(std::move(w), dinv * bc.alpha, n_upper, c.mesh());
}

inline GreenMatrixKernel green_matrix(const CanonicalK& k, const Coefficients& c, Complex lambda,
                                      const IntegratorConfig& cfg = {},
                                      double degeneracy_tol = 1e-12) {
    require_real_for_canonical(c);
    return green_matrix(canonical_to_two_point(k), c, lambda, cfg, degeneracy_tol);
}

/// Scalar Green function Gamma(t, s) = -g12(t, s) of the semi-homogeneous
/// problem, with an n-by-n grid snapshot for sup-norm work.
class GreenKernel {
public:
    GreenKernel(GreenMatrixKernel matrix, int grid_n = 201)
        : matrix_(std::move(matrix)), grid_n_(grid_n) {
        if (grid_n_ < 2) throw ValidationError("kernel grid must have at least 2 points");
        snapshot_ = grid_values(grid_n_);
    }

    Complex at(double t, double s) const { return matrix_.gamma(t, s); }
    Complex operator()(double t, double s) const { return at(t, s); }

    Complex lambda() const { return matrix_.lambda(); }
    const Interval& interval() const { return matrix_.interval(); }
    const GreenMatrixKernel& matrix() const { return matrix_; }
    int grid_size() const { return grid_n_; }
    const std::vector<Complex>& snapshot() const { return snapshot_; } // row-major [it][is]

    double grid_point(int i, int n) const {
        const Interval& iv = interval();
        return iv.a + iv.length() * i / (n - 1);
    }

    /// Row-major n*n samples of Gamma on the uniform grid; W(t) and W(s)^-1
    /// are computed once per grid line.
    std::vector<Complex> grid_values(int n) const {
        std::vector<Mat2> lower(n), upper(n), sinv(n);
        for (int i = 0; i < n; ++i) {
            const Mat2 wt = matrix_.fundamental().eval(grid_point(i, n));
            lower[i] = wt * matrix_.lower_factor();
            upper[i] = wt * matrix_.upper_factor();
            sinv[i] = inverse(wt);
        }
        std::vector<Complex> out(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const Mat2& left = j <= i ? lower[i] : upper[i];
                const Mat2& r = sinv[j];
                out[static_cast<std::size_t>(i) * n + j] = -(left.a * r.b + left.b * r.d);
            }
        return out;
    }

    double sup_abs() const {
        double m = 0.0;
        for (const Complex& v : snapshot_) m = std::max(m, std::abs(v));
        return m;
    }

    /// sup |Gamma(t,s) - conj(Gamma(s,t))| over the snapshot grid; zero for a
    /// self-adjoint problem at a real non-eigenvalue lambda.
    double symmetry_defect() const {
        double m = 0.0;
        for (int i = 0; i < grid_n_; ++i)
            for (int j = 0; j < grid_n_; ++j)
                m = std::max(m, std::abs(snapshot_[static_cast<std::size_t>(i) * grid_n_ + j] -
                                         std::conj(snapshot_[static_cast<std::size_t>(j) * grid_n_ +
                                                             i])));
        return m;
    }

private:
    GreenMatrixKernel matrix_;
    int grid_n_;
    std::vector<Complex> snapshot_;
};

inline GreenKernel green_function(GreenMatrixKernel matrix, int grid_n = 201) {
    return GreenKernel(std::move(matrix), grid_n);
}

inline GreenKernel green_function(const TwoPointBC& bc, const Coefficients& c, Complex lambda,
                                  const IntegratorConfig& cfg = {}, int grid_n = 201) {
    return GreenKernel(green_matrix(bc, c, lambda, cfg), grid_n);
}

/// Resolvent image and its first quasi-derivative.
struct ResolventSolution {
    std::function<Complex(double)> y;
    std::function<Complex(double)> d1y;
};

namespace detail {

inline std::vector<double> resolvent_mesh(std::span<const double> kernel_mesh,
                                          std::span<const double> f_breaks) {
    std::vector<double> brk(kernel_mesh.begin(), kernel_mesh.end());
    brk.insert(brk.end(), f_breaks.begin(), f_breaks.end());
    return brk;
}

} // namespace detail

/// y(t) = integral of Gamma(t, s) f(s) ds by composite Gauss-Legendre split
/// at s = t and at coefficient/f breakpoints.
inline std::function<Complex(double)> resolvent_apply(const GreenKernel& kernel,
                                                      const MeshedFunction& f) {
    const Interval iv = kernel.interval();
    auto brk = detail::resolvent_mesh(kernel.matrix().mesh(), f.breakpoints);
    const double width = iv.length() / 8.0;
    const GreenMatrixKernel matrix = kernel.matrix();
    auto ff = f.f;
    return [iv, brk, width, matrix, ff](double t) {
        std::vector<double> cuts = brk;
        cuts.push_back(t);
        const auto cells = composite_cells(iv.a, iv.b, cuts, width);
        const Mat2 wt = matrix.fundamental().eval(t);
        const Mat2 lo = wt * matrix.lower_factor();
        const Mat2 up = wt * matrix.upper_factor();
        return composite_gl10(
            [&](double s) {
                const Mat2 sinv = inverse(matrix.fundamental().eval(s));
                const Mat2& left = s <= t ? lo : up;
                return -(left.a * sinv.b + left.b * sinv.d) * ff(s);
            },
            cells);
    };
}

/// Both components of w(t) = integral of G(t, s) (0, -f(s)) ds:
/// y = D0 y and D1 y come from the kernel's second column.
inline ResolventSolution resolvent_apply_state(const GreenMatrixKernel& matrix,
                                               const MeshedFunction& f) {
    const Interval iv = matrix.interval();
    auto brk = detail::resolvent_mesh(matrix.mesh(), f.breakpoints);
    const double width = iv.length() / 8.0;
    auto ff = f.f;
    auto state = [iv, brk, width, matrix, ff](double t) {
        std::vector<double> cuts = brk;
        cuts.push_back(t);
        const auto cells = composite_cells(iv.a, iv.b, cuts, width);
        const Mat2 wt = matrix.fundamental().eval(t);
        const Mat2 lo = wt * matrix.lower_factor();
        const Mat2 up = wt * matrix.upper_factor();
        return composite_gl10(
            [&](double s) {
                const Mat2 sinv = inverse(matrix.fundamental().eval(s));
                const Mat2& left = s <= t ? lo : up;
                const Mat2 g = left * sinv;
                const Complex fv = ff(s);
                return Vec2{-g.b * fv, -g.d * fv};
            },
            cells);
    };
    return ResolventSolution{
        [state](double t) { return state(t).x; },
        [state](double t) { return state(t).y; },
    };
}

/// Boundary problem l[y] = lambda y + h with the lambda-dependent canonical
/// condition of a generalized resolvent; K(lambda) must be contractive and
/// Im(lambda) < 0. Regularity of K in the lower half-plane is the caller's
/// responsibility; only contractivity is checked per evaluation.
inline ResolventSolution generalized_resolvent_apply(
    const std::function<Mat2(Complex)>& k_of_lambda, Complex lambda, const MeshedFunction& h,
    const Coefficients& c, const IntegratorConfig& cfg = {}, double contraction_tol = 1e-9) {
    if (!(lambda.imag() < 0.0))
        throw ValidationError("generalized resolvent requires Im(lambda) < 0");
    require_real_for_canonical(c);
    const Mat2 k = k_of_lambda(lambda);
    if (!k.finite()) throw ValidationError("K(lambda) has non-finite entries");
    if (singular_values(k).first > 1.0 + contraction_tol)
        throw ValidationError("contractivity violation: ||K(lambda)|| > 1");
    GreenMatrixKernel kernel = [&] {
        try {
            return green_matrix(canonical_to_two_point(CanonicalK{k}), c, lambda, cfg);
        } catch (const NumericalError&) {
            throw NumericalError(
                "boundary matrix degenerate below the real axis for contractive K; "
                "this indicates integration inaccuracy");
        }
    }();
    return resolvent_apply_state(kernel, h);
}

/// A few Newton steps from lambda toward the nearest determinant zero;
/// used for diagnostics when a requested lambda collides with the spectrum.
inline Complex nearest_eigenvalue_estimate(const CharacteristicDeterminant& det, Complex lambda,
                                           int iterations = 12) {
    Complex lam = lambda;
    for (int i = 0; i < iterations; ++i) {
        const Complex v = det(lam);
        const Complex dv = detail::det_derivative(det, lam, 1e-6);
        if (dv == Complex{0.0, 0.0}) break;
        const Complex step = v / dv;
        lam -= step;
        if (std::abs(step) < 1e-12 * (1.0 + std::abs(lam))) break;
    }
    return lam;
}

} // namespace qsl
