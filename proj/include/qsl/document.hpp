#pragma once

// JSON problem documents and the fixed-format CSV/JSON emitters used by the
// command-line front end. Field names are part of the wire contract; number
// output is capped at 15 significant digits so identical documents produce
// byte-identical files.

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qsl/boundary.hpp"
#include "qsl/coefficients.hpp"
#include "qsl/convergence.hpp"
#include "qsl/spectral.hpp"

namespace qsl::doc {

using json = nlohmann::json;

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

// ---------------------------------------------------------------- parsing

inline ValidationError field_error(const std::string& path, const std::string& what) {
    return ValidationError(path + ": " + what);
}

inline const json& require_field(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) throw field_error(path + "." + key, "missing field");
    return j.at(key);
}

inline double parse_real(const json& j, const std::string& path) {
    if (!j.is_number()) throw field_error(path, "expected a number");
    return j.get<double>();
}

inline int parse_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw field_error(path, "expected an integer");
    return j.get<int>();
}

/// A complex value: plain number or [re, im].
inline Complex parse_complex(const json& j, const std::string& path) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw field_error(path, "expected a number or [re, im]");
}

/// 2x2 complex matrix as [[re, im] x 4] row-major.
inline Mat2 parse_mat2(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 4)
        throw field_error(path, "expected four row-major [re, im] entries");
    Mat2 m;
    m.a = parse_complex(j[0], path + "[0]");
    m.b = parse_complex(j[1], path + "[1]");
    m.c = parse_complex(j[2], path + "[2]");
    m.d = parse_complex(j[3], path + "[3]");
    return m;
}

inline SegmentRule parse_rule(const json& j, const std::string& path) {
    const std::string kind = require_field(j, "kind", path).get<std::string>();
    if (kind == "constant") {
        return ConstantRule{parse_complex(require_field(j, "value", path), path + ".value")};
    }
    if (kind == "polynomial") {
        const json& c = require_field(j, "coeffs", path);
        if (!c.is_array() || c.empty()) throw field_error(path + ".coeffs", "expected a non-empty array");
        PolynomialRule rule;
        for (std::size_t i = 0; i < c.size(); ++i)
            rule.coeffs.push_back(parse_complex(c[i], path + ".coeffs[" + std::to_string(i) + "]"));
        return rule;
    }
    if (kind == "scaled-power") {
        ScaledPowerRule rule;
        rule.scale = parse_complex(require_field(j, "scale", path), path + ".scale");
        rule.anchor = parse_real(require_field(j, "anchor", path), path + ".anchor");
        rule.exponent = parse_real(require_field(j, "exponent", path), path + ".exponent");
        return rule;
    }
    if (kind == "mollified-step") {
        MollifiedStepRule rule;
        rule.center = parse_real(require_field(j, "center", path), path + ".center");
        rule.height = parse_complex(require_field(j, "height", path), path + ".height");
        rule.width = parse_real(require_field(j, "width", path), path + ".width");
        return rule;
    }
    throw field_error(path + ".kind", "unknown rule kind '" + kind + "'");
}

inline PiecewiseFunction parse_piecewise(const json& j, Interval iv, const std::string& path) {
    if (!j.is_array() || j.empty()) throw field_error(path, "expected a non-empty segment array");
    std::vector<Segment> segments;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string sp = path + "[" + std::to_string(i) + "]";
        const json& range = require_field(j[i], "range", sp);
        if (!range.is_array() || range.size() != 2)
            throw field_error(sp + ".range", "expected [lo, hi]");
        Segment s;
        s.lo = parse_real(range[0], sp + ".range[0]");
        s.hi = parse_real(range[1], sp + ".range[1]");
        s.rule = parse_rule(require_field(j[i], "rule", sp), sp + ".rule");
        segments.push_back(std::move(s));
    }
    try {
        return PiecewiseFunction(iv, std::move(segments));
    } catch (const ValidationError& e) {
        throw field_error(path, e.what());
    }
}

inline Coefficients parse_coefficients(const json& root, const QuadratureConfig& quad = {}) {
    const json& c = require_field(root, "coefficients", "document");
    const json& ivj = require_field(c, "interval", "coefficients");
    if (!ivj.is_array() || ivj.size() != 2)
        throw field_error("coefficients.interval", "expected [a, b]");
    Interval iv{parse_real(ivj[0], "coefficients.interval[0]"),
                parse_real(ivj[1], "coefficients.interval[1]")};
    try {
        iv.validate();
    } catch (const ValidationError& e) {
        throw field_error("coefficients.interval", e.what());
    }
    PiecewiseFunction p = parse_piecewise(require_field(c, "p", "coefficients"), iv, "coefficients.p");
    PiecewiseFunction q = parse_piecewise(require_field(c, "Q", "coefficients"), iv, "coefficients.Q");
    try {
        return Coefficients(std::move(p), std::move(q), quad);
    } catch (const ValidationError& e) {
        throw field_error("coefficients", e.what());
    }
}

/// Exactly one boundary representation: K, alpha+beta, or K_a/K_b.
struct BoundarySpec {
    std::optional<CanonicalK> k;
    std::optional<TwoPointBC> two_point;

    TwoPointBC to_two_point() const {
        return k ? canonical_to_two_point(*k) : *two_point;
    }
};

inline BoundarySpec parse_boundary(const json& root) {
    const json& b = require_field(root, "boundary", "document");
    const bool has_k = b.contains("K");
    const bool has_ab = b.contains("alpha") || b.contains("beta");
    const bool has_sep = b.contains("K_a") || b.contains("K_b");
    if (has_k + has_ab + has_sep != 1)
        throw field_error("boundary",
                          "exactly one representation required: K, alpha/beta, or K_a/K_b");
    BoundarySpec spec;
    if (has_k) {
        spec.k = CanonicalK{parse_mat2(b.at("K"), "boundary.K")};
    } else if (has_sep) {
        const Complex ka = parse_complex(require_field(b, "K_a", "boundary"), "boundary.K_a");
        const Complex kb = parse_complex(require_field(b, "K_b", "boundary"), "boundary.K_b");
        spec.k = CanonicalK{Mat2::diag(ka, kb)};
    } else {
        const Mat2 alpha = parse_mat2(require_field(b, "alpha", "boundary"), "boundary.alpha");
        const Mat2 beta = parse_mat2(require_field(b, "beta", "boundary"), "boundary.beta");
        try {
            spec.two_point = TwoPointBC(alpha, beta);
        } catch (const ValidationError& e) {
            throw field_error("boundary", e.what());
        }
    }
    return spec;
}

inline json load_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open document '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError("document '" + path + "' is not valid JSON: " + e.what());
    }
}

// ---------------------------------------------------------------- emitters

inline std::string eigenvalue_csv(const EigenvalueReport& report) {
    std::ostringstream out;
    out << "lambda_re,lambda_im,residual\n";
    for (const auto& ev : report.values)
        out << format_number(ev.lambda.real()) << ',' << format_number(ev.lambda.imag()) << ','
            << format_number(ev.residual) << '\n';
    return out.str();
}

inline std::string green_grid_json(const GreenKernel& kernel) {
    const int n = kernel.grid_size();
    const auto& vals = kernel.snapshot();
    std::ostringstream out;
    out << "{\n  \"lambda\": [" << format_number(kernel.lambda().real()) << ", "
        << format_number(kernel.lambda().imag()) << "],\n";
    auto axis = [&](const char* name) {
        out << "  \"" << name << "\": [";
        for (int i = 0; i < n; ++i) {
            if (i) out << ", ";
            out << format_number(kernel.grid_point(i, n));
        }
        out << "],\n";
    };
    axis("t");
    axis("s");
    auto matrix = [&](const char* name, bool real_part, bool last) {
        out << "  \"" << name << "\": [";
        for (int i = 0; i < n; ++i) {
            if (i) out << ",";
            out << "\n    [";
            for (int j = 0; j < n; ++j) {
                if (j) out << ", ";
                const Complex v = vals[static_cast<std::size_t>(i) * n + j];
                out << format_number(real_part ? v.real() : v.imag());
            }
            out << "]";
        }
        out << "\n  ]" << (last ? "\n" : ",\n");
    };
    matrix("gamma_re", true, false);
    matrix("gamma_im", false, true);
    out << "}\n";
    return out.str();
}

inline std::string solution_csv(const std::vector<double>& ts, const ResolventSolution& sol) {
    std::ostringstream out;
    out << "t,y_re,y_im,d1y_re,d1y_im\n";
    for (double t : ts) {
        const Complex y = sol.y(t);
        const Complex d1 = sol.d1y(t);
        out << format_number(t) << ',' << format_number(y.real()) << ','
            << format_number(y.imag()) << ',' << format_number(d1.real()) << ','
            << format_number(d1.imag()) << '\n';
    }
    return out.str();
}

inline std::string convergence_csv(const ConvergenceReport& report) {
    std::ostringstream out;
    out << "eps,c1_l1,c2_l1,c3_l1,c4_bc,kernel_gap,resolvent_bound\n";
    for (const auto& r : report.rows)
        out << format_number(r.eps) << ',' << format_number(r.c1_l1) << ','
            << format_number(r.c2_l1) << ',' << format_number(r.c3_l1) << ','
            << format_number(r.c4_bc) << ',' << format_number(r.kernel_gap) << ','
            << format_number(r.resolvent_bound) << '\n';
    return out.str();
}

inline std::string classification_json(const Classification& cls,
                                       const std::optional<SeparatedParameters>& sep) {
    std::ostringstream out;
    auto boolean = [](bool b) { return b ? "true" : "false"; };
    out << "{\n  \"selfadjoint\": " << boolean(cls.selfadjoint()) << ",\n  \"dissipative\": "
        << boolean(cls.dissipative()) << ",\n  \"separated\": " << boolean(cls.separated) << ",\n";
    auto entry = [&](const char* name, std::optional<Complex> v, bool last) {
        out << "  \"" << name << "\": ";
        if (v)
            out << '[' << format_number(v->real()) << ", " << format_number(v->imag()) << ']';
        else
            out << "null";
        out << (last ? "\n" : ",\n");
    };
    entry("K_a", sep ? std::optional<Complex>(sep->K_a) : std::nullopt, false);
    entry("K_b", sep ? std::optional<Complex>(sep->K_b) : std::nullopt, true);
    out << "}\n";
    return out.str();
}

inline std::string classification_summary(const Classification& cls) {
    std::string kind = cls.selfadjoint() ? "selfadjoint"
                       : cls.dissipative() ? "maximal dissipative"
                                           : "neither selfadjoint nor dissipative";
    return kind + (cls.separated ? ", separated" : ", coupled");
}

} // namespace qsl::doc
