// Command-line front end: spectra, Green kernels, resolvent application,
// boundary-condition classification, and the resolvent-convergence harness,
// all driven by JSON problem documents.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qsl/document.hpp"
#include "qsl/qsl.hpp"

namespace {

using namespace qsl;
using qsl::doc::json;

struct Options {
    std::string doc_path;
    std::string out;
    int grid = 0;
    double tol = 0.0;
};

json task_of(const json& doc) { return doc.value("task", json::object()); }

void write_output(const std::string& content, const Options& opt, const json& doc) {
    std::string path = opt.out;
    if (path.empty() && doc.contains("output") && doc.at("output").contains("path"))
        path = doc.at("output").at("path").get<std::string>();
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open output file '" + path + "'");
    out << content;
    std::cout << "wrote " << path << "\n";
}

MeshedFunction parse_rhs(const json& task, const Interval& iv) {
    if (!task.contains("f")) throw doc::field_error("task.f", "missing field");
    const json& f = task.at("f");
    if (f.is_string()) {
        const std::string name = f.get<std::string>();
        if (name == "zero") return PiecewiseFunction::constant({0.0, 0.0}, iv);
        if (name == "one") return PiecewiseFunction::constant({1.0, 0.0}, iv);
        if (name == "linear")
            return PiecewiseFunction(iv, {{iv.a, iv.b, PolynomialRule{{{0.0, 0.0}, {1.0, 0.0}}}}});
        throw doc::field_error("task.f", "unknown preset '" + name + "'");
    }
    return doc::parse_piecewise(f, iv, "task.f");
}

int cmd_spectrum(const Options& opt) {
    const json doc = doc::load_document(opt.doc_path);
    const Coefficients coeffs = doc::parse_coefficients(doc);
    const auto boundary = doc::parse_boundary(doc);
    const json task = task_of(doc);

    if (!task.contains("window")) throw doc::field_error("task.window", "missing field");
    const json& wj = task.at("window");

    EigenSearchConfig cfg;
    if (opt.grid > 0)
        cfg.grid = opt.grid;
    else if (task.contains("grid"))
        cfg.grid = doc::parse_int(task.at("grid"), "task.grid");
    if (opt.tol > 0.0) cfg.residual_tol = opt.tol;

    EigenvalueReport report;
    if (wj.is_array() && wj.size() == 2) {
        const RealWindow window{doc::parse_real(wj[0], "task.window[0]"),
                                doc::parse_real(wj[1], "task.window[1]")};
        report = boundary.k ? eigenvalues(*boundary.k, coeffs, window, cfg)
                            : eigenvalues(*boundary.two_point, coeffs, window, cfg);
    } else if (wj.is_object()) {
        const json& re = doc::require_field(wj, "re", "task.window");
        const json& im = doc::require_field(wj, "im", "task.window");
        const ComplexRectangle rect{doc::parse_real(re[0], "task.window.re[0]"),
                                    doc::parse_real(re[1], "task.window.re[1]"),
                                    doc::parse_real(im[0], "task.window.im[0]"),
                                    doc::parse_real(im[1], "task.window.im[1]")};
        report = boundary.k ? eigenvalues(*boundary.k, coeffs, rect, cfg)
                            : eigenvalues(*boundary.two_point, coeffs, rect, cfg);
    } else {
        throw doc::field_error("task.window", "expected [lo, hi] or {re: [..], im: [..]}");
    }

    std::cout << "found " << report.values.size() << " eigenvalue(s)";
    if (boundary.k)
        std::cout << "; boundary: " << doc::classification_summary(classify(*boundary.k));
    std::cout << "\n";
    if (!report.suspected.empty())
        std::cout << "warning: " << report.suspected.size()
                  << " unconfirmed determinant dip(s); grid may be too coarse\n";

    write_output(doc::eigenvalue_csv(report), opt, doc);
    return 0;
}

GreenMatrixKernel build_kernel(const doc::BoundarySpec& boundary, const Coefficients& coeffs,
                               Complex lambda) {
    try {
        return boundary.k ? green_matrix(*boundary.k, coeffs, lambda)
                          : green_matrix(*boundary.two_point, coeffs, lambda);
    } catch (const NumericalError&) {
        const CharacteristicDeterminant det(boundary.to_two_point(), coeffs);
        const Complex est = nearest_eigenvalue_estimate(det, lambda);
        throw NumericalError("lambda collides with the spectrum; nearest eigenvalue estimate (" +
                             doc::format_number(est.real()) + ", " +
                             doc::format_number(est.imag()) + ")");
    }
}

int cmd_green(const Options& opt) {
    const json doc = doc::load_document(opt.doc_path);
    const Coefficients coeffs = doc::parse_coefficients(doc);
    const auto boundary = doc::parse_boundary(doc);
    const json task = task_of(doc);

    if (!task.contains("lambda")) throw doc::field_error("task.lambda", "missing field");
    const Complex lambda = doc::parse_complex(task.at("lambda"), "task.lambda");
    int grid = 201;
    if (opt.grid > 0)
        grid = opt.grid;
    else if (task.contains("grid"))
        grid = doc::parse_int(task.at("grid"), "task.grid");

    const GreenKernel kernel(build_kernel(boundary, coeffs, lambda), grid);
    std::cout << "sup|Gamma| = " << doc::format_number(kernel.sup_abs())
              << "; symmetry defect = " << doc::format_number(kernel.symmetry_defect()) << "\n";
    write_output(doc::green_grid_json(kernel), opt, doc);
    return 0;
}

int cmd_resolve(const Options& opt) {
    const json doc = doc::load_document(opt.doc_path);
    const Coefficients coeffs = doc::parse_coefficients(doc);
    const auto boundary = doc::parse_boundary(doc);
    const json task = task_of(doc);

    if (!task.contains("lambda")) throw doc::field_error("task.lambda", "missing field");
    const Complex lambda = doc::parse_complex(task.at("lambda"), "task.lambda");
    const MeshedFunction f = parse_rhs(task, coeffs.interval());

    int samples = 101;
    if (opt.grid > 0)
        samples = opt.grid;
    else if (task.contains("grid"))
        samples = doc::parse_int(task.at("grid"), "task.grid");
    if (samples < 2) throw doc::field_error("task.grid", "need at least 2 samples");

    // A contraction below the real axis goes through the generalized-resolvent
    // boundary problem; everything else through the in-space kernel.
    ResolventSolution sol = [&] {
        if (boundary.k && lambda.imag() < 0.0 && !classify(*boundary.k).selfadjoint())
            return generalized_resolvent_apply([&](Complex) { return boundary.k->K; }, lambda, f,
                                               coeffs);
        return resolvent_apply_state(build_kernel(boundary, coeffs, lambda), f);
    }();

    std::vector<double> ts(samples);
    const Interval iv = coeffs.interval();
    for (int i = 0; i < samples; ++i) ts[i] = iv.a + iv.length() * i / (samples - 1);

    // residual check through the system form: reintegrate from the computed
    // initial state and compare
    const auto a = system_matrix(RatioSet(coeffs), lambda);
    const Trajectory shot = solve_cauchy(a, f, iv.a, Vec2{sol.y(iv.a), sol.d1y(iv.a)});
    double residual = 0.0;
    for (double t : ts)
        residual = std::max(residual, std::abs(shot.eval(t).x - sol.y(t)));
    std::cout << "system residual at samples = " << doc::format_number(residual) << "\n";

    write_output(doc::solution_csv(ts, sol), opt, doc);
    return 0;
}

int cmd_classify(const Options& opt) {
    const json doc = doc::load_document(opt.doc_path);
    const auto boundary = doc::parse_boundary(doc);
    if (!boundary.k)
        throw ValidationError(
            "boundary: classification requires the canonical form (K or K_a/K_b)");
    const json task = task_of(doc);
    double tol = 1e-9;
    if (opt.tol > 0.0)
        tol = opt.tol;
    else if (task.contains("tol"))
        tol = doc::parse_real(task.at("tol"), "task.tol");

    const Classification cls = classify(*boundary.k, tol);
    std::optional<SeparatedParameters> sep;
    if (cls.separated) sep = separated_parameters(*boundary.k, tol);
    std::cout << doc::classification_summary(cls) << "\n";
    write_output(doc::classification_json(cls, sep), opt, doc);
    return 0;
}

int cmd_converge(const Options& opt) {
    const json doc = doc::load_document(opt.doc_path);
    const Coefficients base = doc::parse_coefficients(doc);
    const auto boundary = doc::parse_boundary(doc);
    const json task = task_of(doc);

    if (!task.contains("eps")) throw doc::field_error("task.eps", "missing field");
    const json& ej = task.at("eps");
    if (!ej.is_array() || ej.empty())
        throw doc::field_error("task.eps", "expected a non-empty array");
    std::vector<double> eps;
    for (std::size_t i = 0; i < ej.size(); ++i) {
        eps.push_back(doc::parse_real(ej[i], "task.eps[" + std::to_string(i) + "]"));
        if (eps.back() <= 0.0)
            throw doc::field_error("task.eps", "widths must be positive (0 is added automatically)");
        if (i > 0 && eps[i] >= eps[i - 1])
            throw doc::field_error("task.eps", "widths must be strictly decreasing");
    }

    const double p_rate =
        task.contains("p_inflation") ? doc::parse_real(task.at("p_inflation"), "task.p_inflation")
                                     : 0.0;
    std::optional<Mat2> alpha_rate, beta_rate;
    if (task.contains("alpha_rate"))
        alpha_rate = doc::parse_mat2(task.at("alpha_rate"), "task.alpha_rate");
    if (task.contains("beta_rate"))
        beta_rate = doc::parse_mat2(task.at("beta_rate"), "task.beta_rate");

    const PiecewiseFunction p0 = base.p();
    const PiecewiseFunction q0 = base.Q();
    try {
        mollify_steps(q0, eps.front()); // feasibility of the widest ramp
    } catch (const ValidationError& e) {
        throw doc::field_error("task.eps", e.what());
    }
    std::vector<double> all = eps;
    all.push_back(0.0);
    CoefficientFamily family(std::move(all), [p0, q0, p_rate](double e) {
        return Coefficients(p0.scaled({1.0 + p_rate * e, 0.0}), mollify_steps(q0, e));
    });
    const TwoPointBC bc0 = boundary.to_two_point();
    auto bc_family = [bc0, alpha_rate, beta_rate](double e) {
        Mat2 alpha = bc0.alpha;
        Mat2 beta = bc0.beta;
        if (alpha_rate) alpha = alpha + Complex(e, 0.0) * (*alpha_rate);
        if (beta_rate) beta = beta + Complex(e, 0.0) * (*beta_rate);
        return TwoPointBC(alpha, beta);
    };

    ConvergenceCase cs{std::move(family), bc_family,
                       task.contains("lambda")
                           ? doc::parse_complex(task.at("lambda"), "task.lambda")
                           : Complex{-1.0, 0.0},
                       opt.grid > 0 ? opt.grid
                       : task.contains("grid") ? doc::parse_int(task.at("grid"), "task.grid")
                                               : 201};
    if (opt.tol > 0.0) {
        cs.quad.abs_tol = opt.tol;
        cs.quad.rel_tol = opt.tol;
    }

    const ConvergenceReport report = run_case(cs);
    const auto& final_row = report.rows[report.rows.size() - 2]; // smallest nonzero eps
    std::cout << "final resolvent bound (eps = " << doc::format_number(final_row.eps)
              << "): " << doc::format_number(final_row.resolvent_bound) << "\n";
    std::cout << "mu-shift identity residual = " << doc::format_number(report.mu_shift.residual)
              << "\n";
    write_output(doc::convergence_csv(report), opt, doc);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Singular Sturm-Liouville problems via quasi-derivatives: spectra, Green "
                 "kernels, resolvents, and norm-resolvent convergence experiments"};
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("document", opt.doc_path, "JSON problem document")->required();
        sub->add_option("--out", opt.out, "output file (default: document output.path or stdout)");
        sub->add_option("--grid", opt.grid, "grid/sample count override");
        sub->add_option("--tol", opt.tol, "tolerance override");
    };

    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues in a window or rectangle");
    auto* green = app.add_subcommand("green", "Green kernel grid at a resolvent point");
    auto* resolve = app.add_subcommand("resolve", "apply the (generalized) resolvent to f");
    auto* classifyc = app.add_subcommand("classify", "classify the canonical boundary condition");
    auto* converge = app.add_subcommand("converge", "resolvent convergence report for a family");
    for (auto* sub : {spectrum, green, resolve, classifyc, converge}) add_common(sub);

    try {
        app.parse(argc, argv);
        if (spectrum->parsed()) return cmd_spectrum(opt);
        if (green->parsed()) return cmd_green(opt);
        if (resolve->parsed()) return cmd_resolve(opt);
        if (classifyc->parsed()) return cmd_classify(opt);
        if (converge->parsed()) return cmd_converge(opt);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const qsl::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const qsl::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
