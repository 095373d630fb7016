#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "stresscert/anchored.hpp"
#include "stresscert/framework_io.hpp"
#include "stresscert/gen.hpp"
#include "stresscert/report_json.hpp"
#include "stresscert/sdp_export.hpp"
#include "stresscert/stress.hpp"

namespace py = pybind11;
using namespace stresscert;

namespace {

// The bindings speak JSON text on both sides: instances and matrices use the
// same schema as the files the CLI reads and writes, so python callers can
// mix the two freely. The python package wraps these in dict-returning
// helpers.

template <class T>
std::string certify_text(const std::string& instance_text, bool skip_rule, bool full_gp_scan,
                         std::optional<std::vector<int>> order) {
    auto inst = read_instance<T>(instance_text);
    nlohmann::json report;
    if (std::holds_alternative<Framework<T>>(inst)) {
        const auto& F = std::get<Framework<T>>(inst);
        PipelineOptions opts;
        opts.skip_rule = skip_rule;
        opts.full_gp_scan = full_gp_scan;
        opts.order_override = std::move(order);
        Tolerances tol;
        auto res = compute_stress_matrix(F, opts, tol);
        report["kind"] = "framework";
        report["order"] = res.order;
        report["tree"] = res.tree_instance;
        report["modifications"] = res.trace.modifications();
        report["trace"] = trace_json(res.trace, true);
        report["verify"] = verify_json(res.report);
        report["matrix"] = nlohmann::json::parse(write_matrix_json(res.stress.S));
        report["pass"] = res.report.pass();
    } else {
        const auto& N = std::get<AnchoredNetwork<T>>(inst);
        AnchoredOptions opts;
        opts.order_override = std::move(order);
        Tolerances tol;
        auto res = anchored_stress(N, opts, tol);
        report["kind"] = "anchored";
        report["sensor_order"] = res.sensor_order;
        report["trace"] = trace_json(res.trace, true);
        report["verify"] = verify_json(res.report);
        report["matrix"] = nlohmann::json::parse(write_matrix_json(res.stress.S));
        report["pass"] = res.report.pass();
    }
    return report.dump();
}

template <class T>
std::string verify_text(const std::string& instance_text, const std::string& matrix_text) {
    auto inst = read_instance<T>(instance_text);
    Matrix<T> S = read_matrix_json<T>(matrix_text);
    Tolerances tol;
    nlohmann::json report;
    if (std::holds_alternative<Framework<T>>(inst)) {
        const auto& F = std::get<Framework<T>>(inst);
        if (S.rows != F.n || S.cols != F.n) throw DimensionMismatch("matrix shape does not match the framework");
        auto rep = verify_stress(S, F, tol);
        report["kind"] = "framework";
        report["verify"] = verify_json(rep);
        report["pass"] = rep.pass();
    } else {
        const auto& N = std::get<AnchoredNetwork<T>>(inst);
        if (S.rows != N.d + N.n || S.cols != N.d + N.n)
            throw DimensionMismatch("matrix shape does not match the network");
        auto rep = verify_anchored_stress(S, N, tol);
        report["kind"] = "anchored";
        report["verify"] = verify_json(rep);
        report["pass"] = rep.pass();
    }
    return report.dump();
}

template <class T>
std::string export_sdp_text(const std::string& instance_text) {
    auto inst = read_instance<T>(instance_text);
    if (std::holds_alternative<Framework<T>>(inst))
        return write_sdpa(export_realization_sdp(std::get<Framework<T>>(inst)));
    return write_sdpa(export_anchored_sdp(std::get<AnchoredNetwork<T>>(inst)));
}

bool is_rational(const std::string& backend) {
    if (backend == "rational") return true;
    if (backend == "float") return false;
    throw ParseError("backend must be 'rational' or 'float'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Stress-matrix certificates for lateration frameworks and anchored sensor networks";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<OrderNotFound>(m, "OrderNotFound", PyExc_ValueError);
    py::register_exception<SingularMatrix>(m, "SingularMatrix", PyExc_ValueError);
    py::register_exception<DegenerateSpan>(m, "DegenerateSpan", PyExc_ValueError);
    py::register_exception<DimensionMismatch>(m, "DimensionMismatch", PyExc_ValueError);
    py::register_exception<ResampleBudgetExhausted>(m, "ResampleBudgetExhausted", PyExc_RuntimeError);
    py::register_exception<VerificationFailed>(m, "VerificationFailed", PyExc_RuntimeError);

    m.def(
        "certify_json",
        [](const std::string& text, const std::string& backend, bool skip_rule, bool full_gp_scan,
           std::optional<std::vector<int>> order) {
            return is_rational(backend) ? certify_text<Rat>(text, skip_rule, full_gp_scan, order)
                                        : certify_text<double>(text, skip_rule, full_gp_scan, order);
        },
        py::arg("instance"), py::arg("backend") = "rational", py::arg("skip_rule") = true,
        py::arg("full_gp_scan") = false, py::arg("order") = py::none(),
        "Construct and verify a stress matrix; returns a JSON report string.");

    m.def(
        "verify_json",
        [](const std::string& instance, const std::string& matrix, const std::string& backend) {
            return is_rational(backend) ? verify_text<Rat>(instance, matrix)
                                        : verify_text<double>(instance, matrix);
        },
        py::arg("instance"), py::arg("matrix"), py::arg("backend") = "rational",
        "Verify a stress matrix (JSON text) against an instance; returns a JSON report string.");

    m.def(
        "generate_json",
        [](int d, int n, int anchors, std::uint64_t seed, bool tree, int extra_edges) {
            GenOptions opt;
            opt.d = d;
            opt.n = n;
            opt.anchors = anchors;
            opt.seed = seed;
            opt.tree = tree;
            opt.extra_edges = extra_edges;
            return write_instance(generate_instance(opt));
        },
        py::arg("d"), py::arg("n"), py::arg("anchors") = 0, py::arg("seed") = 1,
        py::arg("tree") = false, py::arg("extra_edges") = 0,
        "Generate a seeded random instance; returns the canonical instance JSON text.");

    m.def(
        "export_sdp",
        [](const std::string& instance, const std::string& backend) {
            return is_rational(backend) ? export_sdp_text<Rat>(instance)
                                        : export_sdp_text<double>(instance);
        },
        py::arg("instance"), py::arg("backend") = "rational",
        "Export the instance's SDP relaxation as sparse SDPA problem text.");
}
