#include "stresscert/cli.hpp"

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stresscert/anchored.hpp"
#include "stresscert/framework_io.hpp"
#include "stresscert/gen.hpp"
#include "stresscert/report_json.hpp"
#include "stresscert/sdp_export.hpp"
#include "stresscert/stress.hpp"

namespace stresscert {

namespace {

namespace exit_code {
constexpr int ok = 0;
constexpr int usage = 1;
constexpr int parse = 2;
constexpr int no_order = 3;
constexpr int singular = 4;
constexpr int verification = 5;
constexpr int dimension = 6;
constexpr int resample_budget = 7;
constexpr int search_budget = 8;
}  // namespace exit_code

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << text;
    if (!out.flush()) throw ParseError("cannot write '" + path + "'");
}

std::vector<int> parse_order_csv(const std::string& csv) {
    std::vector<int> order;
    std::istringstream in(csv);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        try {
            size_t used = 0;
            order.push_back(std::stoi(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ParseError("--order expects comma-separated integers, got '" + tok + "'");
        }
    }
    if (order.empty()) throw ParseError("--order must list at least one vertex");
    return order;
}

// Derive "<name>.stress.json" in the working directory from an input path.
std::string derived_output(const std::string& input, const std::string& suffix) {
    std::string base = input;
    size_t slash = base.find_last_of("/\\");
    if (slash != std::string::npos) base = base.substr(slash + 1);
    size_t dot = base.find_last_of('.');
    if (dot != std::string::npos && dot > 0) base = base.substr(0, dot);
    return base + suffix;
}

struct CommonFlags {
    std::string backend = "rational";
    Tolerances tol;
    bool no_skip = false;
    bool full_gp_scan = false;
    bool check_steps = false;
    std::string order_csv;

    std::optional<std::vector<int>> order_override() const {
        if (order_csv.empty()) return std::nullopt;
        return parse_order_csv(order_csv);
    }
};

struct CertifyArgs {
    std::string input;
    std::string out;
    std::string trace_out;
};

template <class T>
int cmd_certify(const CommonFlags& flags, const CertifyArgs& args) {
    auto inst = read_instance<T>(read_file(args.input));
    std::string out_path = args.out.empty() ? derived_output(args.input, ".stress.json") : args.out;
    nlohmann::json report;
    bool pass = false;

    if (std::holds_alternative<Framework<T>>(inst)) {
        const auto& F = std::get<Framework<T>>(inst);
        PipelineOptions opts;
        opts.skip_rule = !flags.no_skip;
        opts.check_steps = flags.check_steps;
        opts.full_gp_scan = flags.full_gp_scan;
        opts.order_override = flags.order_override();
        auto res = compute_stress_matrix(F, opts, flags.tol);
        write_file(out_path, write_matrix_json(res.stress.S));
        report["kind"] = "framework";
        report["dim"] = F.d;
        report["vertices"] = F.n;
        report["order"] = res.order;
        report["order_from_search"] = res.order_from_search;
        report["tree"] = res.tree_instance;
        report["modifications"] = res.trace.modifications();
        report["trace"] = trace_json(res.trace, false);
        report["verify"] = verify_json(res.report);
        pass = res.report.pass();
        if (!args.trace_out.empty()) {
            nlohmann::json full;
            full["trace"] = trace_json(res.trace, true);
            write_file(args.trace_out, full.dump(2) + "\n");
        }
    } else {
        const auto& N = std::get<AnchoredNetwork<T>>(inst);
        AnchoredOptions opts;
        opts.check_steps = flags.check_steps;
        opts.order_override = flags.order_override();
        auto res = anchored_stress(N, opts, flags.tol);
        write_file(out_path, write_matrix_json(res.stress.S));
        report["kind"] = "anchored";
        report["dim"] = N.d;
        report["anchors"] = N.m;
        report["sensors"] = N.n;
        report["sensor_order"] = res.sensor_order;
        report["order_from_search"] = res.order_from_search;
        nlohmann::json weights = nlohmann::json::array();
        for (const auto& [e, w] : res.stress.anchor_weights)
            weights.push_back({{"anchor", e.first}, {"sensor", e.second}, {"w", scalar_json(w)}});
        report["anchor_weights"] = std::move(weights);
        nlohmann::json sweights = nlohmann::json::array();
        for (const auto& [e, w] : res.stress.sensor_weights)
            sweights.push_back({{"i", e.first}, {"j", e.second}, {"w", scalar_json(w)}});
        report["sensor_weights"] = std::move(sweights);
        report["verify"] = verify_json(res.report);
        pass = res.report.pass();
        if (!args.trace_out.empty()) {
            nlohmann::json full;
            full["trace"] = trace_json(res.trace, true);
            write_file(args.trace_out, full.dump(2) + "\n");
        }
    }
    report["matrix_written"] = out_path;
    report["pass"] = pass;
    std::cout << report.dump(2) << "\n";
    return pass ? exit_code::ok : exit_code::verification;
}

struct VerifyArgs {
    std::string input;
    std::string matrix;
};

template <class T>
int cmd_verify(const CommonFlags& flags, const VerifyArgs& args) {
    auto inst = read_instance<T>(read_file(args.input));
    Matrix<T> S = read_matrix_json<T>(read_file(args.matrix));
    nlohmann::json report;
    bool pass = false;
    if (std::holds_alternative<Framework<T>>(inst)) {
        const auto& F = std::get<Framework<T>>(inst);
        if (S.rows != F.n || S.cols != F.n)
            throw DimensionMismatch("matrix is " + std::to_string(S.rows) + "x" +
                                    std::to_string(S.cols) + ", framework needs " +
                                    std::to_string(F.n) + "x" + std::to_string(F.n));
        auto rep = verify_stress(S, F, flags.tol);
        report["kind"] = "framework";
        report["verify"] = verify_json(rep);
        pass = rep.pass();
    } else {
        const auto& N = std::get<AnchoredNetwork<T>>(inst);
        int want = N.d + N.n;
        if (S.rows != want || S.cols != want)
            throw DimensionMismatch("matrix is " + std::to_string(S.rows) + "x" +
                                    std::to_string(S.cols) + ", network needs " +
                                    std::to_string(want) + "x" + std::to_string(want));
        auto rep = verify_anchored_stress(S, N, flags.tol);
        report["kind"] = "anchored";
        report["verify"] = verify_json(rep);
        pass = rep.pass();
    }
    report["pass"] = pass;
    std::cout << report.dump(2) << "\n";
    return pass ? exit_code::ok : exit_code::verification;
}

struct GenArgs {
    GenOptions opt;
    std::string out;
};

int cmd_gen(GenArgs args) {
    if (const char* env = std::getenv("STRESS_SEED")) {
        try {
            size_t used = 0;
            args.opt.seed = std::stoull(env, &used);
            if (used != std::string(env).size()) throw std::invalid_argument(env);
        } catch (const std::exception&) {
            std::cerr << "error: STRESS_SEED must be an unsigned integer\n";
            return exit_code::usage;
        }
    }
    Instance<Rat> inst;
    try {
        inst = generate_instance(args.opt);
    } catch (const ParseError& e) {
        // Bad generator parameters are usage errors, not input-file defects.
        std::cerr << "error: " << e.what() << "\n";
        return exit_code::usage;
    }
    std::string text = write_instance(inst);
    if (args.out.empty()) {
        std::cout << text;
    } else {
        write_file(args.out, text);
        nlohmann::json summary;
        summary["written"] = args.out;
        summary["dim"] = args.opt.d;
        summary["seed"] = args.opt.seed;
        if (args.opt.anchors > 0) {
            summary["anchors"] = args.opt.anchors;
            summary["sensors"] = args.opt.n;
        } else {
            summary["vertices"] = args.opt.n;
        }
        std::cout << summary.dump(2) << "\n";
    }
    return exit_code::ok;
}

struct ExportArgs {
    std::string input;
    std::string out;
    std::string distances;
    bool trace_objective = false;
};

template <class T>
std::map<std::pair<int, int>, T> overrides_from_json(const nlohmann::json& arr, const char* what) {
    std::map<std::pair<int, int>, T> out;
    if (!arr.is_array()) throw ParseError(std::string(what) + " overrides must be an array of [i, j, value]");
    for (const auto& e : arr) {
        if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() || !e[1].is_number_integer())
            throw ParseError(std::string(what) + " overrides must be [i, j, value] triples");
        int i = e[0].get<int>(), j = e[1].get<int>();
        out[{i, j}] = detail::number_from_json<T>(e[2], what);
    }
    return out;
}

template <class T>
int cmd_export_sdp(const ExportArgs& args) {
    auto inst = read_instance<T>(read_file(args.input));
    SdpExportOptions opt;
    opt.trace_objective = args.trace_objective;
    SdpProblem<T> prob;
    if (std::holds_alternative<Framework<T>>(inst)) {
        const auto& F = std::get<Framework<T>>(inst);
        std::map<std::pair<int, int>, T> dist;
        if (!args.distances.empty()) {
            auto j = nlohmann::json::parse(read_file(args.distances), nullptr, false);
            if (j.is_discarded()) throw ParseError("invalid JSON in '" + args.distances + "'");
            dist = overrides_from_json<T>(j, "distance");
            for (const auto& [e, v] : dist)
                if (!F.edges.has(e.first, e.second))
                    throw IndexError("distance override [" + std::to_string(e.first) + "," +
                                     std::to_string(e.second) + "] is not an edge");
        }
        prob = export_realization_sdp(F, opt, args.distances.empty() ? nullptr : &dist);
    } else {
        const auto& N = std::get<AnchoredNetwork<T>>(inst);
        std::map<std::pair<int, int>, T> sdist, adist;
        if (!args.distances.empty()) {
            auto j = nlohmann::json::parse(read_file(args.distances), nullptr, false);
            if (j.is_discarded() || !j.is_object())
                throw ParseError("anchored distance overrides must be an object with 'sensor'/'anchor' arrays");
            if (j.contains("sensor")) sdist = overrides_from_json<T>(j["sensor"], "sensor distance");
            if (j.contains("anchor")) adist = overrides_from_json<T>(j["anchor"], "anchor distance");
            for (const auto& [e, v] : sdist)
                if (!N.sensor_edges.has(e.first, e.second))
                    throw IndexError("sensor distance override is not an edge");
            for (const auto& [e, v] : adist)
                if (!N.anchor_edges.count(e))
                    throw IndexError("anchor distance override is not an edge");
        }
        prob = export_anchored_sdp(N, opt, sdist.empty() ? nullptr : &sdist,
                                   adist.empty() ? nullptr : &adist);
    }
    std::string out_path = args.out.empty() ? derived_output(args.input, ".dat-s") : args.out;
    write_file(out_path, write_sdpa(prob));
    nlohmann::json summary;
    summary["written"] = out_path;
    summary["constraints"] = prob.constraint_count();
    summary["block_sizes"] = prob.block_sizes;
    std::cout << summary.dump(2) << "\n";
    return exit_code::ok;
}

struct CheckCertArgs {
    std::string problem;
    std::string primal;
    std::string dual;
};

template <class T>
int cmd_check_cert(const CommonFlags& flags, const CheckCertArgs& args) {
    auto prob = parse_sdpa<T>(read_file(args.problem));
    auto primal = read_certificate<T>(read_file(args.primal));
    auto dual = read_certificate<T>(read_file(args.dual));
    auto rep = check_certificate(primal, dual, prob, flags.tol);
    nlohmann::json j;
    j["feasible_ok"] = rep.feasible_ok;
    j["primal_psd_ok"] = rep.primal_psd_ok;
    j["dual_psd_ok"] = rep.dual_psd_ok;
    j["complementarity_ok"] = rep.complementarity_ok;
    j["strict_ok"] = rep.strict_ok;
    j["primal_rank"] = rep.primal_rank;
    j["dual_rank"] = rep.dual_rank;
    j["max_residual"] = rep.max_residual;
    if (rep.worst_constraint) j["worst_constraint"] = rep.worst_constraint;
    j["pass"] = rep.pass();
    std::cout << j.dump(2) << "\n";
    return rep.pass() ? exit_code::ok : exit_code::verification;
}

template <class Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const OrderNotFound& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.budget_exhausted() ? exit_code::search_budget : exit_code::no_order;
    } catch (const SingularMatrix& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (!e.subset().empty()) {
            std::cerr << "subset:";
            for (int v : e.subset()) std::cerr << " " << v;
            std::cerr << "\n";
        }
        return exit_code::singular;
    } catch (const DegenerateSpan& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code::singular;
    } catch (const DimensionMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code::dimension;
    } catch (const ResampleBudgetExhausted& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code::resample_budget;
    } catch (const VerificationFailed& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code::verification;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code::parse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code::usage;
    }
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Maximum-rank PSD stress-matrix certificates for lateration frameworks and anchored sensor networks"};
    app.require_subcommand(1);

    CommonFlags flags;
    app.add_option("--backend", flags.backend, "numeric backend")
        ->check(CLI::IsMember({"rational", "float"}))
        ->capture_default_str();
    app.add_option("--tol-solve", flags.tol.tol_solve, "float pivot / residual tolerance")->capture_default_str();
    app.add_option("--tol-rank", flags.tol.tol_rank, "float rank cutoff")->capture_default_str();
    app.add_option("--tol-psd", flags.tol.tol_psd, "float eigenvalue slack")->capture_default_str();
    app.add_option("--tol-sym", flags.tol.tol_sym, "float symmetry slack")->capture_default_str();
    app.add_option("--tol-match", flags.tol.tol_match, "golden-value comparison tolerance")->capture_default_str();
    app.add_flag("--no-skip", flags.no_skip, "purify every column even when its off-edge entries already vanish");
    app.add_flag("--full-gp-scan", flags.full_gp_scan, "scan every (d+1)-subset for general position before the pipeline");
    app.add_flag("--check-steps", flags.check_steps, "record the matrix rank after every modification step");
    app.add_option("--order", flags.order_csv,
                   "construction order override, e.g. \"1,2,3\" (sensor order for anchored inputs)");

    CertifyArgs certify_args;
    auto* certify = app.add_subcommand("certify", "construct and verify a stress matrix certificate");
    certify->add_option("input", certify_args.input, "instance file (JSON)")->required();
    certify->add_option("-o,--out", certify_args.out, "stress matrix output path (default: <input>.stress.json)");
    certify->add_option("--trace-out", certify_args.trace_out, "write the full purification trace (with vectors) here");

    VerifyArgs verify_args;
    auto* verify = app.add_subcommand("verify", "verify a stress matrix against an instance");
    verify->add_option("input", verify_args.input, "instance file (JSON)")->required();
    verify->add_option("-m,--matrix", verify_args.matrix, "stress matrix file (JSON)")->required();

    GenArgs gen_args;
    auto* gen = app.add_subcommand("gen", "generate a seeded random instance in general position");
    gen->add_option("-d,--dim", gen_args.opt.d, "dimension")->required();
    gen->add_option("-n,--count", gen_args.opt.n, "vertex count (sensor count with --anchors)")->required();
    gen->add_option("-m,--anchors", gen_args.opt.anchors, "anchor count (emits an anchored network)");
    gen->add_option("--seed", gen_args.opt.seed, "generator seed (env STRESS_SEED overrides)")->capture_default_str();
    gen->add_flag("--tree", gen_args.opt.tree, "attach each vertex to an existing clique (purification becomes vacuous)");
    gen->add_option("--extra", gen_args.opt.extra_edges, "extra random edges beyond the lateration subgraph");
    gen->add_option("--coord-min", gen_args.opt.coord_min, "integer coordinate lower bound")->capture_default_str();
    gen->add_option("--coord-max", gen_args.opt.coord_max, "integer coordinate upper bound")->capture_default_str();
    gen->add_option("--max-resamples", gen_args.opt.max_resamples, "coordinate redraw budget")->capture_default_str();
    gen->add_option("-o,--out", gen_args.out, "output path (default: stdout)");

    ExportArgs export_args;
    auto* exp = app.add_subcommand("export-sdp", "write the instance's SDP relaxation in sparse SDPA format");
    exp->add_option("input", export_args.input, "instance file (JSON)")->required();
    exp->add_option("-o,--out", export_args.out, "problem output path (default: <input>.dat-s)");
    exp->add_option("--distances", export_args.distances,
                    "JSON file overriding squared distances ([[i,j,value],...], or "
                    "{\"sensor\":[...],\"anchor\":[...]} for anchored inputs)");
    exp->add_flag("--trace-objective", export_args.trace_objective,
                  "emit the identity as the objective (maximum-trace surrogate) instead of zero");

    CheckCertArgs check_args;
    auto* check = app.add_subcommand("check-cert", "check a primal/dual certificate pair against a problem file");
    check->add_option("-p,--problem", check_args.problem, "problem file (.dat-s)")->required();
    check->add_option("--primal", check_args.primal, "primal certificate (dense, 'rows cols' header)")->required();
    check->add_option("--dual", check_args.dual, "dual certificate (dense, 'rows cols' header)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_code::usage;
    }

    bool rational = flags.backend == "rational";
    return guarded([&]() -> int {
        if (certify->parsed())
            return rational ? cmd_certify<Rat>(flags, certify_args) : cmd_certify<double>(flags, certify_args);
        if (verify->parsed())
            return rational ? cmd_verify<Rat>(flags, verify_args) : cmd_verify<double>(flags, verify_args);
        if (gen->parsed()) return cmd_gen(gen_args);
        if (exp->parsed())
            return rational ? cmd_export_sdp<Rat>(export_args) : cmd_export_sdp<double>(export_args);
        if (check->parsed())
            return rational ? cmd_check_cert<Rat>(flags, check_args) : cmd_check_cert<double>(flags, check_args);
        return exit_code::usage;
    });
}

int run_cli(const std::vector<std::string>& argv) {
    std::vector<const char*> ptrs;
    ptrs.reserve(argv.size());
    for (const auto& a : argv) ptrs.push_back(a.c_str());
    return run_cli(static_cast<int>(ptrs.size()), ptrs.data());
}

}  // namespace stresscert
