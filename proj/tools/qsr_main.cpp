// qsr: linear quantum systems in doubled form — realizability checks,
// slow/fast model reduction, and Bogoliubov decompositions, with JSON
// documents on the wire.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qsr/serialize.hpp"

namespace {

using nlohmann::json;

std::string fmt_sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

qsr::Complex parse_complex_flag(const std::string& text, const std::string& flag) {
    const auto parse_part = [&](const std::string& part) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(part, &pos);
            if (pos != part.size()) throw std::invalid_argument(part);
            return v;
        } catch (const std::exception&) {
            throw qsr::InvalidParameter(flag + " expects RE or RE,IM (got \"" + text +
                                        "\")");
        }
    };
    const std::size_t comma = text.find(',');
    if (comma == std::string::npos) {
        return qsr::Complex(parse_part(text), 0.0);
    }
    return qsr::Complex(parse_part(text.substr(0, comma)),
                        parse_part(text.substr(comma + 1)));
}

std::vector<double> parse_eps_flag(const std::string& text) {
    std::vector<double> eps;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string part =
            text.substr(start, comma == std::string::npos ? comma : comma - start);
        try {
            std::size_t pos = 0;
            eps.push_back(std::stod(part, &pos));
            if (pos != part.size()) throw std::invalid_argument(part);
        } catch (const std::exception&) {
            throw qsr::InvalidParameter("--eps expects a comma-separated list of "
                                        "positive numbers (got \"" +
                                        text + "\")");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return eps;
}

// Kind coercions: several subcommands accept any document that can be
// turned into the shape they need.

qsr::QuantumLinearSystem as_system(const qsr::Document& doc, const std::string& cmd) {
    if (const auto* sys = std::get_if<qsr::QuantumLinearSystem>(&doc.payload)) {
        return *sys;
    }
    if (const auto* params = std::get_if<qsr::PhysicalParams>(&doc.payload)) {
        return qsr::realize(*params);
    }
    if (const auto* cavity = std::get_if<qsr::CavitySqueezerParams>(&doc.payload)) {
        return qsr::build_full(*cavity);
    }
    throw qsr::MalformedInput(cmd + ": document kind \"" + qsr::kind_of(doc) +
                              "\" is not a system (expected system, physical_params "
                              "or cavity_squeezer)");
}

qsr::PerturbedSystem as_perturbed(const qsr::Document& doc, const std::string& cmd) {
    if (const auto* ps = std::get_if<qsr::PerturbedSystem>(&doc.payload)) {
        return *ps;
    }
    if (const auto* special = std::get_if<qsr::SpecialClassParams>(&doc.payload)) {
        return qsr::to_perturbed(*special);
    }
    if (const auto* cavity = std::get_if<qsr::CavitySqueezerParams>(&doc.payload)) {
        return qsr::build_perturbed(*cavity);
    }
    throw qsr::MalformedInput(cmd + ": document kind \"" + qsr::kind_of(doc) +
                              "\" has no slow/fast split (expected perturbed, "
                              "special_class or cavity_squeezer)");
}

qsr::SpecialClassParams as_special(const qsr::Document& doc, const std::string& cmd) {
    if (const auto* special = std::get_if<qsr::SpecialClassParams>(&doc.payload)) {
        return *special;
    }
    if (const auto* cavity = std::get_if<qsr::CavitySqueezerParams>(&doc.payload)) {
        return qsr::special_params(*cavity);
    }
    throw qsr::MalformedInput(cmd + ": document kind \"" + qsr::kind_of(doc) +
                              "\" has no canonical slow/fast parameters (expected "
                              "special_class or cavity_squeezer)");
}

void write_text(const std::string& text, const std::string& path) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw qsr::IoError("cannot open \"" + path + "\" for writing");
    out << text;
    out.flush();
    if (!out) throw qsr::IoError("failed while writing \"" + path + "\"");
}

json report_skeleton(const std::string& command, const qsr::Document& input) {
    json report;
    report["qsr_version"] = qsr::kWireVersion;
    report["command"] = command;
    report["inputs"] = qsr::document_digest(input);
    report["residuals"] = json::object();
    report["samples_used"] = json::array();
    return report;
}

// ---------------------------------------------------------------------------
// Subcommand runners

struct CommonOpts {
    std::string input;
    std::string output = "-";
};

int run_realize(const CommonOpts& opts) {
    const qsr::Document doc = qsr::load_document(opts.input);
    const auto* params = std::get_if<qsr::PhysicalParams>(&doc.payload);
    if (params == nullptr) {
        throw qsr::MalformedInput("realize: expected a physical_params document, got \"" +
                                  qsr::kind_of(doc) + "\"");
    }
    const qsr::QuantumLinearSystem sys = qsr::realize(*params);
    qsr::Document out{.payload = sys, .meta = {{"source", qsr::document_digest(doc)}}};
    qsr::save_document(out, opts.output);
    std::cerr << "realize: built system with " << sys.n_modes() << " mode(s), "
              << sys.m_fields() << " field(s)\n";
    return 0;
}

int run_check(const CommonOpts& opts, const qsr::CheckOptions& check_opts) {
    const qsr::Document doc = qsr::load_document(opts.input);
    const qsr::QuantumLinearSystem sys = as_system(doc, "check");
    const qsr::RealizabilityReport rep = qsr::check_physical_realizability(sys, check_opts);

    json report = report_skeleton("check", doc);
    json& residuals = report["residuals"];
    residuals["jj_unitarity"] = rep.jj.max_residual;
    residuals["scattering_offdiag"] = rep.scattering.offdiag_residual;
    residuals["scattering_unitarity"] = rep.scattering.unitarity_residual;
    residuals["eig_min_pair_sum"] = rep.eig_pairs.min_pair_sum;
    if (rep.canonical_m_hermiticity) {
        residuals["canonical_m_hermiticity"] = *rep.canonical_m_hermiticity;
    }
    if (rep.canonical_g_identity) {
        residuals["canonical_g_identity"] = *rep.canonical_g_identity;
    }
    report["checks"] = {{"jj_unitarity", rep.jj.pass},
                        {"scattering_form", rep.scattering.pass},
                        {"minimality", rep.minimality.minimal},
                        {"eigenvalue_pairs", rep.eig_pairs.pass}};
    report["ranks"] = {{"controllability", rep.minimality.controllability_rank},
                       {"observability", rep.minimality.observability_rank},
                       {"full", rep.minimality.full_rank}};
    report["options"] = {{"tol", check_opts.tol},
                         {"samples", check_opts.samples},
                         {"seed", check_opts.seed}};
    for (const qsr::Complex& s : rep.jj.samples) {
        report["samples_used"].push_back(qsr::complex_to_json(s));
    }
    report["verdict"] = qsr::to_string(rep.verdict);

    write_text(qsr::dump_stable(report), opts.output);
    std::cerr << "check: verdict=" << qsr::to_string(rep.verdict)
              << " jj=" << fmt_sci(rep.jj.max_residual)
              << " scattering=" << fmt_sci(rep.scattering.offdiag_residual) << "/"
              << fmt_sci(rep.scattering.unitarity_residual)
              << " min|li+lj|=" << fmt_sci(rep.eig_pairs.min_pair_sum) << " ranks="
              << rep.minimality.controllability_rank << "," << rep.minimality.observability_rank
              << "/" << rep.minimality.full_rank << "\n";
    return rep.verdict == qsr::Verdict::fail ? 1 : 0;
}

int run_reduce(const CommonOpts& opts) {
    const qsr::Document doc = qsr::load_document(opts.input);
    const qsr::PerturbedSystem ps = as_perturbed(doc, "reduce");
    const qsr::QuantumLinearSystem sys = qsr::reduce(ps);
    qsr::Document out{.payload = sys, .meta = {{"source", qsr::document_digest(doc)}}};
    qsr::save_document(out, opts.output);
    std::cerr << "reduce: " << (ps.n_slow + ps.n_fast) << " mode(s) -> " << ps.n_slow
              << " slow mode(s), " << ps.m_fields << " field(s)\n";
    if (const auto* cavity = std::get_if<qsr::CavitySqueezerParams>(&doc.payload)) {
        const qsr::ReducedReference ref = qsr::reduced_reference(*cavity);
        std::cerr << "reduce: legacy closed-form discrepancy F=" << fmt_sci(ref.f_discrepancy)
                  << " G=" << fmt_sci(ref.g_discrepancy)
                  << " H=" << fmt_sci(ref.h_discrepancy)
                  << " K=" << fmt_sci(ref.k_discrepancy) << "\n";
    }
    return 0;
}

int run_respond(const CommonOpts& opts, const std::vector<std::string>& s_flags) {
    const qsr::Document doc = qsr::load_document(opts.input);
    const qsr::QuantumLinearSystem sys = as_system(doc, "respond");

    json report = report_skeleton("respond", doc);
    json responses = json::array();
    for (const std::string& text : s_flags) {
        const qsr::Complex s = parse_complex_flag(text, "--s");
        const qsr::Matrix phi = qsr::transfer_function(sys, s);
        report["samples_used"].push_back(qsr::complex_to_json(s));
        responses.push_back(
            {{"s", qsr::complex_to_json(s)}, {"phi", qsr::matrix_to_json(phi)}});
    }
    report["responses"] = std::move(responses);
    report["verdict"] = "pass";

    write_text(qsr::dump_stable(report), opts.output);
    std::cerr << "respond: evaluated " << s_flags.size() << " frequency point(s)\n";
    return 0;
}

int run_decompose(const CommonOpts& opts, double tol) {
    const qsr::Document doc = qsr::load_document(opts.input);
    const qsr::SpecialClassParams params = as_special(doc, "decompose");
    const qsr::DecompositionReport rep = qsr::verify_decomposition(params, tol);
    const qsr::Decomposition dec = qsr::decompose(params, tol);

    json report = report_skeleton("decompose", doc);
    json& residuals = report["residuals"];
    residuals["m_hermiticity"] = rep.m_hermiticity;
    residuals["m_doubled"] = rep.m_doubled;
    residuals["n_doubled"] = rep.n_doubled;
    residuals["k_doubled"] = rep.k_doubled;
    residuals["bogoliubov"] = rep.bogoliubov;
    residuals["reconstruction"] = rep.reconstruction;
    residuals["g_identity"] = rep.g_identity;
    residuals["m_formula_agreement"] = rep.m_formula_agreement;
    report["core"] = qsr::to_json(qsr::Document{.payload = dec.pr_params, .meta = {}});
    report["static"] =
        qsr::to_json(qsr::Document{.payload = dec.static_part, .meta = {}});
    report["options"] = {{"tol", tol}};
    report["verdict"] = rep.pass ? "pass" : "fail";

    write_text(qsr::dump_stable(report), opts.output);
    const double worst =
        std::max({rep.m_hermiticity, rep.m_doubled, rep.n_doubled, rep.k_doubled,
                  rep.bogoliubov, rep.reconstruction, rep.g_identity,
                  rep.m_formula_agreement});
    std::cerr << "decompose: verdict=" << (rep.pass ? "pass" : "fail")
              << " worst residual=" << fmt_sci(worst) << "\n";
    return rep.pass ? 0 : 1;
}

int run_converge(const CommonOpts& opts, const std::string& s_flag,
                 const std::string& eps_flag) {
    const qsr::Document doc = qsr::load_document(opts.input);
    const qsr::PerturbedSystem ps = as_perturbed(doc, "converge");
    const qsr::Complex s = parse_complex_flag(s_flag, "--s");
    const std::vector<double> eps_list = parse_eps_flag(eps_flag);
    const std::vector<qsr::ConvergenceRow> rows = qsr::convergence_probe(ps, eps_list, s);

    json report = report_skeleton("converge", doc);
    report["samples_used"].push_back(qsr::complex_to_json(s));
    json table = json::array();
    for (const qsr::ConvergenceRow& row : rows) {
        json entry = {{"eps", row.eps}, {"residual", row.residual}};
        if (row.exact) entry["exact"] = true;
        if (row.local_order) entry["local_order"] = *row.local_order;
        table.push_back(std::move(entry));
    }
    report["table"] = std::move(table);
    report["residuals"]["final_expansion_residual"] = rows.back().residual;
    report["verdict"] = "pass";

    write_text(qsr::dump_stable(report), opts.output);
    for (const qsr::ConvergenceRow& row : rows) {
        std::cerr << "converge: eps=" << fmt_sci(row.eps)
                  << " residual=" << fmt_sci(row.residual);
        if (row.exact) std::cerr << " (exact)";
        if (row.local_order) std::cerr << " order=" << fmt_sci(*row.local_order);
        std::cerr << "\n";
    }
    return 0;
}

struct ExampleOpts {
    double k1 = 1.0;
    double k2 = 1.0;
    double gamma = 1.0;
    std::string chi = "0,0";
    std::optional<double> epsilon;
    std::string output = "-";
};

int run_example(const ExampleOpts& opts) {
    qsr::CavitySqueezerParams params;
    params.k1 = opts.k1;
    params.k2 = opts.k2;
    params.gamma = opts.gamma;
    params.chi = parse_complex_flag(opts.chi, "--chi");
    qsr::validate(params);

    qsr::Document doc{.payload = params,
                      .meta = {{"description",
                                "cavity-squeezer slow/fast example parameters"}}};
    if (opts.epsilon) {
        const qsr::QuantumLinearSystem sys =
            qsr::assemble(qsr::build_perturbed(params), *opts.epsilon);
        doc = qsr::Document{.payload = sys,
                            .meta = {{"description",
                                      "cavity-squeezer family member at fixed scale"}}};
    }
    qsr::save_document(doc, opts.output);
    std::cerr << "example: cavity-squeezer k1=" << fmt_sci(opts.k1)
              << " k2=" << fmt_sci(opts.k2) << " gamma=" << fmt_sci(opts.gamma)
              << " chi=" << opts.chi;
    if (opts.epsilon) std::cerr << " epsilon=" << fmt_sci(*opts.epsilon);
    std::cerr << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linear quantum systems in doubled form: realizability checks, "
                 "slow/fast reduction, Bogoliubov decomposition"};
    app.require_subcommand(1);

    CommonOpts realize_opts;
    auto* cmd_realize =
        app.add_subcommand("realize", "Build a system from physical parameters");
    cmd_realize->add_option("input", realize_opts.input, "physical_params document")
        ->required();
    cmd_realize->add_option("-o,--output", realize_opts.output, "output path");

    CommonOpts check_opts;
    qsr::CheckOptions check_cfg;
    auto* cmd_check =
        app.add_subcommand("check", "Run the physical-realizability battery");
    cmd_check->add_option("input", check_opts.input, "system document")->required();
    cmd_check->add_option("-o,--output", check_opts.output, "output path");
    cmd_check->add_option("--tol", check_cfg.tol, "pass/fail tolerance");
    cmd_check->add_option("--samples", check_cfg.samples, "number of sample points");
    cmd_check->add_option("--seed", check_cfg.seed, "sampling seed");

    CommonOpts reduce_opts;
    auto* cmd_reduce =
        app.add_subcommand("reduce", "Eliminate the fast block (slow/fast limit)");
    cmd_reduce->add_option("input", reduce_opts.input, "perturbed document")->required();
    cmd_reduce->add_option("-o,--output", reduce_opts.output, "output path");

    CommonOpts respond_opts;
    std::vector<std::string> respond_s;
    auto* cmd_respond =
        app.add_subcommand("respond", "Evaluate the transfer function at points s");
    cmd_respond->add_option("input", respond_opts.input, "system document")->required();
    cmd_respond->add_option("-o,--output", respond_opts.output, "output path");
    cmd_respond->add_option("--s", respond_s, "complex point RE,IM (repeatable)")
        ->required();

    CommonOpts decompose_opts;
    double decompose_tol = qsr::kCheckTol;
    auto* cmd_decompose = app.add_subcommand(
        "decompose", "Split the reduced system into a realizable core and a "
                     "static Bogoliubov component");
    cmd_decompose->add_option("input", decompose_opts.input, "special_class document")
        ->required();
    cmd_decompose->add_option("-o,--output", decompose_opts.output, "output path");
    cmd_decompose->add_option("--tol", decompose_tol, "pass/fail tolerance");

    CommonOpts converge_opts;
    std::string converge_s;
    std::string converge_eps;
    auto* cmd_converge = app.add_subcommand(
        "converge", "Sweep the first-order expansion residual over eps");
    cmd_converge->add_option("input", converge_opts.input, "perturbed document")
        ->required();
    cmd_converge->add_option("-o,--output", converge_opts.output, "output path");
    cmd_converge->add_option("--s", converge_s, "complex point RE,IM")->required();
    cmd_converge->add_option("--eps", converge_eps, "decreasing list E1,E2,...")
        ->required();

    ExampleOpts example_opts;
    auto* cmd_example = app.add_subcommand("example", "Emit a worked example document");
    cmd_example->require_subcommand(1);
    auto* cmd_cavity = cmd_example->add_subcommand(
        "cavity-squeezer", "Two-mode cavity/squeezer slow-fast example");
    cmd_cavity->add_option("--k1", example_opts.k1, "first mirror coupling");
    cmd_cavity->add_option("--k2", example_opts.k2, "second mirror coupling");
    cmd_cavity->add_option("--gamma", example_opts.gamma, "squeezer coupling");
    cmd_cavity->add_option("--chi", example_opts.chi, "squeezing strength RE,IM");
    double epsilon_value = 0.0;
    auto* epsilon_opt =
        cmd_cavity->add_option("--epsilon", epsilon_value,
                               "emit the assembled family member at this scale");
    cmd_cavity->add_option("-o,--output", example_opts.output, "output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cmd_realize->parsed()) return run_realize(realize_opts);
        if (cmd_check->parsed()) return run_check(check_opts, check_cfg);
        if (cmd_reduce->parsed()) return run_reduce(reduce_opts);
        if (cmd_respond->parsed()) return run_respond(respond_opts, respond_s);
        if (cmd_decompose->parsed()) return run_decompose(decompose_opts, decompose_tol);
        if (cmd_converge->parsed())
            return run_converge(converge_opts, converge_s, converge_eps);
        if (cmd_example->parsed()) {
            if (epsilon_opt->count() > 0) example_opts.epsilon = epsilon_value;
            return run_example(example_opts);
        }
        std::cerr << "error: no subcommand selected\n";
        return 2;
    } catch (const qsr::SingularFastDynamics& e) {
        std::cerr << "error [SingularFastDynamics]: " << e.what() << "\n";
        return 3;
    } catch (const qsr::SingularMatrix& e) {
        std::cerr << "error [SingularMatrix]: " << e.what() << "\n";
        return 3;
    } catch (const qsr::InternalInconsistency& e) {
        std::cerr << "error [InternalInconsistency]: " << e.what() << "\n";
        return 3;
    } catch (const qsr::NotRealizable& e) {
        std::cerr << "error [NotRealizable]: " << e.what() << "\n";
        return 2;
    } catch (const qsr::StructureViolation& e) {
        std::cerr << "error [StructureViolation]: " << e.what() << "\n";
        return 2;
    } catch (const qsr::DimensionMismatch& e) {
        std::cerr << "error [DimensionMismatch]: " << e.what() << "\n";
        return 2;
    } catch (const qsr::MalformedInput& e) {
        std::cerr << "error [MalformedInput]: " << e.what() << "\n";
        return 2;
    } catch (const qsr::IoError& e) {
        std::cerr << "error [IoError]: " << e.what() << "\n";
        return 2;
    } catch (const qsr::InvalidParameter& e) {
        std::cerr << "error [InvalidParameter]: " << e.what() << "\n";
        return 2;
    } catch (const qsr::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
