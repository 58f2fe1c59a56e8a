// Command-line surface for the CMV toolkit: build block CMV matrices from
// choice sequences, run the Schur algorithm in both directions, construct
// dilations, and verify the library invariants.

#include <complex>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cmvkit/dilations.hpp"
#include "cmvkit/io.hpp"
#include "cmvkit/schur.hpp"
#include "cmvkit/systems.hpp"
#include "cmvkit/verify.hpp"

namespace {

using namespace cmvkit;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Tolerances tolerances_from_env() {
    Tolerances tol;
    if (const char* env = std::getenv("CMVKIT_TOL")) {
        const std::string s(env);
        const auto comma = s.find(',');
        try {
            tol.rank = std::stod(s.substr(0, comma));
            if (comma != std::string::npos) tol.residual = std::stod(s.substr(comma + 1));
        } catch (const std::exception&) {
            throw UsageError("CMVKIT_TOL must be '<rank>[,<residual>]'");
        }
    }
    return tol;
}

Complex parse_point(const std::string& s) {
    const auto comma = s.find(',');
    try {
        const double re = std::stod(s.substr(0, comma));
        const double im = comma == std::string::npos ? 0.0 : std::stod(s.substr(comma + 1));
        return {re, im};
    } catch (const std::exception&) {
        throw UsageError("point must be '<re>[,<im>]'");
    }
}

json load_input(const std::string& path) {
    try {
        return io::load(path);
    } catch (const std::exception& e) {
        throw UsageError(std::string("cannot read ") + path + ": " + e.what());
    }
}

SchurFunction load_function(const std::string& taylor_path, const std::string& system_path,
                            const std::string& seq_path, Index depth, const Tolerances& tol) {
    const int given = !taylor_path.empty() + !system_path.empty() + !seq_path.empty();
    if (given != 1) throw UsageError("give exactly one of --taylor, --realization, --cmv");
    if (!taylor_path.empty()) {
        std::vector<CMatrix> coeffs;
        for (const auto& c : load_input(taylor_path).at("coefficients"))
            coeffs.push_back(io::matrix_from_json(c));
        return SchurFunction::from_taylor(std::move(coeffs));
    }
    if (!system_path.empty())
        return SchurFunction::from_realization(io::system_from_json(load_input(system_path)));
    ChoiceSequence seq = io::sequence_from_json(load_input(seq_path));
    if (depth <= 0) depth = recommended_depth(seq, tol);
    return SchurFunction::from_cmv(std::move(seq), depth, tol);
}

int cmd_build_cmv(const std::string& seq_path, Index depth, const std::string& variant,
                  const std::string& closure, const std::string& out, const Tolerances& tol) {
    const ChoiceSequence seq = io::sequence_from_json(load_input(seq_path));
    if (depth < 0) depth = recommended_depth(seq, tol);
    const CmvVariant v = variant == "u0_tilde" ? CmvVariant::U0Tilde : CmvVariant::U0;
    Closure c = Closure::Auto;
    if (closure == "cap") c = Closure::Cap;
    if (closure == "clip") c = Closure::Clip;
    const BlockCmv cmv = build_cmv(seq, depth, v, c, tol);

    json report;
    const bool square = cmv.matrix.rows() == cmv.matrix.cols();
    const double residual = square ? unitarity_residual(cmv.matrix) : -1.0;
    report["unitarity_residual"] = residual;
    report["exact_unitary"] = cmv.exact_unitary;
    report["capped"] = cmv.capped;
    report["factor_residual"] =
        operator_norm(cmv.matrix - cmv.factor_left * cmv.factor_right);

    json doc = io::to_json(cmv);
    doc["report"] = report;
    io::save(out, doc);
    std::cout << "wrote " << out << "; unitarity residual "
              << (square ? std::to_string(residual) : std::string("n/a (rectangular window)"))
              << (cmv.exact_unitary ? " (exact closure)" : " (compression window)") << "\n";
    if (cmv.exact_unitary && residual > tol.residual) return kExitValidation;
    return kExitOk;
}

int cmd_truncate(const std::string& seq_path, Index depth, const std::string& variant,
                 const std::string& out, const Tolerances& tol) {
    const ChoiceSequence seq = io::sequence_from_json(load_input(seq_path));
    if (depth < 0) depth = recommended_depth(seq, tol);
    const TruncVariant v = variant == "t0_tilde" ? TruncVariant::T0Tilde : TruncVariant::T0;
    const TruncatedCmv t = build_truncated(seq, depth, v, Closure::Auto, tol);
    json doc = io::to_json(t);
    doc["report"] = {{"norm", operator_norm(t.matrix)},
                     {"factor_residual",
                      operator_norm(t.matrix - t.factor_left * t.factor_right)}};
    io::save(out, doc);
    std::cout << "wrote " << out << "; ||T0|| = " << operator_norm(t.matrix) << "\n";
    if (operator_norm(t.matrix) > 1.0 + 1e-12) return kExitValidation;
    return kExitOk;
}

int cmd_schur_params(const SchurFunction& f, Index count, const std::string& out,
                     const Tolerances& tol) {
    const ChoiceSequence seq = schur_parameters(f, count, tol);
    json doc = io::to_json(seq);
    doc["report"] = {{"extracted", seq.size()},
                     {"terminated", seq.tail == Tail::Terminated}};
    io::save(out, doc);
    std::cout << "wrote " << out << "; " << seq.size() << " parameters"
              << (seq.tail == Tail::Terminated ? " (terminated)" : "") << "\n";
    return kExitOk;
}

int cmd_schur_iterate(const SchurFunction& f, Index iterate, Index budget,
                      const std::string& out, const Tolerances& tol) {
    SchurFunction current = f;
    json gammas = json::array();
    Index remaining = budget;
    for (Index k = 0; k < iterate; ++k) {
        if (remaining < 2) throw DepthExhausted("budget exhausted before iterate " + std::to_string(k + 1));
        const auto step = schur_step(current, remaining, tol);
        gammas.push_back(io::to_json(step.gamma0));
        current = step.iterate;
        remaining -= 1;
    }
    json coeffs = json::array();
    for (const auto& c : current.taylor(remaining)) coeffs.push_back(io::to_json(c));
    io::save(out, {{"iterate", iterate}, {"gammas", gammas}, {"coefficients", coeffs}});
    std::cout << "wrote " << out << "\n";
    return kExitOk;
}

int cmd_transfer(const std::string& system_path, const std::vector<std::string>& points,
                 Index taylor_count, const std::string& out) {
    const DiscreteSystem sys = io::system_from_json(load_input(system_path));
    const SchurFunction f = transfer_function(sys);
    json doc;
    doc["class"] = to_string(classify_system(sys));
    if (taylor_count > 0) {
        json coeffs = json::array();
        for (const auto& c : f.taylor(taylor_count)) coeffs.push_back(io::to_json(c));
        doc["coefficients"] = coeffs;
    }
    json values = json::array();
    for (const auto& p : points) {
        const Complex lambda = parse_point(p);
        values.push_back({{"lambda", {lambda.real(), lambda.imag()}},
                          {"value", io::to_json(f.value(lambda))}});
    }
    doc["values"] = values;
    io::save(out, doc);
    std::cout << "wrote " << out << "\n";
    return kExitOk;
}

int cmd_charfn(const std::string& matrix_path, const std::string& out, const Tolerances& tol) {
    const CMatrix t = io::matrix_from_json(load_input(matrix_path));
    const SchurFunction phi = characteristic_function(t, tol);
    json doc = io::to_json(*phi.realization());
    doc["input_dim"] = phi.input_dim();
    doc["output_dim"] = phi.output_dim();
    io::save(out, doc);
    std::cout << "wrote " << out << "; defect dims " << phi.input_dim() << " -> "
              << phi.output_dim() << "\n";
    return kExitOk;
}

int cmd_dilate(const std::string& matrix_path, Index depth, Index check, const std::string& out,
               const Tolerances& tol) {
    const CMatrix t = io::matrix_from_json(load_input(matrix_path));
    const BlockCmv cmv = unitary_dilation(t, depth, tol);
    const DilationReport report = dilation_check(t, cmv, check > 0 ? check : depth, tol);
    json doc = io::to_json(cmv);
    doc["report"] = io::to_json(report);
    io::save(out, doc);
    std::cout << "wrote " << out << "; worst power residual " << report.worst_residual
              << (report.minimal ? ", minimal" : ", NOT minimal") << "\n";
    return report.pass ? kExitOk : kExitValidation;
}

int cmd_naimark(const std::string& measure_path, Index depth, Index check, const std::string& out,
                const Tolerances& tol) {
    const MatrixMeasure mu = io::measure_from_json(load_input(measure_path));
    const NaimarkResult result = naimark_dilation(mu, depth, check > 0 ? check : depth, tol);
    json doc = io::to_json(result.cmv);
    doc["report"] = io::to_json(result.report);
    doc["verblunsky"] = io::to_json(result.verblunsky.seq);
    doc["terminated"] = result.verblunsky.terminated;
    io::save(out, doc);
    std::cout << "wrote " << out << "; worst moment residual " << result.report.worst_residual
              << (result.report.minimal ? ", minimal" : ", NOT minimal") << "\n";
    return result.report.pass ? kExitOk : kExitValidation;
}

int cmd_cyclic(const std::string& matrix_path, const std::string& subspace_path, Index depth,
               const std::string& out, const Tolerances& tol) {
    const CMatrix u = io::matrix_from_json(load_input(matrix_path));
    const CMatrix cols = io::matrix_from_json(load_input(subspace_path));
    // orthonormalize the provided spanning columns
    Subspace m = range_subspace(cols, tol.rank);
    if (depth <= 0) depth = u.rows();
    const CyclicModel model = cyclic_model(u, m, depth, tol);
    json doc;
    doc["sequence"] = io::to_json(model.seq);
    doc["cmv"] = io::to_json(model.cmv);
    doc["transfer_residual"] = model.transfer_residual;
    io::save(out, doc);
    std::cout << "wrote " << out << "; transfer residual " << model.transfer_residual << "\n";
    return model.transfer_residual <= 1e-9 ? kExitOk : kExitValidation;
}

int cmd_verify(std::uint64_t seed, int cases, const std::string& out, const Tolerances& tol) {
    const auto results = run_verification(seed, cases, tol);
    bool all_pass = true;
    json doc = json::array();
    for (const auto& r : results) {
        all_pass = all_pass && r.pass;
        std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  worst " << r.worst
                  << "  (threshold " << r.threshold << ", " << r.cases << " cases)";
        if (!r.note.empty()) std::cout << "  [" << r.note << "]";
        std::cout << "\n";
        doc.push_back({{"name", r.name},
                       {"worst", r.worst},
                       {"threshold", r.threshold},
                       {"cases", r.cases},
                       {"pass", r.pass},
                       {"note", r.note}});
    }
    if (!out.empty()) io::save(out, {{"seed", seed}, {"cases", cases}, {"checks", doc}});
    std::cout << (all_pass ? "all checks passed" : "SOME CHECKS FAILED") << "\n";
    return all_pass ? kExitOk : kExitValidation;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Block operator CMV matrices, the operator Schur algorithm, and dilations"};
    app.require_subcommand(1);

    std::string seq_path, matrix_path, system_path, taylor_path, measure_path, subspace_path;
    std::string out = "out.json", variant = "u0", closure = "auto";
    Index depth = -1, count = 8, check = 0, iterate = 1, taylor_count = 0;
    std::vector<std::string> points;
    std::uint64_t seed = 7;
    int cases = 25;

    Tolerances tol;
    try {
        tol = tolerances_from_env();
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    app.add_option("--rank-tol", tol.rank, "singular value cutoff (default 1e-9)");
    app.add_option("--residual-tol", tol.residual, "identity threshold (default 1e-10)");
    app.add_option("--contraction-tol", tol.contraction, "norm slack (default 1e-8)");

    auto* build = app.add_subcommand("build-cmv", "assemble a block CMV matrix");
    build->add_option("--seq", seq_path, "choice sequence file")->required();
    build->add_option("--depth", depth, "window depth (default: recommended)");
    build->add_option("--variant", variant, "u0 | u0_tilde");
    build->add_option("--closure", closure, "auto | cap | clip");
    build->add_option("-o,--out", out, "output file");

    auto* trunc = app.add_subcommand("truncate", "truncated block CMV matrix");
    trunc->add_option("--seq", seq_path, "choice sequence file")->required();
    trunc->add_option("--depth", depth, "window depth");
    trunc->add_option("--variant", variant, "t0 | t0_tilde");
    trunc->add_option("-o,--out", out, "output file");

    auto* params = app.add_subcommand("schur-params", "extract Schur parameters");
    params->add_option("--taylor", taylor_path, "taylor coefficient file");
    params->add_option("--realization", system_path, "system file");
    params->add_option("--cmv", seq_path, "choice sequence file (function via its CMV realization)");
    params->add_option("--depth", depth, "cmv window depth");
    params->add_option("-N,--count", count, "parameters to extract");
    params->add_option("-o,--out", out, "output file");

    auto* iter = app.add_subcommand("schur-iterate", "k-th Schur iterate");
    iter->add_option("--taylor", taylor_path, "taylor coefficient file");
    iter->add_option("--realization", system_path, "system file");
    iter->add_option("--cmv", seq_path, "choice sequence file");
    iter->add_option("--depth", depth, "cmv window depth");
    iter->add_option("-k,--iterate", iterate, "iterate index");
    iter->add_option("--budget", count, "taylor budget");
    iter->add_option("-o,--out", out, "output file");

    auto* transfer = app.add_subcommand("transfer", "evaluate/expand a transfer function");
    transfer->add_option("--system", system_path, "system file")->required();
    transfer->add_option("--at", points, "evaluation points re[,im]");
    transfer->add_option("--taylor", taylor_count, "emit this many coefficients");
    transfer->add_option("-o,--out", out, "output file");

    auto* charfn = app.add_subcommand("charfn", "characteristic function of a contraction");
    charfn->add_option("--matrix", matrix_path, "matrix file")->required();
    charfn->add_option("-o,--out", out, "output file");

    auto* dilate = app.add_subcommand("dilate", "minimal unitary dilation as a CMV matrix");
    dilate->add_option("--matrix", matrix_path, "contraction file")->required();
    dilate->add_option("--depth", depth, "window depth")->required();
    dilate->add_option("--check", check, "powers to verify (default: depth)");
    dilate->add_option("-o,--out", out, "output file");

    auto* naimark = app.add_subcommand("naimark", "minimal Naimark dilation of a measure");
    naimark->add_option("--measure", measure_path, "measure file")->required();
    naimark->add_option("--depth", depth, "window depth")->required();
    naimark->add_option("--check", check, "moments to verify (default: depth)");
    naimark->add_option("-o,--out", out, "output file");

    auto* cyclic = app.add_subcommand("cyclic-model", "CMV model of a unitary with cyclic subspace");
    cyclic->add_option("--matrix", matrix_path, "unitary matrix file")->required();
    cyclic->add_option("--subspace", subspace_path, "columns spanning the cyclic subspace")->required();
    cyclic->add_option("--depth", depth, "window depth (default: dim)");
    cyclic->add_option("-o,--out", out, "output file");

    auto* verify = app.add_subcommand("verify", "run the invariant battery");
    verify->add_option("--seed", seed, "rng seed");
    verify->add_option("--cases", cases, "cases per invariant");
    verify->add_option("-o,--out", out, "optional json report");
    verify->add_flag("--no-report", "print only");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (build->parsed())
            return cmd_build_cmv(seq_path, depth, variant, closure, out, tol);
        if (trunc->parsed()) return cmd_truncate(seq_path, depth, variant, out, tol);
        if (params->parsed())
            return cmd_schur_params(load_function(taylor_path, system_path, seq_path, depth, tol),
                                    count, out, tol);
        if (iter->parsed())
            return cmd_schur_iterate(load_function(taylor_path, system_path, seq_path, depth, tol),
                                     iterate, std::max<Index>(count, 2 * iterate + 4), out, tol);
        if (transfer->parsed()) return cmd_transfer(system_path, points, taylor_count, out);
        if (charfn->parsed()) return cmd_charfn(matrix_path, out, tol);
        if (dilate->parsed()) return cmd_dilate(matrix_path, depth, check, out, tol);
        if (naimark->parsed()) return cmd_naimark(measure_path, depth, check, out, tol);
        if (cyclic->parsed()) return cmd_cyclic(matrix_path, subspace_path, depth, out, tol);
        if (verify->parsed())
            return cmd_verify(seed, cases, verify->count("--no-report") ? "" : out, tol);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const CmvError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitUsage;
}
