#include "cmvkit/choice_sequence.hpp"

#include <sstream>

namespace cmvkit {

namespace {

bool is_terminating(ContractionClass c) {
    return c == ContractionClass::Isometric || c == ContractionClass::CoIsometric ||
           c == ContractionClass::Unitary;
}

// Polar snap: nearest partial isometry. Used only on declared terminal
// parameters so their defects vanish exactly and the finite CMV closes up.
CMatrix snap_terminal(const CMatrix& g) {
    if (g.rows() == 0 || g.cols() == 0) return g;
    Eigen::JacobiSVD<CMatrix> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

ParamGeometry make_geometry(const CMatrix& gamma, const Tolerances& tol, bool snap) {
    ParamGeometry g;
    g.cls = classify_contraction(gamma, tol.contraction);
    if (g.cls == ContractionClass::NotContraction) throw NotAContraction(operator_norm(gamma));
    g.gamma = (snap && is_terminating(g.cls)) ? snap_terminal(gamma) : gamma;
    g.d = defect(g.gamma, tol.contraction);
    g.dstar = defect_adjoint(g.gamma, tol.contraction);
    g.dom = range_of_hermitian_psd(g.d, tol.rank);
    g.codom = range_of_hermitian_psd(g.dstar, tol.rank);
    return g;
}

} // namespace

std::vector<ParamGeometry> sequence_geometry(const ChoiceSequence& seq, Index count,
                                             const Tolerances& tol) {
    std::vector<ParamGeometry> out;
    out.reserve(static_cast<std::size_t>(count));
    Index dom_dim = seq.input_dim;
    Index codom_dim = seq.output_dim;
    for (Index k = 0; k < count; ++k) {
        CMatrix gamma;
        if (k < seq.size()) {
            gamma = seq.params[static_cast<std::size_t>(k)];
            if (gamma.rows() != codom_dim || gamma.cols() != dom_dim) {
                std::ostringstream os;
                os << "parameter " << k << " is " << gamma.rows() << "x" << gamma.cols()
                   << ", expected " << codom_dim << "x" << dom_dim;
                throw InvalidSequence(os.str());
            }
        } else {
            gamma = CMatrix::Zero(codom_dim, dom_dim);
        }
        const bool terminal = seq.tail == Tail::Terminated && k == seq.size() - 1;
        out.push_back(make_geometry(gamma, tol, terminal));
        dom_dim = out.back().rank();
        codom_dim = out.back().rank_star();
    }
    return out;
}

std::string ValidationReport::to_string() const {
    std::ostringstream os;
    if (ok()) os << "valid\n";
    for (const auto& issue : issues)
        os << "[" << issue.index << "] " << issue.kind << ": " << issue.detail << "\n";
    for (const auto& [idx, sv] : borderline)
        os << "borderline defect singular value " << sv << " at parameter " << idx << "\n";
    return os.str();
}

ValidationReport validate(const ChoiceSequence& seq, const Tolerances& tol) {
    ValidationReport report;
    Index dom_dim = seq.input_dim;
    Index codom_dim = seq.output_dim;
    for (Index k = 0; k < seq.size(); ++k) {
        const CMatrix& gamma = seq.params[static_cast<std::size_t>(k)];
        if (gamma.rows() != codom_dim || gamma.cols() != dom_dim) {
            std::ostringstream os;
            os << gamma.rows() << "x" << gamma.cols() << ", defect dims require " << codom_dim
               << "x" << dom_dim;
            report.issues.push_back({k, "shape", os.str()});
            break; // shapes downstream are undefined now
        }
        const double norm = operator_norm(gamma);
        if (norm > 1.0 + tol.contraction)
            report.issues.push_back({k, "contraction", "operator norm " + std::to_string(norm)});
        const ContractionClass cls = classify_contraction(gamma, tol.contraction);
        if (seq.tail == Tail::Terminated && k == seq.size() - 1 && !is_terminating(cls))
            report.issues.push_back(
                {k, "tail", std::string("terminal parameter has class ") + cmvkit::to_string(cls)});

        // keep walking even past a mild norm violation
        const double slack = std::max(tol.contraction, norm - 1.0 + tol.contraction);
        const CMatrix d = defect(gamma, slack);
        const CMatrix dstar = defect_adjoint(gamma, slack);
        Eigen::SelfAdjointEigenSolver<CMatrix> es(d);
        for (Index i = 0; i < es.eigenvalues().size(); ++i) {
            const double sv = es.eigenvalues()(i);
            if (sv > 0.1 * tol.rank && sv < 10.0 * tol.rank) report.borderline.emplace_back(k, sv);
        }
        dom_dim = range_of_hermitian_psd(d, tol.rank).dim();
        codom_dim = range_of_hermitian_psd(dstar, tol.rank).dim();
    }
    return report;
}

void require_valid(const ChoiceSequence& seq, const Tolerances& tol) {
    const auto report = validate(seq, tol);
    if (!report.ok()) throw InvalidSequence(report.to_string());
}

ChoiceSequence adjoint_sequence(const ChoiceSequence& seq) {
    require_valid(seq);
    ChoiceSequence out;
    out.input_dim = seq.output_dim;
    out.output_dim = seq.input_dim;
    out.tail = seq.tail;
    out.params.reserve(seq.params.size());
    for (const auto& g : seq.params) out.params.push_back(g.adjoint());
    return out;
}

ChoiceSequence shift_sequence(const ChoiceSequence& seq, Index k, const Tolerances& tol) {
    if (k == 0) return seq;
    const auto geo = sequence_geometry(seq, k, tol);
    ChoiceSequence out;
    out.input_dim = geo.back().rank();
    out.output_dim = geo.back().rank_star();
    out.tail = seq.tail;
    for (Index j = k; j < seq.size(); ++j)
        out.params.push_back(seq.params[static_cast<std::size_t>(j)]);
    if (out.params.empty()) out.tail = Tail::ZeroTail;
    return out;
}

TerminationInfo termination_info(const ChoiceSequence& seq, const Tolerances& tol) {
    TerminationInfo info;
    const auto geo = sequence_geometry(seq, seq.size(), tol);
    for (Index k = 0; k < static_cast<Index>(geo.size()); ++k) {
        if (is_terminating(geo[static_cast<std::size_t>(k)].cls)) {
            info.terminated = true;
            info.index = k;
            info.cls = geo[static_cast<std::size_t>(k)].cls;
            return info;
        }
    }
    return info;
}

ChoiceSequence random_choice_sequence(Index m, Index n, Index depth, std::uint64_t seed,
                                      SequenceKind kind) {
    if (m < 0 || n < 0 || depth < 0) throw BadDims("negative dimension or depth");
    Rng rng(seed ^ 0xc0ffee1234ULL);
    ChoiceSequence seq;
    seq.input_dim = m;
    seq.output_dim = n;
    seq.tail = kind == SequenceKind::Pure ? Tail::ZeroTail : Tail::Terminated;

    const Tolerances tol;
    Index dom_dim = m;
    Index codom_dim = n;
    for (Index k = 0; k < depth; ++k) {
        const CMatrix g = random_contraction(codom_dim, dom_dim, rng);
        seq.params.push_back(g);
        const auto geo = make_geometry(g, tol, false);
        dom_dim = geo.rank();
        codom_dim = geo.rank_star();
    }

    switch (kind) {
        case SequenceKind::Pure:
            break;
        case SequenceKind::TerminateUnitary:
            if (dom_dim != codom_dim)
                throw BadDims("unitary terminator needs equal defect dims (input_dim == output_dim)");
            seq.params.push_back(haar_unitary(dom_dim, rng));
            break;
        case SequenceKind::TerminateIsometric:
            if (dom_dim > codom_dim)
                throw BadDims("isometric terminator needs dim D_Gamma <= dim D_Gamma*");
            seq.params.push_back(random_isometry(codom_dim, dom_dim, rng));
            break;
        case SequenceKind::TerminateCoisometric:
            if (codom_dim > dom_dim)
                throw BadDims("co-isometric terminator needs dim D_Gamma* <= dim D_Gamma");
            seq.params.push_back(random_isometry(dom_dim, codom_dim, rng).adjoint());
            break;
    }
    return seq;
}

} // namespace cmvkit
