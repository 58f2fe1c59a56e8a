#include "cmvkit/dilations.hpp"

#include <algorithm>
#include <cmath>

namespace cmvkit {

namespace {

CMatrix embedding(Index ambient, Index dim) {
    CMatrix e = CMatrix::Zero(ambient, dim);
    e.topRows(dim) = CMatrix::Identity(dim, dim);
    return e;
}

// rank of span{U^k E : |k| <= powers}; negative powers via the adjoint.
Index orbit_rank(const CMatrix& u, const CMatrix& e, Index powers, double rank_tol) {
    const Index dim = u.rows();
    const Index cols = e.cols();
    CMatrix span(dim, (2 * powers + 1) * cols);
    CMatrix fwd = e, bwd = e;
    span.middleCols(powers * cols, cols) = e;
    for (Index k = 1; k <= powers; ++k) {
        fwd = u * fwd;
        bwd = u.adjoint() * bwd;
        span.middleCols((powers + k) * cols, cols) = fwd;
        span.middleCols((powers - k) * cols, cols) = bwd;
    }
    return rank_of(span, rank_tol);
}

} // namespace

void require_normalized(const MatrixMeasure& mu, const Tolerances& tol) {
    if (mu.dim < 0) throw BadDims("negative measure dimension");
    CMatrix total = CMatrix::Zero(mu.dim, mu.dim);
    for (const auto& atom : mu.atoms) {
        if (std::abs(std::abs(atom.zeta) - 1.0) > 1e-12)
            throw NotNormalized("atom off the unit circle: |zeta| = " +
                                std::to_string(std::abs(atom.zeta)));
        if (atom.weight.rows() != mu.dim || atom.weight.cols() != mu.dim)
            throw NotNormalized("weight block has wrong shape");
        if (operator_norm(atom.weight - atom.weight.adjoint()) > 1e-10)
            throw NotNormalized("weight not Hermitian");
        Eigen::SelfAdjointEigenSolver<CMatrix> es(atom.weight);
        if (es.eigenvalues().size() > 0 && es.eigenvalues().minCoeff() < -1e-10)
            throw NotNormalized("weight not positive semidefinite");
        total += atom.weight;
    }
    if (operator_norm(total - CMatrix::Identity(mu.dim, mu.dim)) > 1e-10)
        throw NotNormalized("weights do not sum to the identity");
    (void)tol;
}

CMatrix moments(const MatrixMeasure& mu, Index n) {
    CMatrix s = CMatrix::Zero(mu.dim, mu.dim);
    for (const auto& atom : mu.atoms) {
        // integer powers by repeated multiplication (no branch-cut dirt)
        Complex p(1.0, 0.0);
        const Complex base = n >= 0 ? std::conj(atom.zeta) : atom.zeta; // 1/zeta = conj on |zeta|=1
        for (Index k = 0; k < std::abs(n); ++k) p *= base;
        s += p * atom.weight;
    }
    return s;
}

CaratheodoryFunction caratheodory_of_measure(const MatrixMeasure& mu) {
    require_normalized(mu);
    std::vector<CMatrix> horizon;
    for (Index n = 1; n <= 64; ++n) horizon.push_back(moments(mu, n));
    return CaratheodoryFunction::from_moments(mu.dim, std::move(horizon));
}

BlockCmv unitary_dilation(const CMatrix& t, Index depth, const Tolerances& tol) {
    if (t.rows() != t.cols()) throw NonSquare{};
    if (!is_contraction(t, tol.contraction)) throw NotAContraction(operator_norm(t));
    if (depth < 1) throw BadDims("depth must be >= 1");
    ChoiceSequence seq;
    seq.input_dim = t.cols();
    seq.output_dim = t.rows();
    seq.params = {t};
    const ContractionClass cls = classify_contraction(t, tol.contraction);
    seq.tail = cls == ContractionClass::Unitary ? Tail::Terminated : Tail::ZeroTail;
    return build_cmv(seq, depth, CmvVariant::U0, Closure::Auto, tol);
}

DilationReport dilation_check(const CMatrix& t, const BlockCmv& cmv, Index n_max,
                              const Tolerances& tol) {
    if (n_max > cmv.depth)
        throw PowerBudgetExceeded("power " + std::to_string(n_max) +
                                  " exceeds window depth " + std::to_string(cmv.depth));
    const Index h = t.rows();
    DilationReport report;
    report.max_power = n_max;
    report.threshold = tol.residual;
    report.space_dim = cmv.matrix.rows();

    CMatrix upow = CMatrix::Identity(cmv.matrix.rows(), cmv.matrix.cols());
    CMatrix tpow = CMatrix::Identity(h, h);
    for (Index n = 1; n <= n_max; ++n) {
        upow = cmv.matrix * upow;
        tpow = t * tpow;
        report.residuals.push_back(operator_norm(tpow - upow.topLeftCorner(h, h)));
    }
    report.worst_residual =
        report.residuals.empty() ? 0.0
                                 : *std::max_element(report.residuals.begin(), report.residuals.end());

    const CMatrix e = embedding(cmv.matrix.rows(), h);
    report.minimality_rank = orbit_rank(cmv.matrix, e, cmv.depth, tol.rank);
    report.minimal = report.minimality_rank == report.space_dim;
    report.pass = report.worst_residual <= report.threshold && report.minimal;
    return report;
}

VerblunskyResult verblunsky_from_measure(const MatrixMeasure& mu, Index max_params,
                                         const Tolerances& tol) {
    require_normalized(mu, tol);
    if (max_params < 1) throw BadDims("need at least one parameter");
    const Index budget = 2 * max_params + 4;
    std::vector<CMatrix> f_coeffs;
    f_coeffs.push_back(CMatrix::Identity(mu.dim, mu.dim));
    for (Index n = 1; n <= budget; ++n) f_coeffs.push_back(2.0 * moments(mu, n));
    const SchurFunction e =
        schur_from_cara(CaratheodoryFunction::from_taylor(std::move(f_coeffs)), budget, tol);

    VerblunskyResult result;
    result.seq = schur_parameters(e, max_params, tol);
    result.terminated = result.seq.tail == Tail::Terminated;
    result.termination_index = result.terminated ? result.seq.size() - 1 : 0;
    return result;
}

NaimarkResult naimark_dilation(const MatrixMeasure& mu, Index depth, Index n_max,
                               const Tolerances& tol) {
    require_normalized(mu, tol);
    if (depth < 1) throw BadDims("depth must be >= 1");
    NaimarkResult result;
    result.verblunsky = verblunsky_from_measure(mu, 2 * depth + 1, tol);
    result.cmv = build_cmv(result.verblunsky.seq, depth, CmvVariant::U0, Closure::Auto, tol);

    DilationReport& report = result.report;
    report.max_power = std::min(n_max, depth);
    report.threshold = 1e-9;
    report.space_dim = result.cmv.matrix.rows();

    const Index m = mu.dim;
    const CMatrix& u = result.cmv.matrix;
    CMatrix upow = CMatrix::Identity(u.rows(), u.cols());
    report.residuals.push_back(operator_norm(moments(mu, 0) - CMatrix::Identity(m, m)));
    for (Index n = 1; n <= report.max_power; ++n) {
        upow = u * upow;
        // S_n and, via the adjoint, S_{-n} = S_n*
        const CMatrix compressed = upow.topLeftCorner(m, m);
        const double fwd = operator_norm(moments(mu, n) - compressed);
        const double bwd = operator_norm(moments(mu, -n) - compressed.adjoint());
        report.residuals.push_back(std::max(fwd, bwd));
    }
    report.worst_residual =
        *std::max_element(report.residuals.begin(), report.residuals.end());

    const CMatrix e = embedding(u.rows(), m);
    report.minimality_rank = orbit_rank(u, e, result.cmv.depth, tol.rank);
    report.minimal = report.minimality_rank == report.space_dim;
    report.pass = report.worst_residual <= report.threshold && report.minimal;
    return result;
}

CyclicModel cyclic_model(const CMatrix& u, const Subspace& m_basis, Index depth,
                         const Tolerances& tol) {
    if (u.rows() != u.cols()) throw NonSquare{};
    {
        const double residual = unitarity_residual(u);
        if (residual > 10 * tol.residual) throw NotUnitary(residual);
    }
    const Index dim = u.rows();
    if (m_basis.ambient_dim != dim || m_basis.dim() == 0)
        throw BadDims("subspace does not live in the operator's space");
    if (orbit_rank(u, m_basis.basis, dim, tol.rank) != dim) throw NotCyclic{};

    const Index m = m_basis.dim();
    const Index budget = 4 * dim + 8;
    // F*_M(conj lambda) = I + 2 sum lambda^n P_M U^n |_M
    std::vector<CMatrix> f_coeffs;
    f_coeffs.push_back(CMatrix::Identity(m, m));
    CMatrix upow = CMatrix::Identity(dim, dim);
    for (Index n = 1; n <= budget; ++n) {
        upow = u * upow;
        f_coeffs.push_back(2.0 * m_basis.basis.adjoint() * upow * m_basis.basis);
    }
    const SchurFunction theta =
        schur_from_cara(CaratheodoryFunction::from_taylor(std::move(f_coeffs)), budget, tol);

    CyclicModel model;
    model.seq = schur_parameters(theta, 2 * depth + 1, tol);
    model.cmv = build_cmv(model.seq, depth, CmvVariant::U0, Closure::Auto, tol);

    // sampled recovery of F~(lambda) = P_M (I + lambda U)(I - lambda U)^{-1} |_M
    double worst = 0.0;
    const CMatrix id = CMatrix::Identity(dim, dim);
    const Index dim2 = model.cmv.matrix.rows();
    const CMatrix id2 = CMatrix::Identity(dim2, dim2);
    const CMatrix e2 = embedding(dim2, m);
    for (int k = 0; k < 8; ++k) {
        const Complex lambda = 0.4 * std::exp(Complex(0, 2.0 * M_PI * k / 8.0));
        const CMatrix lhs = m_basis.basis.adjoint() *
                            ((id + lambda * u) *
                             Eigen::PartialPivLU<CMatrix>(id - lambda * u).inverse()) *
                            m_basis.basis;
        const CMatrix rhs =
            e2.adjoint() *
            ((id2 + lambda * model.cmv.matrix) *
             Eigen::PartialPivLU<CMatrix>(id2 - lambda * model.cmv.matrix).inverse()) *
            e2;
        worst = std::max(worst, operator_norm(lhs - rhs));
    }
    model.transfer_residual = worst;
    return model;
}

} // namespace cmvkit
