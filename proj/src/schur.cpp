#include "cmvkit/schur.hpp"

#include <algorithm>
#include <cmath>

namespace cmvkit {

namespace {

using Series = std::vector<CMatrix>;

Series zero_series(Index rows, Index cols, Index count) {
    return Series(static_cast<std::size_t>(count), CMatrix::Zero(rows, cols));
}

// Cauchy product truncated to `count` coefficients.
Series mul(const Series& a, const Series& b, Index count) {
    const Index rows = a.empty() ? 0 : a.front().rows();
    const Index inner = a.empty() ? 0 : a.front().cols();
    const Index cols = b.empty() ? 0 : b.front().cols();
    Series out = zero_series(rows, cols, count);
    for (Index k = 0; k < count; ++k)
        for (Index j = 0; j <= k; ++j) {
            if (j >= static_cast<Index>(a.size()) || k - j >= static_cast<Index>(b.size()))
                continue;
            if (inner == 0) continue;
            out[static_cast<std::size_t>(k)] +=
                a[static_cast<std::size_t>(j)] * b[static_cast<std::size_t>(k - j)];
        }
    return out;
}

// Inverse of a series with invertible constant term.
Series inverse(const Series& a, Index count, double rank_tol) {
    const Index n = a.front().rows();
    Series out = zero_series(n, n, count);
    const CMatrix inv0 = pinv(a.front(), rank_tol);
    out[0] = inv0;
    for (Index k = 1; k < count; ++k) {
        CMatrix acc = CMatrix::Zero(n, n);
        for (Index j = 1; j <= k; ++j) {
            if (j >= static_cast<Index>(a.size())) break;
            acc += a[static_cast<std::size_t>(j)] * out[static_cast<std::size_t>(k - j)];
        }
        out[static_cast<std::size_t>(k)] = -inv0 * acc;
    }
    return out;
}

struct Gamma0Geometry {
    CMatrix gamma;
    CMatrix d, dstar, dp, dstarp;
    Subspace dom, codom;
    ContractionClass cls;
};

Gamma0Geometry gamma0_geometry(const CMatrix& gamma, const Tolerances& tol) {
    Gamma0Geometry g;
    g.cls = classify_contraction(gamma, tol.contraction);
    if (g.cls == ContractionClass::NotContraction) throw NotAContraction(operator_norm(gamma));
    g.gamma = gamma;
    g.d = defect(gamma, tol.contraction);
    g.dstar = defect_adjoint(gamma, tol.contraction);
    g.dom = range_of_hermitian_psd(g.d, tol.rank);
    g.codom = range_of_hermitian_psd(g.dstar, tol.rank);
    g.dp = defect_pinv(g.d, tol.rank);
    g.dstarp = defect_pinv(g.dstar, tol.rank);
    return g;
}

bool terminating(ContractionClass c) {
    return c == ContractionClass::Isometric || c == ContractionClass::CoIsometric ||
           c == ContractionClass::Unitary;
}

} // namespace

SchurFunction SchurFunction::constant(CMatrix gamma) {
    SchurFunction f;
    f.rep_ = SchurRep::Constant;
    f.input_dim_ = gamma.cols();
    f.output_dim_ = gamma.rows();
    f.constant_ = std::move(gamma);
    return f;
}

SchurFunction SchurFunction::from_taylor(std::vector<CMatrix> coeffs) {
    if (coeffs.empty()) throw BadDims("taylor form needs at least one coefficient");
    if (operator_norm(coeffs.front()) > 1.0 + Tolerances{}.contraction)
        throw NotAContraction(operator_norm(coeffs.front()));
    SchurFunction f;
    f.rep_ = SchurRep::Taylor;
    f.input_dim_ = coeffs.front().cols();
    f.output_dim_ = coeffs.front().rows();
    for (const auto& c : coeffs)
        if (c.rows() != f.output_dim_ || c.cols() != f.input_dim_)
            throw ShapeMismatch("taylor coefficients must share one shape");
    f.coeffs_ = std::move(coeffs);
    return f;
}

SchurFunction SchurFunction::from_realization(DiscreteSystem sys) {
    sys.check_shapes();
    SchurFunction f;
    f.rep_ = SchurRep::Realization;
    f.input_dim_ = sys.input_dim();
    f.output_dim_ = sys.output_dim();
    f.system_ = std::make_shared<const DiscreteSystem>(std::move(sys));
    return f;
}

SchurFunction SchurFunction::from_cmv(ChoiceSequence seq, Index depth, const Tolerances& tol) {
    const BlockCmv cmv = build_cmv(seq, depth, CmvVariant::U0, Closure::Clip, tol);
    DiscreteSystem sys;
    const Index n = seq.output_dim, m = seq.input_dim;
    const Index h_rows = cmv.matrix.rows() - n;
    const Index h_cols = cmv.matrix.cols() - m;
    sys.d = cmv.matrix.topLeftCorner(n, m);
    sys.c = cmv.matrix.topRightCorner(n, h_cols);
    sys.b = cmv.matrix.bottomLeftCorner(h_rows, m);
    sys.a = cmv.matrix.bottomRightCorner(h_rows, h_cols);
    SchurFunction f;
    f.rep_ = SchurRep::Cmv;
    f.input_dim_ = m;
    f.output_dim_ = n;
    f.system_ = std::make_shared<const DiscreteSystem>(std::move(sys));
    f.seq_ = std::make_shared<const ChoiceSequence>(std::move(seq));
    f.depth_ = depth;
    return f;
}

const DiscreteSystem* SchurFunction::realization() const { return system_.get(); }
const ChoiceSequence* SchurFunction::cmv_sequence() const { return seq_.get(); }

CMatrix SchurFunction::value(Complex lambda) const {
    if (std::abs(lambda) >= 1.0) throw OutsideDisk(lambda);
    switch (rep_) {
        case SchurRep::Constant:
            return constant_;
        case SchurRep::Taylor: {
            CMatrix acc = CMatrix::Zero(output_dim_, input_dim_);
            Complex p(1.0, 0.0);
            for (const auto& c : coeffs_) {
                acc += p * c;
                p *= lambda;
            }
            return acc;
        }
        case SchurRep::Realization:
        case SchurRep::Cmv: {
            const auto& sys = *system_;
            const Index h = sys.state_dim();
            if (h == 0) return sys.d;
            const CMatrix lhs = CMatrix::Identity(h, h) - lambda * sys.a;
            Eigen::PartialPivLU<CMatrix> lu(lhs);
            const CMatrix x = lu.solve(sys.b);
            if (!(operator_norm(lhs * x - sys.b) <= 1e-8 * std::max(1.0, operator_norm(sys.b))))
                throw SolveFailure("I - lambda*A is numerically singular");
            return sys.d + lambda * sys.c * x;
        }
    }
    throw CmvError("unreachable");
}

std::vector<CMatrix> SchurFunction::taylor(Index count) const {
    std::vector<CMatrix> out;
    out.reserve(static_cast<std::size_t>(count));
    switch (rep_) {
        case SchurRep::Constant: {
            for (Index k = 0; k < count; ++k)
                out.push_back(k == 0 ? constant_ : CMatrix::Zero(output_dim_, input_dim_));
            return out;
        }
        case SchurRep::Taylor: {
            for (Index k = 0; k < count; ++k)
                out.push_back(k < static_cast<Index>(coeffs_.size())
                                  ? coeffs_[static_cast<std::size_t>(k)]
                                  : CMatrix::Zero(output_dim_, input_dim_));
            return out;
        }
        case SchurRep::Realization:
        case SchurRep::Cmv: {
            const auto& sys = *system_;
            if (count > 0) out.push_back(sys.d);
            CMatrix lead = sys.c; // C A^{k-1}
            for (Index k = 1; k < count; ++k) {
                out.push_back(lead * sys.b);
                lead = lead * sys.a;
            }
            return out;
        }
    }
    throw CmvError("unreachable");
}

SchurStep schur_step(const SchurFunction& f, Index taylor_budget, const Tolerances& tol) {
    Index budget = taylor_budget;
    if (budget <= 0)
        budget = f.representation() == SchurRep::Taylor ? f.taylor_size() : 10;
    if (budget < 2) throw DepthExhausted("schur_step needs at least two Taylor coefficients");

    const Series c = f.taylor(budget);
    const Gamma0Geometry g = gamma0_geometry(c.front(), tol);

    SchurStep step;
    step.gamma0 = g.gamma;
    step.gamma0_class = g.cls;
    if (terminating(g.cls)) {
        // D_Gamma or D_Gamma* is {0}; the next iterate is the zero map in the
        // surviving (possibly zero-dimensional) coordinates.
        const Index r = g.cls == ContractionClass::CoIsometric ? g.dom.dim() : 0;
        const Index rs = g.cls == ContractionClass::Isometric ? g.codom.dim() : 0;
        step.iterate = SchurFunction::constant(CMatrix::Zero(rs, r));
        return step;
    }

    const Index r = g.dom.dim(), rs = g.codom.dim();
    // V = Dstar^+ (Theta - Gamma0) D^+ in defect coordinates
    Series v = zero_series(rs, r, budget);
    for (Index k = 1; k < budget; ++k)
        v[static_cast<std::size_t>(k)] = g.codom.basis.adjoint() * g.dstarp *
                                         c[static_cast<std::size_t>(k)] * g.dp * g.dom.basis;
    // Z = (I - V Gamma0*)^{-1} V, Theta_1 = Z / lambda
    const CMatrix gamma_star = g.dom.basis.adjoint() * g.gamma.adjoint() * g.codom.basis;
    Series denom = zero_series(rs, rs, budget);
    denom[0] = CMatrix::Identity(rs, rs);
    for (Index k = 1; k < budget; ++k)
        denom[static_cast<std::size_t>(k)] = -v[static_cast<std::size_t>(k)] * gamma_star;
    const Series z = mul(inverse(denom, budget, tol.rank), v, budget);

    std::vector<CMatrix> iterate;
    iterate.reserve(static_cast<std::size_t>(budget - 1));
    for (Index k = 1; k < budget; ++k) iterate.push_back(z[static_cast<std::size_t>(k)]);
    step.iterate = SchurFunction::from_taylor(std::move(iterate));
    return step;
}

ChoiceSequence schur_parameters(const SchurFunction& f, Index max_params, const Tolerances& tol) {
    if (max_params < 0) throw BadDims("negative parameter count");
    ChoiceSequence seq;
    seq.input_dim = f.input_dim();
    seq.output_dim = f.output_dim();
    seq.tail = Tail::ZeroTail;
    if (max_params == 0) return seq;

    Index budget = 2 * max_params + 4;
    SchurFunction current = f;
    if (f.representation() == SchurRep::Taylor) budget = std::max<Index>(f.taylor_size(), 1);

    for (Index j = 0; j < max_params; ++j) {
        if (budget < 1) throw DepthExhausted("ran out of Taylor data at parameter " +
                                             std::to_string(j));
        if (budget == 1) {
            // the last coefficient still yields one parameter; going further
            // would need data this function does not carry
            const CMatrix gamma0 = current.taylor(1).front();
            const ContractionClass cls = classify_contraction(gamma0, tol.contraction);
            if (cls == ContractionClass::NotContraction)
                throw NotAContraction(operator_norm(gamma0));
            seq.params.push_back(gamma0);
            if (terminating(cls)) {
                seq.tail = Tail::Terminated;
                return seq;
            }
            if (j == max_params - 1) return seq;
            throw DepthExhausted("taylor data exhausted after parameter " + std::to_string(j));
        }
        const SchurStep step = schur_step(current, budget, tol);
        seq.params.push_back(step.gamma0);
        if (terminating(step.gamma0_class)) {
            seq.tail = Tail::Terminated;
            return seq;
        }
        current = step.iterate;
        budget -= 1;
    }
    return seq;
}

ChoiceSequence schur_parameters_from_realization(const DiscreteSystem& sys, Index max_params,
                                                 const Tolerances& tol) {
    sys.check_shapes();
    {
        const double residual = unitarity_residual(sys.colligation());
        if (residual > 10 * tol.residual) throw NotConservative(residual);
    }
    if (!structural_tests(sys, tol.rank).simple) throw NotSimple{};

    ChoiceSequence seq;
    seq.input_dim = sys.input_dim();
    seq.output_dim = sys.output_dim();
    seq.tail = Tail::ZeroTail;
    if (max_params == 0) return seq;

    const Index h = sys.state_dim();
    seq.params.push_back(sys.d);

    // per-level geometry of the extracted parameters
    std::vector<Gamma0Geometry> chain;
    chain.push_back(gamma0_geometry(sys.d, tol));
    if (terminating(chain.back().cls)) {
        seq.tail = Tail::Terminated;
        return seq;
    }

    CMatrix a_power = CMatrix::Identity(h, h); // A^{n-1}
    for (Index n = 1; n < max_params; ++n) {
        // H_{n-1,0} = ker D_{A^{n-1}}
        const Subspace hn = defect_kernel(defect(a_power, 1.0), tol.rank);
        if (hn.dim() == 0) break; // lattice exhausted, remaining parameters are zero blocks

        // v = D^+_{G_{n-1}} ... D^+_{G_0} (B* restricted to H_{n-1,0})
        CMatrix v = sys.b.adjoint() * hn.basis;
        for (const auto& g : chain) v = g.dom.basis.adjoint() * (g.dp * v);

        // u = D*^+ chain applied to C A^{n-1} v*
        CMatrix u = sys.c * a_power * hn.basis * v.adjoint();
        for (const auto& g : chain) u = g.codom.basis.adjoint() * (g.dstarp * u);

        seq.params.push_back(u);
        chain.push_back(gamma0_geometry(u, tol));
        if (terminating(chain.back().cls)) {
            seq.tail = Tail::Terminated;
            return seq;
        }
        a_power = sys.a * a_power;
    }
    return seq;
}

SchurFunction compose_mobius(const CMatrix& gamma, const SchurFunction& next, Index budget,
                             const Tolerances& tol) {
    const Gamma0Geometry g = gamma0_geometry(gamma, tol);
    const Index r = g.dom.dim(), rs = g.codom.dim();
    if (next.input_dim() != r || next.output_dim() != rs)
        throw ShapeMismatch("iterate must map D_Gamma (" + std::to_string(r) + ") to D_Gamma* (" +
                            std::to_string(rs) + "), got " + std::to_string(next.input_dim()) +
                            " -> " + std::to_string(next.output_dim()));
    if (budget < 1) throw BadDims("budget must be positive");

    const Series theta = next.taylor(budget);
    Series z = zero_series(rs, r, budget);
    for (Index k = 1; k < budget; ++k) z[static_cast<std::size_t>(k)] = theta[static_cast<std::size_t>(k - 1)];

    const CMatrix gamma_star = g.dom.basis.adjoint() * g.gamma.adjoint() * g.codom.basis;
    Series denom = zero_series(r, r, budget);
    denom[0] = CMatrix::Identity(r, r);
    for (Index k = 1; k < budget; ++k)
        denom[static_cast<std::size_t>(k)] = gamma_star * z[static_cast<std::size_t>(k)];
    const Series w = mul(z, inverse(denom, budget, tol.rank), budget);

    const CMatrix lift_left = g.dstar * g.codom.basis;  // D_Gamma* embedding
    const CMatrix lift_right = g.dom.basis.adjoint() * g.d;
    std::vector<CMatrix> coeffs;
    coeffs.reserve(static_cast<std::size_t>(budget));
    coeffs.push_back(gamma);
    for (Index k = 1; k < budget; ++k)
        coeffs.push_back(lift_left * w[static_cast<std::size_t>(k)] * lift_right);
    return SchurFunction::from_taylor(std::move(coeffs));
}

SchurFunction function_from_parameters(const ChoiceSequence& seq, Index taylor_budget,
                                       const Tolerances& tol) {
    const Index depth = std::max<Index>(1, taylor_budget / 2 + 2);
    return SchurFunction::from_cmv(seq, depth, tol);
}

PurePart pure_part(const SchurFunction& f, Index taylor_budget, const Tolerances& tol) {
    const Series c = f.taylor(std::max<Index>(taylor_budget, 1));
    const Gamma0Geometry g = gamma0_geometry(c.front(), tol);

    PurePart part;
    part.dom_pure = g.dom;
    part.codom_pure = g.codom;
    part.dom_unitary = defect_kernel(g.d, tol.rank);
    part.codom_unitary = defect_kernel(g.dstar, tol.rank);
    part.unitary_const = part.codom_unitary.basis.adjoint() * g.gamma * part.dom_unitary.basis;

    std::vector<CMatrix> coeffs;
    coeffs.reserve(c.size());
    for (const auto& ck : c) coeffs.push_back(g.codom.basis.adjoint() * ck * g.dom.basis);
    part.pure = SchurFunction::from_taylor(std::move(coeffs));

    double offdiag = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        offdiag = std::max(offdiag, operator_norm(part.codom_unitary.basis.adjoint() * c[k] *
                                                  g.dom.basis));
        offdiag = std::max(offdiag, operator_norm(g.codom.basis.adjoint() * c[k] *
                                                  part.dom_unitary.basis));
    }
    part.offdiag_residual = offdiag;
    return part;
}

CaratheodoryFunction CaratheodoryFunction::from_moments(Index dim, std::vector<CMatrix> s) {
    for (const auto& m : s)
        if (m.rows() != dim || m.cols() != dim) throw ShapeMismatch("moment shape");
    CaratheodoryFunction f;
    f.rep_ = Rep::Moments;
    f.dim_ = dim;
    f.moments_ = std::move(s);
    return f;
}

CaratheodoryFunction CaratheodoryFunction::from_schur(SchurFunction e) {
    if (e.input_dim() != e.output_dim())
        throw ShapeMismatch("Cayley transform needs a square Schur function");
    CaratheodoryFunction f;
    f.rep_ = Rep::Schur;
    f.dim_ = e.input_dim();
    f.schur_ = std::make_shared<const SchurFunction>(std::move(e));
    return f;
}

CaratheodoryFunction CaratheodoryFunction::from_taylor(std::vector<CMatrix> coeffs) {
    if (coeffs.empty()) throw BadDims("need at least F(0)");
    CaratheodoryFunction f;
    f.rep_ = Rep::Taylor;
    f.dim_ = coeffs.front().rows();
    if (coeffs.front().cols() != f.dim_) throw ShapeMismatch("F must be square");
    f.coeffs_ = std::move(coeffs);
    return f;
}

CMatrix CaratheodoryFunction::value(Complex lambda) const {
    if (std::abs(lambda) >= 1.0) throw OutsideDisk(lambda);
    switch (rep_) {
        case Rep::Moments: {
            CMatrix acc = CMatrix::Identity(dim_, dim_);
            Complex p = 2.0 * lambda;
            for (const auto& s : moments_) {
                acc += p * s;
                p *= lambda;
            }
            return acc;
        }
        case Rep::Schur: {
            const CMatrix e = schur_->value(lambda);
            const CMatrix id = CMatrix::Identity(dim_, dim_);
            Eigen::PartialPivLU<CMatrix> lu(id - lambda * e);
            return (id + lambda * e) * lu.inverse();
        }
        case Rep::Taylor: {
            CMatrix acc = CMatrix::Zero(dim_, dim_);
            Complex p(1.0, 0.0);
            for (const auto& c : coeffs_) {
                acc += p * c;
                p *= lambda;
            }
            return acc;
        }
    }
    throw CmvError("unreachable");
}

std::vector<CMatrix> CaratheodoryFunction::taylor(Index count) const {
    std::vector<CMatrix> out;
    out.reserve(static_cast<std::size_t>(count));
    switch (rep_) {
        case Rep::Moments: {
            for (Index k = 0; k < count; ++k) {
                if (k == 0)
                    out.push_back(CMatrix::Identity(dim_, dim_));
                else if (k - 1 < static_cast<Index>(moments_.size()))
                    out.push_back(2.0 * moments_[static_cast<std::size_t>(k - 1)]);
                else
                    out.push_back(CMatrix::Zero(dim_, dim_));
            }
            return out;
        }
        case Rep::Schur: {
            // F = (I + lambda E) (I - lambda E)^{-1}
            const Series e = schur_->taylor(count);
            Series num = zero_series(dim_, dim_, count);
            Series den = zero_series(dim_, dim_, count);
            num[0] = CMatrix::Identity(dim_, dim_);
            den[0] = CMatrix::Identity(dim_, dim_);
            for (Index k = 1; k < count; ++k) {
                num[static_cast<std::size_t>(k)] = e[static_cast<std::size_t>(k - 1)];
                den[static_cast<std::size_t>(k)] = -e[static_cast<std::size_t>(k - 1)];
            }
            return mul(num, inverse(den, count, Tolerances{}.rank), count);
        }
        case Rep::Taylor: {
            for (Index k = 0; k < count; ++k)
                out.push_back(k < static_cast<Index>(coeffs_.size())
                                  ? coeffs_[static_cast<std::size_t>(k)]
                                  : CMatrix::Zero(dim_, dim_));
            return out;
        }
    }
    throw CmvError("unreachable");
}

SchurFunction schur_from_cara(const CaratheodoryFunction& f, Index budget, const Tolerances& tol) {
    if (budget < 1) throw BadDims("budget must be positive");
    const Series c = f.taylor(budget + 1);
    const Index n = f.dim();
    if (operator_norm(c.front() - CMatrix::Identity(n, n)) > 1e-8)
        throw NotNormalized("F(0) != I");
    // E = (1/lambda) (F - I)(F + I)^{-1}
    Series num = c, den = c;
    num[0] = CMatrix::Zero(n, n);
    den[0] = 2.0 * CMatrix::Identity(n, n);
    const Series e_shifted = mul(num, inverse(den, budget + 1, tol.rank), budget + 1);
    std::vector<CMatrix> coeffs;
    coeffs.reserve(static_cast<std::size_t>(budget));
    for (Index k = 1; k <= budget; ++k) coeffs.push_back(e_shifted[static_cast<std::size_t>(k)]);
    return SchurFunction::from_taylor(std::move(coeffs));
}

CaratheodoryFunction cara_from_schur(const SchurFunction& e) {
    return CaratheodoryFunction::from_schur(e);
}

} // namespace cmvkit
