#include "cmvkit/cmv.hpp"

#include <algorithm>

namespace cmvkit {

namespace {

CMatrix rotation_of(const ParamGeometry& g) {
    const Index rows = g.gamma.rows() + g.rank();
    const Index cols = g.gamma.cols() + g.rank_star();
    CMatrix j(rows, cols);
    j.topLeftCorner(g.gamma.rows(), g.gamma.cols()) = g.gamma;
    j.topRightCorner(g.gamma.rows(), g.rank_star()) = g.dstar * g.codom.basis;
    j.bottomLeftCorner(g.rank(), g.gamma.cols()) = g.dom.basis.adjoint() * g.d;
    j.bottomRightCorner(g.rank(), g.rank_star()) =
        -g.dom.basis.adjoint() * g.gamma.adjoint() * g.codom.basis;
    return j;
}

struct DiagonalBuilder {
    std::vector<CMatrix> blocks;
    Index rows = 0, cols = 0;

    void push(CMatrix block) {
        rows += block.rows();
        cols += block.cols();
        blocks.push_back(std::move(block));
    }

    CMatrix assemble() const {
        CMatrix out = CMatrix::Zero(rows, cols);
        Index r = 0, c = 0;
        for (const auto& b : blocks) {
            out.block(r, c, b.rows(), b.cols()) = b;
            r += b.rows();
            c += b.cols();
        }
        return out;
    }
};

bool is_numerically_zero(const CMatrix& m) {
    return m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0;
}

Layout pair_layout(Index lead, const std::vector<Index>& first, const std::vector<Index>& second) {
    Layout layout;
    layout.emplace_back(0, lead);
    Index off = lead;
    for (std::size_t i = 0; i < first.size(); ++i) {
        const Index size = first[i] + second[i];
        layout.emplace_back(off, size);
        off += size;
    }
    return layout;
}

} // namespace

CMatrix elementary_rotation(const CMatrix& gamma, const Tolerances& tol) {
    ChoiceSequence probe;
    probe.input_dim = gamma.cols();
    probe.output_dim = gamma.rows();
    probe.params = {gamma};
    const auto geo = sequence_geometry(probe, 1, tol);
    return rotation_of(geo.front());
}

CMatrix elementary_rotation(const CMatrix& gamma, ContractionClass tag, const Tolerances& tol) {
    const ContractionClass actual = classify_contraction(gamma, tol.contraction);
    const bool compatible =
        actual == tag ||
        (tag == ContractionClass::Generic &&
         (actual == ContractionClass::Pure || actual == ContractionClass::Generic)) ||
        (tag == ContractionClass::Pure && actual == ContractionClass::Pure);
    if (!compatible)
        throw TagMismatch(std::string(to_string(tag)) + " given, contraction is " + to_string(actual));
    return elementary_rotation(gamma, tol);
}

FactorSet build_factors(const ChoiceSequence& seq, Index depth, Closure closure,
                        const Tolerances& tol) {
    if (depth < 0) throw BadDims("negative depth");
    require_valid(seq, tol);
    auto geo = sequence_geometry(seq, 2 * depth + 1, tol);

    FactorSet fs;
    fs.depth = depth;

    // Closure decision for the parameter at slot 2*depth, whose rotation
    // would straddle the window boundary.
    auto& tail = geo.back();
    const bool tail_void = tail.gamma.rows() == 0 && tail.gamma.cols() == 0;
    const bool tail_unitary =
        tail.cls == ContractionClass::Unitary && tail.rank() == 0 && tail.rank_star() == 0;
    if (tail_void || tail_unitary) {
        fs.exact = true; // sequence terminated inside the window
    } else {
        const bool cappable = depth > 0 && tail.gamma.rows() == tail.gamma.cols() &&
                              is_numerically_zero(tail.gamma);
        const bool want_cap = closure == Closure::Cap || (closure == Closure::Auto && cappable);
        if (want_cap) {
            if (!cappable)
                throw InvalidSequence("no exact closure: slot 2*depth is not a square zero block");
            ChoiceSequence capped;
            capped.input_dim = tail.gamma.cols();
            capped.output_dim = tail.gamma.rows();
            capped.params = {CMatrix::Identity(tail.gamma.rows(), tail.gamma.cols())};
            capped.tail = Tail::Terminated;
            tail = sequence_geometry(capped, 1, tol).front();
            fs.exact = true;
            fs.capped = true;
        }
    }

    // H  = D_{G0} + D_{G1*} + D_{G2} + ...   (pairs, 2*depth slots)
    // H~ = D_{G0*} + D_{G1} + D_{G2*} + ...
    std::vector<Index> h_even, h_odd, ht_even, ht_odd;
    for (Index k = 0; k < depth; ++k) {
        h_even.push_back(geo[2 * k].rank());
        h_odd.push_back(geo[2 * k + 1].rank_star());
        ht_even.push_back(geo[2 * k].rank_star());
        ht_odd.push_back(geo[2 * k + 1].rank());
    }

    DiagonalBuilder m0, m0t, v0, l0;
    m0.push(CMatrix::Identity(seq.input_dim, seq.input_dim));
    m0t.push(CMatrix::Identity(seq.output_dim, seq.output_dim));
    for (Index k = 0; k < depth; ++k) {
        CMatrix j = rotation_of(geo[2 * k + 1]);
        m0.push(j);
        m0t.push(j);
        v0.push(std::move(j));
    }
    for (Index k = 0; k < depth; ++k) l0.push(rotation_of(geo[2 * k]));
    if (fs.exact) {
        // bare unitary block (or nothing when the window closed earlier);
        // for depth 0 this is the whole J_{G0}
        if (!tail_void) l0.push(rotation_of(tail));
    } else {
        // honest compression: only the (1,1) corner of J_{G_{2depth}} fits
        l0.push(tail.gamma);
    }

    fs.m0 = m0.assemble();
    fs.m0_tilde = m0t.assemble();
    fs.v0 = v0.assemble();
    fs.l0 = l0.assemble();
    fs.h_dim = fs.v0.cols();
    fs.h_tilde_dim = fs.v0.rows();
    fs.h_pairs = pair_layout(0, h_even, h_odd);
    fs.h_pairs.erase(fs.h_pairs.begin());
    fs.h_tilde_pairs = pair_layout(0, ht_even, ht_odd);
    fs.h_tilde_pairs.erase(fs.h_tilde_pairs.begin());
    return fs;
}

BlockCmv build_cmv(const ChoiceSequence& seq, Index depth, CmvVariant variant, Closure closure,
                   const Tolerances& tol) {
    const FactorSet fs = build_factors(seq, depth, closure, tol);
    BlockCmv cmv;
    cmv.variant = variant;
    cmv.depth = depth;
    cmv.exact_unitary = fs.exact;
    cmv.capped = fs.capped;
    cmv.seq = seq;

    std::vector<Index> row_pair_sizes, col_pair_sizes;
    const Layout& pairs = variant == CmvVariant::U0 ? fs.h_pairs : fs.h_tilde_pairs;
    if (variant == CmvVariant::U0) {
        cmv.factor_left = fs.l0;
        cmv.factor_right = fs.m0;
        cmv.matrix = fs.l0 * fs.m0;
    } else {
        cmv.factor_left = fs.m0_tilde;
        cmv.factor_right = fs.l0;
        cmv.matrix = fs.m0_tilde * fs.l0;
    }
    cmv.row_layout.emplace_back(0, seq.output_dim);
    cmv.col_layout.emplace_back(0, seq.input_dim);
    for (const auto& [off, size] : pairs) {
        cmv.row_layout.emplace_back(off + seq.output_dim, size);
        cmv.col_layout.emplace_back(off + seq.input_dim, size);
    }
    return cmv;
}

TruncatedCmv truncate(const BlockCmv& cmv, const Tolerances& tol) {
    return build_truncated(cmv.seq, cmv.depth,
                           cmv.variant == CmvVariant::U0 ? TruncVariant::T0 : TruncVariant::T0Tilde,
                           cmv.capped ? Closure::Cap
                                      : (cmv.exact_unitary ? Closure::Auto : Closure::Clip),
                           tol);
}

TruncatedCmv build_truncated(const ChoiceSequence& seq, Index depth, TruncVariant variant,
                             Closure closure, const Tolerances& tol) {
    const FactorSet fs = build_factors(seq, depth, closure, tol);
    TruncatedCmv t;
    t.variant = variant;
    t.depth = depth;
    t.exact = fs.exact;
    t.seq = seq;

    // S = L0 with the first block row (N) and column (M) removed.
    const CMatrix s = fs.l0.bottomRightCorner(fs.h_dim, fs.h_tilde_dim);
    if (variant == TruncVariant::T0) {
        t.factor_left = s;
        t.factor_right = fs.v0;
        t.matrix = s * fs.v0;
        t.row_layout = fs.h_pairs;
        t.col_layout = fs.h_pairs;
    } else {
        t.factor_left = fs.v0;
        t.factor_right = s;
        t.matrix = fs.v0 * s;
        t.row_layout = fs.h_tilde_pairs;
        t.col_layout = fs.h_tilde_pairs;
    }
    return t;
}

IntertwinerReport intertwiner_check(const ChoiceSequence& seq, Index depth,
                                    const Tolerances& tol) {
    const FactorSet fs = build_factors(seq, depth, Closure::Auto, tol);
    const CMatrix s = fs.l0.bottomRightCorner(fs.h_dim, fs.h_tilde_dim);
    const CMatrix t0 = s * fs.v0;
    const CMatrix t0t = fs.v0 * s;
    const CMatrix u0 = fs.l0 * fs.m0;
    const CMatrix u0t = fs.m0_tilde * fs.l0;
    IntertwinerReport report;
    report.v0_truncated = operator_norm(fs.v0 * t0 - t0t * fs.v0);
    report.m0_full = operator_norm(fs.m0_tilde * u0 - u0t * fs.m0);
    return report;
}

Index recommended_depth(const ChoiceSequence& seq, const Tolerances& tol) {
    const auto info = termination_info(seq, tol);
    if (info.terminated && info.cls == ContractionClass::Unitary)
        return (info.index + 1) / 2;
    return seq.size() == 0 ? 1 : (seq.size() + 1) / 2 + 1;
}

} // namespace cmvkit
