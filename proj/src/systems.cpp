#include "cmvkit/systems.hpp"

#include <sstream>

#include "cmvkit/schur.hpp"

namespace cmvkit {

CMatrix DiscreteSystem::colligation() const {
    check_shapes();
    const Index rows = output_dim() + state_dim();
    const Index cols = input_dim() + state_dim();
    CMatrix u(rows, cols);
    u.topLeftCorner(d.rows(), d.cols()) = d;
    u.topRightCorner(c.rows(), c.cols()) = c;
    u.bottomLeftCorner(b.rows(), b.cols()) = b;
    u.bottomRightCorner(a.rows(), a.cols()) = a;
    return u;
}

void DiscreteSystem::check_shapes() const {
    if (c.rows() != d.rows() || b.cols() != d.cols() || a.rows() != a.cols() ||
        c.cols() != a.cols() || b.rows() != a.rows()) {
        std::ostringstream os;
        os << "colligation blocks D " << d.rows() << "x" << d.cols() << ", C " << c.rows() << "x"
           << c.cols() << ", B " << b.rows() << "x" << b.cols() << ", A " << a.rows() << "x"
           << a.cols();
        throw ShapeMismatch(os.str());
    }
}

const char* to_string(SystemClass c) {
    switch (c) {
        case SystemClass::None: return "none";
        case SystemClass::Passive: return "passive";
        case SystemClass::Isometric: return "isometric";
        case SystemClass::CoIsometric: return "co_isometric";
        case SystemClass::Conservative: return "conservative";
    }
    return "?";
}

SystemClass classify_system(const DiscreteSystem& sys, double tol) {
    const CMatrix u = sys.colligation();
    const Index rows = u.rows(), cols = u.cols();
    const bool iso = operator_norm(u.adjoint() * u - CMatrix::Identity(cols, cols)) <= tol;
    const bool coiso = operator_norm(u * u.adjoint() - CMatrix::Identity(rows, rows)) <= tol;
    if (iso && coiso) return SystemClass::Conservative;
    if (iso) return SystemClass::Isometric;
    if (coiso) return SystemClass::CoIsometric;
    if (operator_norm(u) <= 1.0 + tol) return SystemClass::Passive;
    return SystemClass::None;
}

SimulationResult simulate(const DiscreteSystem& sys, const std::vector<CVector>& inputs,
                          const CVector& initial_state) {
    sys.check_shapes();
    if (initial_state.size() != sys.state_dim())
        throw ShapeMismatch("initial state has wrong dimension");
    SimulationResult result;
    CVector h = initial_state;
    result.states.push_back(h);
    for (const auto& xi : inputs) {
        if (xi.size() != sys.input_dim()) throw ShapeMismatch("input vector has wrong dimension");
        result.outputs.push_back(sys.c * h + sys.d * xi);
        h = sys.a * h + sys.b * xi;
        result.states.push_back(h);
    }
    return result;
}

StructuralReport structural_tests(const DiscreteSystem& sys, double rank_tol) {
    sys.check_shapes();
    const Index h = sys.state_dim();
    StructuralReport report;
    if (h == 0) {
        report.controllable = report.observable = report.simple = report.minimal = true;
        return report;
    }
    CMatrix ctrl(h, h * sys.input_dim());
    CMatrix obs(h, h * sys.output_dim()); // columns A*^k C*
    CMatrix power = CMatrix::Identity(h, h);
    for (Index k = 0; k < h; ++k) {
        ctrl.middleCols(k * sys.input_dim(), sys.input_dim()) = power * sys.b;
        obs.middleCols(k * sys.output_dim(), sys.output_dim()) =
            power.adjoint() * sys.c.adjoint();
        power = sys.a * power;
    }
    report.controllable_rank = rank_of(ctrl, rank_tol);
    report.observable_rank = rank_of(obs, rank_tol);
    CMatrix joint(h, ctrl.cols() + obs.cols());
    joint << ctrl, obs;
    report.joint_rank = rank_of(joint, rank_tol);
    report.controllable = report.controllable_rank == h;
    report.observable = report.observable_rank == h;
    report.simple = report.joint_rank == h;
    report.minimal = report.controllable && report.observable;
    return report;
}

CnuReport is_completely_nonunitary(const CMatrix& a, double tol) {
    if (a.rows() != a.cols()) throw NonSquare{};
    const Index h = a.rows();
    CnuReport report;
    if (h == 0) {
        report.completely_nonunitary = true;
        report.unitary_part.ambient_dim = 0;
        report.unitary_part.basis = CMatrix(0, 0);
        return report;
    }
    const CMatrix da = defect(a);
    const CMatrix dastar = defect_adjoint(a);
    CMatrix span(h, 2 * h * h);
    CMatrix left = da, right = dastar;
    for (Index k = 0; k < h; ++k) {
        span.middleCols(k * h, h) = left;
        span.middleCols(h * h + k * h, h) = right;
        left = a.adjoint() * left;
        right = a * right;
    }
    report.unitary_part = defect_kernel(span.adjoint(), tol);
    report.completely_nonunitary = report.unitary_part.dim() == 0;
    return report;
}

SchurFunction characteristic_function(const CMatrix& t, const Tolerances& tol) {
    if (t.rows() != t.cols()) throw NonSquare{};
    if (!is_contraction(t, tol.contraction)) throw NotAContraction(operator_norm(t));
    const CMatrix dt = defect(t, tol.contraction);
    const CMatrix dtstar = defect_adjoint(t, tol.contraction);
    const Subspace dom = range_of_hermitian_psd(dt, tol.rank);
    const Subspace codom = range_of_hermitian_psd(dtstar, tol.rank);
    DiscreteSystem sys;
    sys.d = codom.basis.adjoint() * (-t) * dom.basis;
    sys.c = codom.basis.adjoint() * dtstar;
    sys.b = dt * dom.basis;
    sys.a = t.adjoint();
    return SchurFunction::from_realization(std::move(sys));
}

SchurFunction transfer_function(const DiscreteSystem& sys) {
    return SchurFunction::from_realization(sys);
}

LatticeNode defect_kernel_lattice(const CMatrix& a, Index n, Index m, const Tolerances& tol) {
    if (a.rows() != a.cols()) throw NonSquare{};
    if (!is_contraction(a, tol.contraction)) throw NotAContraction(operator_norm(a));
    if (n < 0 || m < 0) throw BadDims("negative lattice index");
    const Index h = a.rows();
    CMatrix an = CMatrix::Identity(h, h);
    for (Index k = 0; k < n; ++k) an = a * an;
    CMatrix am = CMatrix::Identity(h, h);
    for (Index k = 0; k < m; ++k) am = a * am;
    CMatrix stack(2 * h, h);
    stack.topRows(h) = defect(an, 1.0);          // powers of a contraction stay contractive
    stack.bottomRows(h) = defect_adjoint(am, 1.0);
    LatticeNode node;
    node.subspace = defect_kernel(stack, tol.rank);
    node.compressed = node.subspace.basis.adjoint() * a * node.subspace.basis;
    return node;
}

DiscreteSystem omega_transform(const DiscreteSystem& sys, OmegaDirection direction,
                               const Tolerances& tol) {
    sys.check_shapes();
    {
        const double residual = unitarity_residual(sys.colligation());
        if (residual > 10 * tol.residual) throw NotConservative(residual);
    }
    if (!structural_tests(sys, tol.rank).simple) throw NotSimple{};

    const CMatrix gamma0 = sys.d;
    const CMatrix d0 = defect(gamma0, tol.contraction);
    const CMatrix d0star = defect_adjoint(gamma0, tol.contraction);
    const Subspace dom = range_of_hermitian_psd(d0, tol.rank);
    const Subspace codom = range_of_hermitian_psd(d0star, tol.rank);
    const CMatrix d0p = defect_pinv(d0, tol.rank);
    const CMatrix d0starp = defect_pinv(d0star, tol.rank);

    const CMatrix da = defect(sys.a, tol.contraction);
    const CMatrix dastar = defect_adjoint(sys.a, tol.contraction);
    const Subspace ker_da = defect_kernel(da, tol.rank);
    const Subspace ker_dastar = defect_kernel(dastar, tol.rank);
    const CMatrix dastarp = defect_pinv(dastar, tol.rank);

    DiscreteSystem out;
    out.d = codom.basis.adjoint() * d0starp * sys.c * sys.b * d0p * dom.basis;
    if (direction == OmegaDirection::ZeroOne) {
        const CMatrix k = ker_dastar.basis;
        out.c = codom.basis.adjoint() * d0starp * sys.c * k;
        out.b = k.adjoint() * sys.a * ker_da.projector() * dastarp * sys.b * dom.basis;
        out.a = k.adjoint() * sys.a * k;
    } else {
        const CMatrix k = ker_da.basis;
        out.c = codom.basis.adjoint() * d0starp * sys.c * sys.a * k;
        out.b = k.adjoint() * dastarp * sys.b * dom.basis;
        out.a = k.adjoint() * sys.a * k;
    }
    return out;
}

} // namespace cmvkit
