#include "cmvkit/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace cmvkit {

const char* to_string(ContractionClass c) {
    switch (c) {
        case ContractionClass::NotContraction: return "not_contraction";
        case ContractionClass::Generic: return "generic";
        case ContractionClass::Isometric: return "isometric";
        case ContractionClass::CoIsometric: return "co_isometric";
        case ContractionClass::Unitary: return "unitary";
        case ContractionClass::Pure: return "pure";
    }
    return "?";
}

double operator_norm(const CMatrix& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues()(0);
}

double unitarity_residual(const CMatrix& u) {
    if (u.rows() != u.cols()) throw NonSquare{};
    const Index n = u.rows();
    if (n == 0) return 0.0;
    const CMatrix id = CMatrix::Identity(n, n);
    return std::max(operator_norm(u.adjoint() * u - id), operator_norm(u * u.adjoint() - id));
}

namespace {

// (I - G)^{1/2} for Hermitian G = T*T (or TT*). Eigenvalues of I - G below
// zero come from rounding once ||T|| <= 1 has been checked; clamp them.
CMatrix sqrt_of_complement(const CMatrix& gram) {
    const Index n = gram.rows();
    if (n == 0) return CMatrix(0, 0);
    CMatrix h = CMatrix::Identity(n, n) - gram;
    h = Complex(0.5, 0.0) * (h + h.adjoint().eval()); // symmetrize
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    RVector vals = es.eigenvalues();
    for (Index i = 0; i < n; ++i) vals(i) = vals(i) > 0.0 ? std::sqrt(vals(i)) : 0.0;
    return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
}

void check_contractive(const CMatrix& t, double tol) {
    const double norm = operator_norm(t);
    if (norm > 1.0 + tol) throw NotAContraction(norm);
}

// Fix the free phase of an eigen/singular vector: the entry of largest
// modulus is made real positive.
void normalize_phase(Eigen::Ref<CVector> v) {
    Index imax = 0;
    double best = -1.0;
    for (Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v(i));
        if (a > best + 1e-14) {
            best = a;
            imax = i;
        }
    }
    if (best <= 0.0) return;
    v *= std::conj(v(imax)) / best;
}

Subspace defect_subspace_of(const CMatrix& d, double tol) {
    const Index n = d.rows();
    Subspace s;
    s.ambient_dim = n;
    if (n == 0) {
        s.basis = CMatrix(0, 0);
        return s;
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(d);
    const RVector vals = es.eigenvalues(); // ascending
    // Gram-scale cutoff, anchored at 1 (defects of contractions are bounded
    // by 1); keeps exact (co-)isometries at rank zero.
    const double cutoff = defect_sigma_cutoff(tol) * std::max(vals.cwiseAbs().maxCoeff(), 1.0);
    Index rank = 0;
    for (Index i = 0; i < n; ++i)
        if (vals(i) > cutoff) ++rank;
    if (rank == n) {
        s.basis = CMatrix::Identity(n, n);
        return s;
    }
    s.basis = CMatrix(n, rank);
    // descending eigenvalue order
    for (Index k = 0; k < rank; ++k) {
        CVector v = es.eigenvectors().col(n - 1 - k);
        normalize_phase(v);
        s.basis.col(k) = v;
    }
    return s;
}

} // namespace

Subspace range_of_hermitian_psd(const CMatrix& d, double tol) {
    return defect_subspace_of(d, tol);
}

Subspace defect_kernel(const CMatrix& d_like, double tol) {
    return kernel_subspace(d_like, defect_sigma_cutoff(tol));
}

CMatrix defect_pinv(const CMatrix& d, double tol) {
    if (d.rows() == 0 || d.cols() == 0) return CMatrix(d.cols(), d.rows());
    Eigen::JacobiSVD<CMatrix> svd(d, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVector sv = svd.singularValues();
    const double cutoff = defect_sigma_cutoff(tol) * std::max(sv(0), 1.0);
    RVector inv = RVector::Zero(sv.size());
    for (Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

CMatrix defect(const CMatrix& t, double contraction_tol) {
    check_contractive(t, contraction_tol);
    return sqrt_of_complement(t.adjoint() * t);
}

CMatrix defect_adjoint(const CMatrix& t, double contraction_tol) {
    check_contractive(t, contraction_tol);
    return sqrt_of_complement(t * t.adjoint());
}

Subspace defect_subspace(const CMatrix& t, double tol) {
    return defect_subspace_of(defect(t), tol);
}

Subspace defect_subspace_adjoint(const CMatrix& t, double tol) {
    return defect_subspace_of(defect_adjoint(t), tol);
}

Subspace range_subspace(const CMatrix& m, double tol) {
    Subspace s;
    s.ambient_dim = m.rows();
    if (m.rows() == 0 || m.cols() == 0) {
        s.basis = CMatrix(m.rows(), 0);
        return s;
    }
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU);
    const RVector sv = svd.singularValues();
    const double cutoff = tol * std::max(sv(0), 1e-300);
    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++rank;
    s.basis = CMatrix(m.rows(), rank);
    for (Index k = 0; k < rank; ++k) {
        CVector v = svd.matrixU().col(k);
        normalize_phase(v);
        s.basis.col(k) = v;
    }
    return s;
}

Subspace kernel_subspace(const CMatrix& m, double tol) {
    Subspace s;
    s.ambient_dim = m.cols();
    if (m.cols() == 0) {
        s.basis = CMatrix(0, 0);
        return s;
    }
    if (m.rows() == 0) {
        s.basis = CMatrix::Identity(m.cols(), m.cols());
        return s;
    }
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullV);
    const RVector sv = svd.singularValues();
    // Anchored at scale 1: callers pass defect-power stacks of contractions,
    // where a vanishing matrix means "everything is kernel".
    const double cutoff = tol * std::max(sv.size() > 0 ? sv(0) : 0.0, 1.0);
    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++rank;
    const Index null_dim = m.cols() - rank;
    s.basis = CMatrix(m.cols(), null_dim);
    for (Index k = 0; k < null_dim; ++k) {
        CVector v = svd.matrixV().col(m.cols() - 1 - k);
        normalize_phase(v);
        s.basis.col(k) = v;
    }
    return s;
}

CMatrix pinv(const CMatrix& m, double tol) {
    if (m.rows() == 0 || m.cols() == 0) return CMatrix(m.cols(), m.rows());
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVector sv = svd.singularValues();
    const double cutoff = tol * std::max(sv(0), 1e-300);
    RVector inv = RVector::Zero(sv.size());
    for (Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

Index rank_of(const CMatrix& m, double tol) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    Eigen::JacobiSVD<CMatrix> svd(m);
    const RVector sv = svd.singularValues();
    const double cutoff = tol * std::max(sv(0), 1e-300);
    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++rank;
    return rank;
}

ContractionClass classify_contraction(const CMatrix& t, double tol) {
    const Index rows = t.rows(), cols = t.cols();
    if (rows == 0 && cols == 0) return ContractionClass::Unitary;
    if (cols == 0) return ContractionClass::Isometric;  // vacuous isometry out of {0}
    if (rows == 0) return ContractionClass::CoIsometric;
    Eigen::JacobiSVD<CMatrix> svd(t);
    const RVector sv = svd.singularValues();
    if (sv(0) > 1.0 + tol) return ContractionClass::NotContraction;
    const bool iso = cols <= rows && operator_norm(t.adjoint() * t - CMatrix::Identity(cols, cols)) <= tol;
    const bool coiso = rows <= cols && operator_norm(t * t.adjoint() - CMatrix::Identity(rows, rows)) <= tol;
    if (iso && coiso) return ContractionClass::Unitary;
    if (iso) return ContractionClass::Isometric;
    if (coiso) return ContractionClass::CoIsometric;
    if (sv(0) < 1.0 - tol) return ContractionClass::Pure;
    return ContractionClass::Generic;
}

bool is_contraction(const CMatrix& t, double tol) {
    return classify_contraction(t, tol) != ContractionClass::NotContraction;
}

std::uint64_t Rng::next_u64() {
    // splitmix64
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double Rng::uniform() { return std::ldexp(static_cast<double>(next_u64() >> 11), -53); }

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    have_spare_ = true;
    spare_ = r * std::sin(2.0 * M_PI * u2);
    return r * std::cos(2.0 * M_PI * u2);
}

Complex Rng::complex_normal() {
    const double re = normal(), im = normal();
    return Complex(re, im) / std::sqrt(2.0);
}

CMatrix ginibre(Index rows, Index cols, Rng& rng) {
    CMatrix g(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) g(i, j) = rng.complex_normal();
    return g;
}

CMatrix haar_unitary(Index n, Rng& rng) {
    if (n == 0) return CMatrix(0, 0);
    const CMatrix g = ginibre(n, n, rng);
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ();
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < n; ++j) {
        const Complex d = r(j, j);
        const double a = std::abs(d);
        q.col(j) *= a > 0.0 ? d / a : Complex(1.0, 0.0);
    }
    return q;
}

CMatrix random_contraction(Index rows, Index cols, Rng& rng, double max_norm) {
    if (rows == 0 || cols == 0) return CMatrix(rows, cols);
    CMatrix g = ginibre(rows, cols, rng);
    const double target = max_norm * (0.35 + 0.65 * rng.uniform());
    return g * (target / operator_norm(g));
}

CMatrix random_isometry(Index rows, Index cols, Rng& rng) {
    if (cols > rows) throw BadDims("isometry needs cols <= rows");
    return haar_unitary(rows, rng).leftCols(cols);
}

} // namespace cmvkit
