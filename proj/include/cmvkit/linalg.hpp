#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "cmvkit/types.hpp"

namespace cmvkit {

// A subspace of C^ambient_dim given by an orthonormal column basis.
struct Subspace {
    Index ambient_dim = 0;
    CMatrix basis; // ambient_dim x k, basis.adjoint()*basis == I_k

    Index dim() const { return basis.cols(); }
    CMatrix projector() const { return basis * basis.adjoint(); }
};

enum class ContractionClass : std::uint8_t {
    NotContraction,
    Generic,
    Isometric,
    CoIsometric,
    Unitary,
    Pure,
};

const char* to_string(ContractionClass c);

double operator_norm(const CMatrix& m);

// max(||U*U - I||, ||UU* - I||) in operator norm; throws NonSquare.
double unitarity_residual(const CMatrix& u);

// D_T = (I - T*T)^{1/2} via Hermitian eigendecomposition; small negative
// eigenvalues of I - T*T are clamped to zero before the square root.
CMatrix defect(const CMatrix& t, double contraction_tol = Tolerances{}.contraction);

// D_{T*} = (I - TT*)^{1/2}.
CMatrix defect_adjoint(const CMatrix& t, double contraction_tol = Tolerances{}.contraction);

// Orthonormal basis of ran D_T. Uses the identity basis when the defect has
// full rank, otherwise eigenvectors of D_T for the nonzero eigenvalues with a
// deterministic phase convention. Keeps scalar and generic block builds
// entrywise reproducible.
Subspace defect_subspace(const CMatrix& t, double tol = Tolerances{}.rank);
Subspace defect_subspace_adjoint(const CMatrix& t, double tol = Tolerances{}.rank);

// Rank decisions for defect operators happen on the Gram scale: D_T is the
// square root of I - T*T, so rounding noise eps in T shows up as sqrt(eps)
// in the singular values of D_T. The sigma-scale cutoff is therefore
// sqrt(rank_tol), anchored at scale 1 (defects of contractions are bounded
// by 1).
inline double defect_sigma_cutoff(double rank_tol) { return std::sqrt(rank_tol); }

// Same basis convention applied to an already-computed Hermitian PSD matrix
// (a defect operator), with the Gram-scale rank cutoff.
Subspace range_of_hermitian_psd(const CMatrix& d, double tol = Tolerances{}.rank);

// Kernel of a defect-type matrix (or a stack/product of them), with the
// Gram-scale cutoff.
Subspace defect_kernel(const CMatrix& d_like, double tol = Tolerances{}.rank);

// Moore-Penrose inverse of a defect operator: directions below the
// Gram-scale cutoff are treated as zero instead of being inverted.
CMatrix defect_pinv(const CMatrix& d, double tol = Tolerances{}.rank);

// Orthonormal basis of ran M (left singular vectors above the rank cutoff).
Subspace range_subspace(const CMatrix& m, double tol = Tolerances{}.rank);

// Orthonormal basis of ker M (right singular vectors below the rank cutoff).
Subspace kernel_subspace(const CMatrix& m, double tol = Tolerances{}.rank);

// Moore-Penrose pseudoinverse; singular values <= tol * sigma_max are zeroed.
CMatrix pinv(const CMatrix& m, double tol = Tolerances{}.rank);

Index rank_of(const CMatrix& m, double tol = Tolerances{}.rank);

ContractionClass classify_contraction(const CMatrix& t, double tol = Tolerances{}.contraction);

bool is_contraction(const CMatrix& t, double tol = Tolerances{}.contraction);

// Deterministic RNG (splitmix64 + Box-Muller), identical across platforms.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();
    double uniform();              // [0, 1)
    double normal();               // standard normal
    Complex complex_normal();      // (N(0,1) + i N(0,1)) / sqrt(2)

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Ginibre matrix with i.i.d. complex normal entries.
CMatrix ginibre(Index rows, Index cols, Rng& rng);

// Haar-ish unitary from the QR factorization of a Ginibre matrix with the
// diagonal phase fix.
CMatrix haar_unitary(Index n, Rng& rng);

// Random contraction with operator norm <= max_norm.
CMatrix random_contraction(Index rows, Index cols, Rng& rng, double max_norm = 0.95);

// Random isometry (cols <= rows).
CMatrix random_isometry(Index rows, Index cols, Rng& rng);

} // namespace cmvkit
