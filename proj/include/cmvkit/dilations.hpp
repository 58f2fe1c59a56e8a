#pragma once

#include <vector>

#include "cmvkit/cmv.hpp"
#include "cmvkit/schur.hpp"

namespace cmvkit {

// Finitely supported nonnegative matrix measure on the unit circle with
// mu(T) = I (a probability measure).
struct MatrixMeasure {
    struct Atom {
        Complex zeta;   // |zeta| = 1
        CMatrix weight; // dim x dim, positive semidefinite
    };
    Index dim = 0;
    std::vector<Atom> atoms;
};

void require_normalized(const MatrixMeasure& mu, const Tolerances& tol = {});

// Fourier coefficient S_n = sum_j zeta_j^{-n} w_j; S_0 = I, S_{-n} = S_n*.
CMatrix moments(const MatrixMeasure& mu, Index n);

// F(lambda) = sum_j w_j (zeta_j + lambda)/(zeta_j - lambda), evaluated
// exactly from the atoms.
CaratheodoryFunction caratheodory_of_measure(const MatrixMeasure& mu);

struct DilationReport {
    Index max_power = 0;
    std::vector<double> residuals; // power identities, index 0 <-> n = 1 (or n = 0)
    double worst_residual = 0.0;
    Index minimality_rank = 0;
    Index space_dim = 0;
    bool minimal = false;
    double threshold = 0.0;
    bool pass = false;
};

// Minimal unitary dilation of a contraction T as the block CMV matrix of the
// choice sequence (T, 0, 0, ...); H is the leading block.
BlockCmv unitary_dilation(const CMatrix& t, Index depth, const Tolerances& tol = {});

// ||T^n - P_H U^n |_H|| for n = 1..n_max plus the minimality rank check over
// span{U^n H : |n| <= depth}.
DilationReport dilation_check(const CMatrix& t, const BlockCmv& cmv, Index n_max,
                              const Tolerances& tol = {});

struct VerblunskyResult {
    ChoiceSequence seq;
    bool terminated = false;
    Index termination_index = 0; // meaningful when terminated
};

// Verblunsky coefficients = Schur parameters of E = (1/lambda)(F-I)(F+I)^{-1}
// built from the measure's moments.
VerblunskyResult verblunsky_from_measure(const MatrixMeasure& mu, Index max_params,
                                         const Tolerances& tol = {});

// Minimal Naimark dilation: S_n = P_M U^n |_M; report checks |n| <= n_max.
struct NaimarkResult {
    BlockCmv cmv;
    DilationReport report;
    VerblunskyResult verblunsky;
};

NaimarkResult naimark_dilation(const MatrixMeasure& mu, Index depth, Index n_max,
                               const Tolerances& tol = {});

// CMV model of a unitary with a cyclic subspace (Schur parameters of the
// function (1/lambda)(F_M*(conj lambda) - I)(F_M*(conj lambda) + I)^{-1}).
struct CyclicModel {
    ChoiceSequence seq;
    BlockCmv cmv;
    double transfer_residual = 0.0; // sampled F-recovery residual
};

CyclicModel cyclic_model(const CMatrix& u, const Subspace& m_basis, Index depth,
                         const Tolerances& tol = {});

} // namespace cmvkit
