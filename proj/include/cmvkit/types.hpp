#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cmvkit {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Numerical knobs shared across the library. All residuals are measured in
// the operator norm (largest singular value).
struct Tolerances {
    double rank = 1e-9;        // relative rank cutoff for singular values
    double contraction = 1e-8; // slack allowed on ||T|| <= 1
    double residual = 1e-10;   // acceptance threshold for algebraic identities
};

inline Tolerances default_tolerances() { return {}; }

struct CmvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotAContraction : CmvError {
    explicit NotAContraction(double norm)
        : CmvError("operator norm " + std::to_string(norm) + " exceeds 1"), norm(norm) {}
    double norm;
};

struct NonSquare : CmvError {
    NonSquare() : CmvError("matrix is not square") {}
};

struct ShapeMismatch : CmvError {
    explicit ShapeMismatch(const std::string& what) : CmvError("shape mismatch: " + what) {}
};

struct InvalidSequence : CmvError {
    explicit InvalidSequence(const std::string& what) : CmvError("invalid choice sequence: " + what) {}
};

struct BadDims : CmvError {
    explicit BadDims(const std::string& what) : CmvError("bad dimensions: " + what) {}
};

struct TagMismatch : CmvError {
    explicit TagMismatch(const std::string& what) : CmvError("contraction tag mismatch: " + what) {}
};

struct OutsideDisk : CmvError {
    explicit OutsideDisk(Complex lambda)
        : CmvError("evaluation point |lambda| >= 1 (|" + std::to_string(std::abs(lambda)) + "|)") {}
};

struct SolveFailure : CmvError {
    explicit SolveFailure(const std::string& what) : CmvError("linear solve failed: " + what) {}
};

struct DepthExhausted : CmvError {
    explicit DepthExhausted(const std::string& what) : CmvError("Taylor depth exhausted: " + what) {}
};

struct NotConservative : CmvError {
    explicit NotConservative(double residual)
        : CmvError("system is not conservative (unitarity residual " + std::to_string(residual) + ")") {}
};

struct NotSimple : CmvError {
    NotSimple() : CmvError("system is not simple") {}
};

struct NotNormalized : CmvError {
    explicit NotNormalized(const std::string& what) : CmvError("measure not normalized: " + what) {}
};

struct NotUnitary : CmvError {
    explicit NotUnitary(double residual)
        : CmvError("matrix is not unitary (residual " + std::to_string(residual) + ")") {}
};

struct NotCyclic : CmvError {
    NotCyclic() : CmvError("subspace is not cyclic for the operator") {}
};

struct PowerBudgetExceeded : CmvError {
    explicit PowerBudgetExceeded(const std::string& what) : CmvError(what) {}
};

} // namespace cmvkit
