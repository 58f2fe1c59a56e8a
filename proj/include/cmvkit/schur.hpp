#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "cmvkit/choice_sequence.hpp"
#include "cmvkit/cmv.hpp"
#include "cmvkit/systems.hpp"

namespace cmvkit {

enum class SchurRep : std::uint8_t { Constant, Realization, Cmv, Taylor };

// Contractive holomorphic function on the unit disk in one of four concrete
// forms. Constant, realization and cmv forms evaluate exactly via a linear
// solve; the taylor form is a polynomial (partial sums of a series whose
// tail is bounded by |lambda|^{K+1}/(1-|lambda|) when it truncates a Schur
// function).
class SchurFunction {
  public:
    SchurFunction() = default; // the empty constant from {0} to {0}

    static SchurFunction constant(CMatrix gamma);
    static SchurFunction from_taylor(std::vector<CMatrix> coeffs);
    static SchurFunction from_realization(DiscreteSystem sys);
    static SchurFunction from_cmv(ChoiceSequence seq, Index depth, const Tolerances& tol = {});

    SchurRep representation() const { return rep_; }
    Index input_dim() const { return input_dim_; }
    Index output_dim() const { return output_dim_; }

    CMatrix value(Complex lambda) const;
    // Taylor coefficients c_0 .. c_{count-1}.
    std::vector<CMatrix> taylor(Index count) const;
    // Stored coefficient count (taylor form only; 0 otherwise).
    Index taylor_size() const { return static_cast<Index>(coeffs_.size()); }

    const DiscreteSystem* realization() const; // realization/cmv forms only
    const ChoiceSequence* cmv_sequence() const;

  private:
    SchurRep rep_ = SchurRep::Constant;
    Index input_dim_ = 0;
    Index output_dim_ = 0;
    CMatrix constant_;
    std::vector<CMatrix> coeffs_;
    std::shared_ptr<const DiscreteSystem> system_;
    std::shared_ptr<const ChoiceSequence> seq_;
    Index depth_ = 0;
};

// One step of the operator Schur algorithm on Taylor data: Gamma_0 = f(0)
// and the first iterate Theta_1 expressed in the canonical coordinates of
// D_{Gamma_0} -> D_{Gamma_0*}. The iterate keeps one fewer Taylor
// coefficient than the input budget.
struct SchurStep {
    CMatrix gamma0;
    SchurFunction iterate;
    ContractionClass gamma0_class = ContractionClass::Generic;
};

SchurStep schur_step(const SchurFunction& f, Index taylor_budget = 0, const Tolerances& tol = {});

// Iterated schur_step: the Schur parameters Gamma_0 .. Gamma_{max_params-1},
// stopping early when a parameter is isometric, co-isometric or unitary.
// This coefficient recursion is the independent oracle for all round trips.
ChoiceSequence schur_parameters(const SchurFunction& f, Index max_params,
                                const Tolerances& tol = {});

// Parameter extraction straight from a simple conservative realization via
// the pseudo-inverse chain formula (no Taylor recursion involved).
ChoiceSequence schur_parameters_from_realization(const DiscreteSystem& sys, Index max_params,
                                                 const Tolerances& tol = {});

// Left inverse of schur_step: Gamma + D_{Gamma*} Z (I + Gamma* Z)^{-1} D_Gamma
// with Z = lambda * next, where next maps D_Gamma -> D_{Gamma*} in canonical
// coordinates. Returns a taylor-form function with `budget` coefficients.
SchurFunction compose_mobius(const CMatrix& gamma, const SchurFunction& next, Index budget,
                             const Tolerances& tol = {});

// Evaluable function with the given parameters (finite CMV realization).
SchurFunction function_from_parameters(const ChoiceSequence& seq, Index taylor_budget,
                                       const Tolerances& tol = {});

struct PurePart {
    SchurFunction pure;      // S(D_{f(0)}, D_{f(0)*}) in canonical coordinates
    CMatrix unitary_const;   // ker D_{f(0)} -> ker D_{f(0)*}
    Subspace dom_pure;       // D_{f(0)} inside the input space
    Subspace codom_pure;     // D_{f(0)*} inside the output space
    Subspace dom_unitary;    // ker D_{f(0)}
    Subspace codom_unitary;  // ker D_{f(0)*}
    double offdiag_residual = 0.0; // sampled check of the block split
};

PurePart pure_part(const SchurFunction& f, Index taylor_budget = 16, const Tolerances& tol = {});

// Caratheodory class function with F(0) = I, backed by a finite measure's
// moments, by a Schur function through the Cayley-type transform, or by raw
// Taylor data.
class CaratheodoryFunction {
  public:
    // moment list S_1, S_2, ... (S_0 = I implied); F = I + 2 sum lambda^n S_n
    static CaratheodoryFunction from_moments(Index dim, std::vector<CMatrix> s);
    static CaratheodoryFunction from_schur(SchurFunction e);
    static CaratheodoryFunction from_taylor(std::vector<CMatrix> coeffs);

    Index dim() const { return dim_; }
    CMatrix value(Complex lambda) const;
    std::vector<CMatrix> taylor(Index count) const; // F-coefficients

  private:
    CaratheodoryFunction() = default;

    enum class Rep : std::uint8_t { Moments, Schur, Taylor } rep_ = Rep::Taylor;
    Index dim_ = 0;
    std::vector<CMatrix> moments_;
    std::shared_ptr<const SchurFunction> schur_;
    std::vector<CMatrix> coeffs_;
};

// E(lambda) = (1/lambda) (F - I)(F + I)^{-1}, as Taylor data with `budget`
// coefficients; requires F(0) = I.
SchurFunction schur_from_cara(const CaratheodoryFunction& f, Index budget,
                              const Tolerances& tol = {});

// F(lambda) = (I + lambda E)(I - lambda E)^{-1}.
CaratheodoryFunction cara_from_schur(const SchurFunction& e);

} // namespace cmvkit
