#pragma once

#include <cstdint>
#include <vector>

#include "cmvkit/linalg.hpp"

namespace cmvkit {

class SchurFunction;

// Discrete time-invariant system: sigma_k = C h_k + D xi_k,
// h_{k+1} = A h_k + B xi_k, with block operator U = [[D, C], [B, A]].
struct DiscreteSystem {
    CMatrix d; // output_dim x input_dim
    CMatrix c; // output_dim x state_dim
    CMatrix b; // state_dim x input_dim
    CMatrix a; // state_dim x state_dim

    Index input_dim() const { return d.cols(); }
    Index output_dim() const { return d.rows(); }
    Index state_dim() const { return a.rows(); }

    CMatrix colligation() const; // U = [[D, C], [B, A]]
    void check_shapes() const;
};

enum class SystemClass : std::uint8_t { None, Passive, Isometric, CoIsometric, Conservative };

const char* to_string(SystemClass c);

SystemClass classify_system(const DiscreteSystem& sys, double tol = Tolerances{}.residual);

struct SimulationResult {
    std::vector<CVector> outputs; // sigma_0 .. sigma_{T-1}
    std::vector<CVector> states;  // h_0 .. h_T
};

SimulationResult simulate(const DiscreteSystem& sys, const std::vector<CVector>& inputs,
                          const CVector& initial_state);

struct StructuralReport {
    bool controllable = false;
    bool observable = false;
    bool simple = false;
    bool minimal = false;
    Index controllable_rank = 0;
    Index observable_rank = 0;
    Index joint_rank = 0;
};

StructuralReport structural_tests(const DiscreteSystem& sys, double rank_tol = Tolerances{}.rank);

struct CnuReport {
    bool completely_nonunitary = false;
    Subspace unitary_part; // reducing subspace on which A acts unitarily
};

CnuReport is_completely_nonunitary(const CMatrix& a, double tol = Tolerances{}.rank);

// Sz.-Nagy--Foias characteristic function of a contraction, as the transfer
// function of the conservative system {[[-T, D_{T*}], [D_T, T*]]} expressed
// in the canonical defect coordinates.
SchurFunction characteristic_function(const CMatrix& t, const Tolerances& tol = {});

SchurFunction transfer_function(const DiscreteSystem& sys);

// H_{n,m} = ker D_{A^n} ∩ ker D_{A*^m} and A_{n,m} = P_{n,m} A |> H_{n,m}
// in the returned basis coordinates.
struct LatticeNode {
    Subspace subspace;
    CMatrix compressed; // A_{n,m} in subspace coordinates
};

LatticeNode defect_kernel_lattice(const CMatrix& a, Index n, Index m,
                                  const Tolerances& tol = {});

enum class OmegaDirection : std::uint8_t {
    ZeroOne, // state space ker D_{A*}
    OneZero, // state space ker D_A
};

// First-iterate realization transform of a simple conservative system; the
// result is simple conservative with transfer function equal to the first
// Schur iterate of the input's transfer function.
DiscreteSystem omega_transform(const DiscreteSystem& sys, OmegaDirection direction,
                               const Tolerances& tol = {});

} // namespace cmvkit
