#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cmvkit/linalg.hpp"
#include "cmvkit/types.hpp"

namespace cmvkit {

enum class Tail : std::uint8_t {
    ZeroTail,   // unlisted parameters are zero blocks of the stabilized shape
    Terminated, // the last listed parameter is isometric, co-isometric or unitary
};

// Choice sequence {Gamma_n}: Gamma_0 maps M -> N in ambient coordinates;
// Gamma_k (k >= 1) maps D_{Gamma_{k-1}} -> D_{Gamma*_{k-1}} and is stored in
// the canonical orthonormal coordinates of those defect subspaces (see
// defect_subspace). Its shape is therefore rank D_{Gamma*_{k-1}} x
// rank D_{Gamma_{k-1}}.
struct ChoiceSequence {
    Index input_dim = 0;  // dim M
    Index output_dim = 0; // dim N
    std::vector<CMatrix> params;
    Tail tail = Tail::ZeroTail;

    Index size() const { return static_cast<Index>(params.size()); }
};

// Geometry of one parameter: its defects and the canonical bases of the
// defect subspaces inside the parameter's own coordinate spaces.
struct ParamGeometry {
    CMatrix gamma;   // r*_{k-1} x r_{k-1}
    CMatrix d;       // D_{Gamma_k}
    CMatrix dstar;   // D_{Gamma*_k}
    Subspace dom;    // basis of ran D_{Gamma_k}
    Subspace codom;  // basis of ran D_{Gamma*_k}
    ContractionClass cls = ContractionClass::Generic;

    Index rank() const { return dom.dim(); }       // dim D_{Gamma_k}
    Index rank_star() const { return codom.dim(); } // dim D_{Gamma*_k}
};

// Geometry for indices 0..count-1, padding past the stored parameters with
// zero blocks of the stabilized shape (after an isometric or co-isometric
// parameter the zero padding reproduces the replacement rules for the
// degenerate cases automatically, via zero-dimensional defect spaces).
std::vector<ParamGeometry> sequence_geometry(const ChoiceSequence& seq, Index count,
                                             const Tolerances& tol = {});

struct ValidationIssue {
    Index index = 0;
    std::string kind; // "shape" | "contraction" | "tail"
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    // singular values of I - Gamma*Gamma within a decade of the rank cutoff;
    // rank decisions near these flip under tolerance changes
    std::vector<std::pair<Index, double>> borderline;

    bool ok() const { return issues.empty(); }
    std::string to_string() const;
};

ValidationReport validate(const ChoiceSequence& seq, const Tolerances& tol = {});

void require_valid(const ChoiceSequence& seq, const Tolerances& tol = {});

// {Gamma_n*} with input/output roles swapped; an exact involution.
ChoiceSequence adjoint_sequence(const ChoiceSequence& seq);

// Tail sequence {Gamma_n}_{n>=k} as a sequence in its own right, with input
// space D_{Gamma_{k-1}} and output space D_{Gamma*_{k-1}}.
ChoiceSequence shift_sequence(const ChoiceSequence& seq, Index k, const Tolerances& tol = {});

// True termination data: index and class of the first isometric /
// co-isometric / unitary parameter, if any.
struct TerminationInfo {
    bool terminated = false;
    Index index = 0;
    ContractionClass cls = ContractionClass::Generic;
};

TerminationInfo termination_info(const ChoiceSequence& seq, const Tolerances& tol = {});

enum class SequenceKind : std::uint8_t {
    Pure,
    TerminateIsometric,
    TerminateCoisometric,
    TerminateUnitary,
};

// Deterministic random sequence: `depth` strict contractions (operator norm
// <= 0.95) followed, for the terminate_* kinds, by one terminating block.
ChoiceSequence random_choice_sequence(Index m, Index n, Index depth, std::uint64_t seed,
                                      SequenceKind kind);

} // namespace cmvkit
