#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cmvkit/choice_sequence.hpp"

namespace cmvkit {

enum class CmvVariant : std::uint8_t { U0, U0Tilde };
enum class TruncVariant : std::uint8_t { T0, T0Tilde };

// How the finite window is closed at the far end.
//
// A finite CMV matrix is exactly unitary when the sequence terminates with a
// unitary parameter inside the window. For a zero tail whose stabilized block
// is square, replacing the (zero) parameter at slot 2*depth with an identity
// closes the window exactly while leaving all parameters below that slot
// untouched; the transfer function moves by at most the uniqueness bound at
// order 2*depth. Everything else gets the honest compression, whose unitarity
// defect sits in the last block row/column.
enum class Closure : std::uint8_t {
    Auto, // cap when possible, otherwise clip
    Cap,  // require the exact closure; throws if impossible
    Clip, // always the plain compression
};

// Elementary rotation J_Gamma in the canonical defect coordinates. Takes the
// full 2x2 form for generic contractions and degenerates to the row form,
// the column form, or the bare block when Gamma is isometric, co-isometric
// or unitary (the defect blocks lose their columns/rows).
CMatrix elementary_rotation(const CMatrix& gamma, const Tolerances& tol = {});
CMatrix elementary_rotation(const CMatrix& gamma, ContractionClass tag, const Tolerances& tol = {});

using Layout = std::vector<std::pair<Index, Index>>; // (offset, size) per block

struct FactorSet {
    CMatrix l0;       // M + H~ -> N + H
    CMatrix m0;       // M + H  -> M + H~
    CMatrix m0_tilde; // N + H  -> N + H~
    CMatrix v0;       // H -> H~
    Index h_dim = 0;
    Index h_tilde_dim = 0;
    Layout h_pairs;       // (offset,size) of the D ⊕ D pair blocks of H
    Layout h_tilde_pairs; // same for H~
    Index depth = 0;
    bool exact = false;  // window closes exactly (terminated or capped)
    bool capped = false; // identity cap applied at slot 2*depth
};

FactorSet build_factors(const ChoiceSequence& seq, Index depth, Closure closure = Closure::Auto,
                        const Tolerances& tol = {});

struct BlockCmv {
    CMatrix matrix;
    CmvVariant variant = CmvVariant::U0;
    Layout row_layout; // leading N block, then the H (or H~) pair blocks
    Layout col_layout; // leading M block, then the same pair blocks
    CMatrix factor_left;  // U0 = L0*M0, U0~ = M0~*L0
    CMatrix factor_right;
    Index depth = 0;
    bool exact_unitary = false;
    bool capped = false;
    ChoiceSequence seq;
};

BlockCmv build_cmv(const ChoiceSequence& seq, Index depth, CmvVariant variant = CmvVariant::U0,
                   Closure closure = Closure::Auto, const Tolerances& tol = {});

struct TruncatedCmv {
    CMatrix matrix;
    TruncVariant variant = TruncVariant::T0;
    Layout row_layout;
    Layout col_layout;
    CMatrix factor_left;
    CMatrix factor_right;
    Index depth = 0;
    bool exact = false;
    ChoiceSequence seq;
};

// Deletes the first block row and column of the parent CMV matrix.
TruncatedCmv truncate(const BlockCmv& cmv, const Tolerances& tol = {});

TruncatedCmv build_truncated(const ChoiceSequence& seq, Index depth,
                             TruncVariant variant = TruncVariant::T0,
                             Closure closure = Closure::Auto, const Tolerances& tol = {});

struct IntertwinerReport {
    double v0_truncated = 0.0; // ||V0 T0 - T0~ V0||
    double m0_full = 0.0;      // ||M0~ U0 - U0~ M0||
    bool pass(double threshold = Tolerances{}.residual) const {
        return v0_truncated <= threshold && m0_full <= threshold;
    }
};

IntertwinerReport intertwiner_check(const ChoiceSequence& seq, Index depth,
                                    const Tolerances& tol = {});

// Smallest depth whose window contains the whole terminated sequence; for
// non-terminating sequences, a window covering all stored parameters.
Index recommended_depth(const ChoiceSequence& seq, const Tolerances& tol = {});

} // namespace cmvkit
