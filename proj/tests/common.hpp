#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

#include "cmvkit/choice_sequence.hpp"
#include "cmvkit/linalg.hpp"

namespace tests {

using cmvkit::ChoiceSequence;
using cmvkit::CMatrix;
using cmvkit::Complex;
using cmvkit::Index;
using cmvkit::Tail;

inline CMatrix scalar(Complex z) { return CMatrix::Constant(1, 1, z); }

inline CMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
    CMatrix m(2, 2);
    m << a, b, c, d;
    return m;
}

inline ChoiceSequence scalar_sequence(std::initializer_list<Complex> gammas,
                                      Tail tail = Tail::ZeroTail) {
    ChoiceSequence seq;
    seq.input_dim = 1;
    seq.output_dim = 1;
    seq.tail = tail;
    for (Complex g : gammas) seq.params.push_back(scalar(g));
    return seq;
}

inline double diff(const CMatrix& a, const CMatrix& b) { return cmvkit::operator_norm(a - b); }

// nilpotent Jordan shift: e_i -> e_{i+1}
inline CMatrix jordan_shift(Index n) {
    CMatrix s = CMatrix::Zero(n, n);
    for (Index i = 0; i + 1 < n; ++i) s(i + 1, i) = 1.0;
    return s;
}

} // namespace tests
