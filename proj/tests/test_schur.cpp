#include <doctest.h>

#include <cmath>

#include "common.hpp"
#include "cmvkit/schur.hpp"

using namespace cmvkit;
using tests::diff;
using tests::scalar;
using tests::scalar_sequence;

namespace {

Complex mobius_half(Complex lambda) { return (lambda + 0.5) / (1.0 + 0.5 * lambda); }

std::vector<Complex> circle_points(double radius, int count) {
    std::vector<Complex> pts;
    for (int k = 0; k < count; ++k)
        pts.push_back(radius * std::exp(Complex(0, 2.0 * M_PI * k / count)));
    return pts;
}

} // namespace

TEST_CASE("value of the four representations") {
    SUBCASE("realization D=0,C=1,B=1,A=0 is the shift lambda") {
        DiscreteSystem sys{scalar(0.0), scalar(1.0), scalar(1.0), scalar(0.0)};
        const SchurFunction f = SchurFunction::from_realization(sys);
        CHECK(std::abs(f.value(0.3)(0, 0) - 0.3) < 1e-15);
    }
    SUBCASE("constants evaluate to themselves") {
        const SchurFunction f = SchurFunction::constant(tests::mat2(0.1, 0.2, 0.0, 0.3));
        CHECK(diff(f.value(Complex(0.2, 0.4)), tests::mat2(0.1, 0.2, 0.0, 0.3)) == 0.0);
    }
    SUBCASE("cmv form of (0, 1/2, 0, ...) is lambda/2") {
        const SchurFunction f = SchurFunction::from_cmv(scalar_sequence({0.0, 0.5}), 4);
        CHECK(std::abs(f.value(0.2)(0, 0) - 0.1) < 1e-14);
        for (const Complex lambda : circle_points(0.7, 5))
            CHECK(std::abs(f.value(lambda)(0, 0) - 0.5 * lambda) < 1e-13);
    }
    SUBCASE("taylor partial sums") {
        const SchurFunction f = SchurFunction::from_taylor({scalar(0.0), scalar(0.5)});
        CHECK(std::abs(f.value(0.2)(0, 0) - 0.1) < 1e-15);
    }
    SUBCASE("points outside the disk are rejected") {
        const SchurFunction f = SchurFunction::constant(scalar(0.0));
        CHECK_THROWS_AS(f.value(Complex(1.0, 0.1)), OutsideDisk);
    }
}

TEST_CASE("schur_step splits off Gamma_0") {
    SUBCASE("lambda/2 gives (0, constant 1/2)") {
        const auto step = schur_step(SchurFunction::from_taylor({scalar(0.0), scalar(0.5)}));
        CHECK(std::abs(step.gamma0(0, 0)) == 0.0);
        for (const Complex lambda : circle_points(0.5, 4))
            CHECK(std::abs(step.iterate.value(lambda)(0, 0) - 0.5) < 1e-14);
    }
    SUBCASE("a pure constant gives (Gamma, 0)") {
        const auto step = schur_step(SchurFunction::from_taylor(
            {scalar(Complex(0.2, 0.1)), scalar(0.0), scalar(0.0)}));
        CHECK(std::abs(step.gamma0(0, 0) - Complex(0.2, 0.1)) == 0.0);
        CHECK(operator_norm(step.iterate.value(0.3)) < 1e-14);
    }
    SUBCASE("the Moebius function (lambda+1/2)/(1+lambda/2) gives (1/2, 1)") {
        // Taylor of the rational function, computed from the geometric series
        std::vector<CMatrix> coeffs{scalar(0.5)};
        for (int k = 1; k < 8; ++k)
            coeffs.push_back(scalar(0.75 * std::pow(-0.5, k - 1)));
        const auto step = schur_step(SchurFunction::from_taylor(coeffs));
        CHECK(std::abs(step.gamma0(0, 0) - 0.5) < 1e-15);
        // first iterate is the unitary constant 1
        const auto params = schur_parameters(SchurFunction::from_taylor(coeffs), 4);
        REQUIRE(params.size() == 2);
        CHECK(std::abs(params.params[1](0, 0) - 1.0) < 1e-12);
        CHECK(params.tail == Tail::Terminated);
    }
}

TEST_CASE("schur_parameters terminates on Blaschke-type data") {
    SUBCASE("lambda has parameters (0, 1)") {
        const auto params =
            schur_parameters(SchurFunction::from_taylor({scalar(0.0), scalar(1.0)}), 5);
        REQUIRE(params.size() == 2);
        CHECK(std::abs(params.params[0](0, 0)) == 0.0);
        CHECK(std::abs(params.params[1](0, 0) - 1.0) < 1e-14);
        CHECK(params.tail == Tail::Terminated);
    }
    SUBCASE("the zero function has zero parameters") {
        const auto params = schur_parameters(SchurFunction::constant(scalar(0.0)), 4);
        for (const auto& g : params.params) CHECK(operator_norm(g) == 0.0);
        CHECK(params.tail == Tail::ZeroTail);
    }
    SUBCASE("(0.5, 0.5, 0.5) round trips through compose_mobius") {
        SchurFunction f = SchurFunction::constant(scalar(0.5));
        f = compose_mobius(scalar(0.5), f, 16);
        f = compose_mobius(scalar(0.5), f, 16);
        const auto params = schur_parameters(f, 3);
        REQUIRE(params.size() == 3);
        for (const auto& g : params.params) CHECK(std::abs(g(0, 0) - 0.5) < 1e-10);
    }
}

TEST_CASE("taylor budget discipline") {
    CHECK_THROWS_AS(schur_step(SchurFunction::from_taylor({scalar(0.5)})), DepthExhausted);
    CHECK_THROWS_AS(
        schur_parameters(SchurFunction::from_taylor({scalar(0.0), scalar(0.5)}), 5),
        DepthExhausted);
}

TEST_CASE("parameters from a realization via the pseudo-inverse chain") {
    SUBCASE("the flip system realizes lambda: parameters (0, 1)") {
        DiscreteSystem sys{scalar(0.0), scalar(1.0), scalar(1.0), scalar(0.0)};
        const auto params = schur_parameters_from_realization(sys, 4);
        REQUIRE(params.size() == 2);
        CHECK(std::abs(params.params[0](0, 0)) == 0.0);
        CHECK(std::abs(params.params[1](0, 0) - 1.0) < 1e-12);
        CHECK(params.tail == Tail::Terminated);
    }
    SUBCASE("CMV system of (0.5, 0.5) recovers (0.5, 0.5, 0, ...)") {
        const auto seq = scalar_sequence({0.5, 0.5});
        const BlockCmv cmv = build_cmv(seq, 4);
        REQUIRE(cmv.exact_unitary);
        DiscreteSystem sys{cmv.matrix.topLeftCorner(1, 1),
                           cmv.matrix.topRightCorner(1, cmv.matrix.cols() - 1),
                           cmv.matrix.bottomLeftCorner(cmv.matrix.rows() - 1, 1),
                           cmv.matrix.bottomRightCorner(cmv.matrix.rows() - 1,
                                                        cmv.matrix.cols() - 1)};
        const auto params = schur_parameters_from_realization(sys, 4);
        REQUIRE(params.size() >= 2);
        CHECK(std::abs(params.params[0](0, 0) - 0.5) < 1e-10);
        CHECK(std::abs(params.params[1](0, 0) - 0.5) < 1e-10);
        for (Index k = 2; k < params.size(); ++k)
            CHECK(operator_norm(params.params[static_cast<std::size_t>(k)]) < 1e-8);
    }
    SUBCASE("unitary feedthrough with empty state terminates at once") {
        Rng rng(3);
        const CMatrix u = haar_unitary(2, rng);
        DiscreteSystem sys{u, CMatrix(2, 0), CMatrix(0, 2), CMatrix(0, 0)};
        const auto params = schur_parameters_from_realization(sys, 3);
        REQUIRE(params.size() == 1);
        CHECK(params.tail == Tail::Terminated);
        CHECK(diff(params.params[0], u) == 0.0);
    }
    SUBCASE("agrees with the coefficient-recursion oracle") {
        Rng rng(8);
        for (int trial = 0; trial < 6; ++trial) {
            const Index m = 1 + static_cast<Index>(rng.next_u64() % 2);
            const Index h = 2 + static_cast<Index>(rng.next_u64() % 4);
            const CMatrix u = haar_unitary(m + h, rng);
            DiscreteSystem sys{u.topLeftCorner(m, m), u.topRightCorner(m, h),
                               u.bottomLeftCorner(h, m), u.bottomRightCorner(h, h)};
            if (!structural_tests(sys).simple) continue;
            const auto via_formula = schur_parameters_from_realization(sys, 5);
            const auto via_series = schur_parameters(transfer_function(sys), 5);
            REQUIRE(via_formula.size() == via_series.size());
            for (Index k = 0; k < via_formula.size(); ++k)
                CHECK(diff(via_formula.params[static_cast<std::size_t>(k)],
                           via_series.params[static_cast<std::size_t>(k)]) < 1e-8);
        }
    }
    SUBCASE("non-conservative input is rejected") {
        DiscreteSystem sys{scalar(0.5), scalar(0.5), scalar(0.5), scalar(0.5)};
        CHECK_THROWS_AS(schur_parameters_from_realization(sys, 2), NotConservative);
    }
}

TEST_CASE("compose_mobius reproduces hand-computed functions") {
    SUBCASE("(0, 1/2) gives lambda/2") {
        const SchurFunction f =
            compose_mobius(scalar(0.0), SchurFunction::constant(scalar(0.5)), 8);
        for (const Complex lambda : circle_points(0.6, 5))
            CHECK(std::abs(f.value(lambda)(0, 0) - 0.5 * lambda) < 1e-14);
    }
    SUBCASE("(Gamma, 0) gives the constant") {
        const CMatrix g = tests::mat2(0.3, 0.1, 0.0, 0.2);
        const SchurFunction f =
            compose_mobius(g, SchurFunction::constant(CMatrix::Zero(2, 2)), 8);
        CHECK(diff(f.value(0.4), g) < 1e-14);
    }
    SUBCASE("(1/2, 1) gives the Moebius transform") {
        const SchurFunction f =
            compose_mobius(scalar(0.5), SchurFunction::constant(scalar(1.0)), 24);
        for (const Complex lambda : circle_points(0.4, 6))
            CHECK(std::abs(f.value(lambda)(0, 0) - mobius_half(lambda)) < 1e-10);
    }
    SUBCASE("shape mismatches are rejected") {
        CHECK_THROWS_AS(
            compose_mobius(scalar(0.5), SchurFunction::constant(CMatrix::Zero(2, 2)), 4),
            ShapeMismatch);
    }
}

TEST_CASE("pure part splits along the kernel of the defect") {
    SUBCASE("diag(0.5, phase) splits into 0.5 and the phase") {
        const Complex phase = std::exp(Complex(0, 0.8));
        CMatrix g = CMatrix::Zero(2, 2);
        g(0, 0) = 0.5;
        g(1, 1) = phase;
        const auto part = pure_part(SchurFunction::constant(g));
        REQUIRE(part.pure.input_dim() == 1);
        CHECK(std::abs(part.pure.value(0.0)(0, 0) - 0.5) < 1e-12);
        REQUIRE(part.unitary_const.rows() == 1);
        CHECK(std::abs(std::abs(part.unitary_const(0, 0)) - 1.0) < 1e-12);
        CHECK(part.offdiag_residual < 1e-12);
    }
    SUBCASE("pure functions are their own pure part") {
        const auto part = pure_part(SchurFunction::constant(scalar(0.4)));
        CHECK(part.pure.input_dim() == 1);
        CHECK(part.dom_unitary.dim() == 0);
    }
    SUBCASE("unitary constants have empty pure part") {
        const auto part = pure_part(SchurFunction::constant(scalar(std::exp(Complex(0, 1.3)))));
        CHECK(part.pure.input_dim() == 0);
        CHECK(part.pure.output_dim() == 0);
        CHECK(std::abs(part.unitary_const(0, 0) - std::exp(Complex(0, 1.3))) < 1e-14);
    }
}

TEST_CASE("Caratheodory-Schur transform pair") {
    SUBCASE("F = I gives the zero function") {
        const auto e = schur_from_cara(
            CaratheodoryFunction::from_taylor({CMatrix::Identity(2, 2)}), 8);
        CHECK(operator_norm(e.value(0.5)) < 1e-14);
    }
    SUBCASE("the point mass at 1 gives the constant 1") {
        // F = (1+lambda)/(1-lambda) = 1 + 2 sum lambda^n
        std::vector<CMatrix> coeffs{scalar(1.0)};
        for (int k = 1; k < 24; ++k) coeffs.push_back(scalar(2.0));
        const auto e = schur_from_cara(CaratheodoryFunction::from_taylor(coeffs), 20);
        for (const Complex lambda : circle_points(0.3, 4))
            CHECK(std::abs(e.value(lambda)(0, 0) - 1.0) < 1e-9);
    }
    SUBCASE("F built from a contraction T returns the constant T") {
        Rng rng(12);
        const CMatrix t = random_contraction(2, 2, rng, 0.8);
        const auto f = cara_from_schur(SchurFunction::constant(t));
        const auto back = schur_from_cara(f, 32);
        for (const Complex lambda : circle_points(0.4, 4))
            CHECK(diff(back.value(lambda), t) < 1e-10);
        // F(lambda) = (I + lambda T)(I - lambda T)^{-1} pointwise
        const Complex lambda(0.3, 0.2);
        const CMatrix id = CMatrix::Identity(2, 2);
        const CMatrix expected =
            (id + lambda * t) * (id - lambda * t).partialPivLu().inverse();
        CHECK(diff(f.value(lambda), expected) < 1e-12);
    }
    SUBCASE("normalization is enforced") {
        CHECK_THROWS_AS(
            schur_from_cara(CaratheodoryFunction::from_taylor({scalar(2.0)}), 4),
            NotNormalized);
    }
}

TEST_CASE("uniqueness bound for sequences sharing a prefix") {
    // ||Theta - Theta^|| <= 2|l| (|l|/(1-|l|)^2)^{n+1} when Gamma_0..Gamma_n agree
    Rng rng(21);
    for (Index n = 1; n <= 3; ++n) {
        std::vector<Complex> shared;
        for (Index k = 0; k <= n; ++k)
            shared.push_back(0.6 * Complex(rng.uniform() - 0.5, rng.uniform() - 0.5));
        auto a = scalar_sequence({}), b = scalar_sequence({});
        for (const Complex g : shared) {
            a.params.push_back(scalar(g));
            b.params.push_back(scalar(g));
        }
        a.params.push_back(scalar(std::exp(Complex(0, 0.4))));
        b.params.push_back(scalar(-0.3));
        b.params.push_back(scalar(std::exp(Complex(0, 2.1))));
        a.tail = b.tail = Tail::Terminated;
        const SchurFunction fa = SchurFunction::from_cmv(a, recommended_depth(a));
        const SchurFunction fb = SchurFunction::from_cmv(b, recommended_depth(b));
        const double r = 0.3;
        const double bound = 2.0 * r * std::pow(r / ((1.0 - r) * (1.0 - r)), double(n + 1));
        for (const Complex lambda : circle_points(r, 16))
            CHECK(operator_norm(fa.value(lambda) - fb.value(lambda)) <= bound);
    }
}

TEST_CASE("Schwartz bound on the Moebius parameter") {
    const auto seq = random_choice_sequence(2, 2, 4, 51, SequenceKind::Pure);
    const SchurFunction f = SchurFunction::from_cmv(seq, 8);
    const auto step = schur_step(f, 14);
    for (const Complex lambda : circle_points(0.6, 8)) {
        const double z = std::abs(lambda) * operator_norm(step.iterate.value(lambda));
        CHECK(z <= std::abs(lambda) + 1e-9);
    }
}

TEST_CASE("transfer of a CMV build has the sequence as parameters") {
    for (std::uint64_t seed : {101ull, 202ull, 303ull}) {
        const auto seq = random_choice_sequence(2, 2, 3, seed, SequenceKind::TerminateUnitary);
        const SchurFunction f = SchurFunction::from_cmv(seq, recommended_depth(seq));
        const auto back = schur_parameters(f, seq.size());
        REQUIRE(back.size() == seq.size());
        for (Index k = 0; k < seq.size(); ++k)
            CHECK(diff(back.params[static_cast<std::size_t>(k)],
                       seq.params[static_cast<std::size_t>(k)]) < 1e-8);
        CHECK(back.tail == Tail::Terminated);
    }
}
