#include <doctest.h>

#include <cstdio>

#include "common.hpp"
#include "cmvkit/io.hpp"
#include "cmvkit/verify.hpp"

using namespace cmvkit;
using tests::diff;

TEST_CASE("matrix json round trip is bit-exact") {
    Rng rng(61);
    const CMatrix m = ginibre(3, 4, rng);
    const CMatrix back = io::matrix_from_json(io::to_json(m));
    REQUIRE(back.rows() == 3);
    REQUIRE(back.cols() == 4);
    for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 4; ++j) CHECK(back(i, j) == m(i, j));
    // through text as well
    const auto text = io::to_json(m).dump();
    const CMatrix again = io::matrix_from_json(io::json::parse(text));
    for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 4; ++j) CHECK(again(i, j) == m(i, j));
}

TEST_CASE("sequence round trip preserves tail and parameters") {
    const auto seq = random_choice_sequence(2, 3, 3, 77, SequenceKind::TerminateIsometric);
    const auto back = io::sequence_from_json(io::json::parse(io::to_json(seq).dump()));
    CHECK(back.input_dim == seq.input_dim);
    CHECK(back.output_dim == seq.output_dim);
    CHECK(back.tail == seq.tail);
    REQUIRE(back.size() == seq.size());
    for (Index k = 0; k < seq.size(); ++k)
        CHECK(diff(back.params[static_cast<std::size_t>(k)],
                   seq.params[static_cast<std::size_t>(k)]) == 0.0);
}

TEST_CASE("system and measure round trips") {
    Rng rng(63);
    const CMatrix u = haar_unitary(4, rng);
    DiscreteSystem sys{u.topLeftCorner(1, 1), u.topRightCorner(1, 3), u.bottomLeftCorner(3, 1),
                       u.bottomRightCorner(3, 3)};
    const auto back = io::system_from_json(io::json::parse(io::to_json(sys).dump()));
    CHECK(diff(back.colligation(), sys.colligation()) == 0.0);

    MatrixMeasure mu;
    mu.dim = 1;
    mu.atoms.push_back({std::exp(Complex(0, 1.1)), CMatrix::Constant(1, 1, 0.25)});
    mu.atoms.push_back({std::exp(Complex(0, -0.4)), CMatrix::Constant(1, 1, 0.75)});
    const auto mu2 = io::measure_from_json(io::json::parse(io::to_json(mu).dump()));
    CHECK(mu2.dim == 1);
    REQUIRE(mu2.atoms.size() == 2);
    CHECK(mu2.atoms[0].zeta == mu.atoms[0].zeta);
    CHECK(diff(mu2.atoms[1].weight, mu.atoms[1].weight) == 0.0);
}

TEST_CASE("malformed documents raise") {
    io::json j = {{"rows", 2}, {"cols", 2}, {"data", io::json::array()}};
    CHECK_THROWS_AS(io::matrix_from_json(j), BadDims);
}

TEST_CASE("file save and load") {
    const std::string path = "/tmp/cmvkit_io_test.json";
    io::save(path, {{"x", 1.5}});
    const auto j = io::load(path);
    CHECK(j.at("x").get<double>() == 1.5);
    std::remove(path.c_str());
    CHECK_THROWS_AS(io::load("/nonexistent/file.json"), CmvError);
}

TEST_CASE("verification reports are deterministic for fixed seed") {
    const auto a = run_verification(99, 3);
    const auto b = run_verification(99, 3);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].worst == b[k].worst);
        CHECK(a[k].pass == b[k].pass);
    }
}
