#include "cmvkit/io.hpp"

#include <fstream>

namespace cmvkit::io {

json to_json(const CMatrix& m) {
    json data = json::array();
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j)
            data.push_back({m(i, j).real(), m(i, j).imag()});
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

CMatrix matrix_from_json(const json& j) {
    const Index rows = j.at("rows").get<Index>();
    const Index cols = j.at("cols").get<Index>();
    const auto& data = j.at("data");
    if (rows < 0 || cols < 0 || static_cast<Index>(data.size()) != rows * cols)
        throw BadDims("matrix data length does not match rows*cols");
    CMatrix m(rows, cols);
    Index k = 0;
    for (Index i = 0; i < rows; ++i)
        for (Index jj = 0; jj < cols; ++jj, ++k)
            m(i, jj) = Complex(data[k][0].get<double>(), data[k][1].get<double>());
    return m;
}

json to_json(const ChoiceSequence& seq) {
    json params = json::array();
    for (const auto& g : seq.params) params.push_back(to_json(g));
    return {{"input_dim", seq.input_dim},
            {"output_dim", seq.output_dim},
            {"tail", seq.tail == Tail::ZeroTail ? "zero_tail" : "terminated"},
            {"parameters", std::move(params)}};
}

ChoiceSequence sequence_from_json(const json& j) {
    ChoiceSequence seq;
    seq.input_dim = j.at("input_dim").get<Index>();
    seq.output_dim = j.at("output_dim").get<Index>();
    const std::string tail = j.at("tail").get<std::string>();
    if (tail == "zero_tail")
        seq.tail = Tail::ZeroTail;
    else if (tail == "terminated")
        seq.tail = Tail::Terminated;
    else
        throw InvalidSequence("unknown tail kind '" + tail + "'");
    for (const auto& p : j.at("parameters")) seq.params.push_back(matrix_from_json(p));
    return seq;
}

json to_json(const DiscreteSystem& sys) {
    return {{"D", to_json(sys.d)}, {"C", to_json(sys.c)}, {"B", to_json(sys.b)},
            {"A", to_json(sys.a)}};
}

DiscreteSystem system_from_json(const json& j) {
    DiscreteSystem sys;
    sys.d = matrix_from_json(j.at("D"));
    sys.c = matrix_from_json(j.at("C"));
    sys.b = matrix_from_json(j.at("B"));
    sys.a = matrix_from_json(j.at("A"));
    sys.check_shapes();
    return sys;
}

json to_json(const MatrixMeasure& mu) {
    json atoms = json::array();
    for (const auto& atom : mu.atoms)
        atoms.push_back({{"zeta", {atom.zeta.real(), atom.zeta.imag()}},
                         {"weight", to_json(atom.weight)}});
    return {{"dim", mu.dim}, {"atoms", std::move(atoms)}};
}

MatrixMeasure measure_from_json(const json& j) {
    MatrixMeasure mu;
    mu.dim = j.at("dim").get<Index>();
    for (const auto& a : j.at("atoms")) {
        MatrixMeasure::Atom atom;
        atom.zeta = Complex(a.at("zeta")[0].get<double>(), a.at("zeta")[1].get<double>());
        atom.weight = matrix_from_json(a.at("weight"));
        mu.atoms.push_back(std::move(atom));
    }
    return mu;
}

namespace {

json layout_to_json(const Layout& layout) {
    json out = json::array();
    for (const auto& [off, size] : layout) out.push_back({{"offset", off}, {"size", size}});
    return out;
}

} // namespace

json to_json(const BlockCmv& cmv) {
    return {{"variant", cmv.variant == CmvVariant::U0 ? "u0" : "u0_tilde"},
            {"depth", cmv.depth},
            {"exact_unitary", cmv.exact_unitary},
            {"capped", cmv.capped},
            {"matrix", to_json(cmv.matrix)},
            {"factor_left", to_json(cmv.factor_left)},
            {"factor_right", to_json(cmv.factor_right)},
            {"row_layout", layout_to_json(cmv.row_layout)},
            {"col_layout", layout_to_json(cmv.col_layout)},
            {"sequence", to_json(cmv.seq)}};
}

json to_json(const TruncatedCmv& t) {
    return {{"variant", t.variant == TruncVariant::T0 ? "t0" : "t0_tilde"},
            {"depth", t.depth},
            {"exact", t.exact},
            {"matrix", to_json(t.matrix)},
            {"factor_left", to_json(t.factor_left)},
            {"factor_right", to_json(t.factor_right)},
            {"row_layout", layout_to_json(t.row_layout)},
            {"col_layout", layout_to_json(t.col_layout)},
            {"sequence", to_json(t.seq)}};
}

json to_json(const DilationReport& report) {
    return {{"max_power", report.max_power},
            {"residuals", report.residuals},
            {"worst_residual", report.worst_residual},
            {"minimality_rank", report.minimality_rank},
            {"space_dim", report.space_dim},
            {"minimal", report.minimal},
            {"threshold", report.threshold},
            {"pass", report.pass}};
}

json load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CmvError("cannot open " + path);
    json j;
    in >> j;
    return j;
}

void save(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw CmvError("cannot write " + path);
    out << j.dump(2) << "\n";
}

} // namespace cmvkit::io
