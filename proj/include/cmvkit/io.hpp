#pragma once

#include <string>

#include <json.hpp>

#include "cmvkit/choice_sequence.hpp"
#include "cmvkit/cmv.hpp"
#include "cmvkit/dilations.hpp"
#include "cmvkit/systems.hpp"

namespace cmvkit::io {

using nlohmann::json;

// matrix:   {"rows": r, "cols": c, "data": [[re, im], ...]} row-major
// sequence: {"input_dim", "output_dim", "tail", "parameters": [matrix, ...]}
// system:   {"D", "C", "B", "A"}
// measure:  {"dim", "atoms": [{"zeta": [re, im], "weight": matrix}]}
json to_json(const CMatrix& m);
CMatrix matrix_from_json(const json& j);

json to_json(const ChoiceSequence& seq);
ChoiceSequence sequence_from_json(const json& j);

json to_json(const DiscreteSystem& sys);
DiscreteSystem system_from_json(const json& j);

json to_json(const MatrixMeasure& mu);
MatrixMeasure measure_from_json(const json& j);

json to_json(const BlockCmv& cmv);
json to_json(const TruncatedCmv& t);
json to_json(const DilationReport& report);

json load(const std::string& path);
void save(const std::string& path, const json& j);

} // namespace cmvkit::io
