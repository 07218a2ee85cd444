#pragma once

#include <json.hpp>

#include "opmap/algebra.hpp"

namespace opmap {

using json = nlohmann::json;

// Matrices are row-major nested arrays of [re, im] pairs.
json matrix_to_json(const Mat& m);
Mat matrix_from_json(const json& j);

// {"shape": [d1, ...], "blocks": [matrix, ...]}
json element_to_json(const Element& x);
Element element_from_json(const json& j);

json shape_to_json(const Shape& s);
Shape shape_from_json(const json& j);

json tolerance_to_json(const Tolerance& t);
Tolerance tolerance_from_json(const json& j);

}  // namespace opmap
