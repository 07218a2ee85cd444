#include "opmap/element_io.hpp"

namespace opmap {

namespace {

cd complex_from_json(const json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw InputError("complex entries must be numbers or [re, im] pairs");
  return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw InputError("matrix must be a nonempty array of rows");
  std::size_t cols = 0;
  for (const auto& row : j) {
    if (!row.is_array() || row.empty()) throw InputError("matrix rows must be nonempty arrays");
    if (cols == 0) cols = row.size();
    if (row.size() != cols) throw InputError("ragged matrix");
  }
  Mat m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = complex_from_json(j[r][c]);
  return m;
}

json shape_to_json(const Shape& s) { return s.dims(); }

Shape shape_from_json(const json& j) {
  if (!j.is_array()) throw InputError("shape must be an array of block sizes");
  std::vector<int> dims;
  for (const auto& d : j) {
    if (!d.is_number_integer()) throw InputError("block sizes must be integers");
    dims.push_back(d.get<int>());
  }
  try {
    return Shape(std::move(dims));
  } catch (const ShapeMismatch& e) {
    throw InputError(e.what());
  }
}

json element_to_json(const Element& x) {
  json blocks = json::array();
  for (const auto& b : x.blocks()) blocks.push_back(matrix_to_json(b));
  return {{"shape", shape_to_json(x.shape())}, {"blocks", blocks}};
}

Element element_from_json(const json& j) {
  if (!j.is_object() || !j.contains("shape") || !j.contains("blocks"))
    throw InputError("element must be an object with shape and blocks");
  Shape s = shape_from_json(j.at("shape"));
  const auto& bj = j.at("blocks");
  if (!bj.is_array() || bj.size() != s.block_count())
    throw InputError("element block count does not match shape");
  std::vector<Mat> blocks;
  for (const auto& b : bj) blocks.push_back(matrix_from_json(b));
  try {
    return Element(s, std::move(blocks));
  } catch (const ShapeMismatch& e) {
    throw InputError(e.what());
  }
}

json tolerance_to_json(const Tolerance& t) {
  return {{"psd_tol", t.psd}, {"eq_tol", t.eq}, {"herm_tol", t.herm}};
}

Tolerance tolerance_from_json(const json& j) {
  Tolerance t;
  t.psd = j.value("psd_tol", t.psd);
  t.eq = j.value("eq_tol", t.eq);
  t.herm = j.value("herm_tol", t.herm);
  t.validate();
  return t;
}

}  // namespace opmap
