#include "opmap/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace opmap {

namespace {

double spectral_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  if (m.rows() == m.cols() && m.isApprox(m.adjoint(), 0.0)) {
    Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Mat g = m.cols() <= m.rows() ? Mat(m.adjoint() * m) : Mat(m * m.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
}

double min_hermitian_eig(const Mat& h) {
  if (h.rows() == 1) return h(0, 0).real();
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace

Shape::Shape(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw ShapeMismatch("shape must have at least one block");
  for (int d : dims_)
    if (d < 1) throw ShapeMismatch("block dimensions must be positive");
}

long Shape::total_dimension() const {
  long t = 0;
  for (int d : dims_) t += static_cast<long>(d) * d;
  return t;
}

int Shape::trace_dimension() const {
  int t = 0;
  for (int d : dims_) t += d;
  return t;
}

bool Shape::is_commutative() const {
  return std::all_of(dims_.begin(), dims_.end(), [](int d) { return d == 1; });
}

Shape Shape::amplified(int n) const {
  if (n < 1) throw InputError("amplification order must be positive");
  std::vector<int> out(dims_);
  for (int& d : out) d *= n;
  return Shape(std::move(out));
}

std::string Shape::str() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < dims_.size(); ++i) os << (i ? "," : "") << dims_[i];
  os << ']';
  return os.str();
}

Shape concat(std::span<const Shape> shapes) {
  std::vector<int> dims;
  for (const auto& s : shapes) dims.insert(dims.end(), s.dims().begin(), s.dims().end());
  return Shape(std::move(dims));
}

Shape commutative_shape(int p) { return Shape(std::vector<int>(static_cast<std::size_t>(p), 1)); }

Shape tensor_shape(const Shape& a, const Shape& b) {
  std::vector<int> dims;
  for (int x : a.dims())
    for (int y : b.dims()) dims.push_back(x * y);
  return Shape(std::move(dims));
}

void Tolerance::validate() const {
  for (double v : {psd, eq, herm})
    if (!std::isfinite(v) || v < 0) throw InputError("tolerances must be finite and nonnegative");
}

Element::Element(Shape shape, std::vector<Mat> blocks)
    : shape_(std::move(shape)), blocks_(std::move(blocks)) {
  if (blocks_.size() != shape_.block_count())
    throw ShapeMismatch("block count does not match shape " + shape_.str());
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    int d = shape_.dim(b);
    if (blocks_[b].rows() != d || blocks_[b].cols() != d)
      throw ShapeMismatch("block " + std::to_string(b) + " does not match shape " + shape_.str());
  }
}

Element::Element(const Mat& block) : Element(Shape{static_cast<int>(block.rows())}, {block}) {}

Element Element::zero(const Shape& shape) {
  std::vector<Mat> blocks;
  for (int d : shape.dims()) blocks.push_back(Mat::Zero(d, d));
  return Element(shape, std::move(blocks));
}

Element Element::identity(const Shape& shape) { return scalar(shape, 1.0); }

Element Element::scalar(const Shape& shape, cd value) {
  std::vector<Mat> blocks;
  for (int d : shape.dims()) blocks.push_back(value * Mat::Identity(d, d));
  return Element(shape, std::move(blocks));
}

Element Element::center_lift(const Shape& shape, std::span<const cd> coords) {
  if (coords.size() != shape.block_count()) throw ShapeMismatch("center coordinate count mismatch");
  std::vector<Mat> blocks;
  for (std::size_t b = 0; b < coords.size(); ++b)
    blocks.push_back(coords[b] * Mat::Identity(shape.dim(b), shape.dim(b)));
  return Element(shape, std::move(blocks));
}

Element Element::adjoint() const {
  std::vector<Mat> out;
  for (const auto& m : blocks_) out.push_back(m.adjoint());
  return Element(shape_, std::move(out));
}

Element Element::conjugate() const {
  std::vector<Mat> out;
  for (const auto& m : blocks_) out.push_back(m.conjugate());
  return Element(shape_, std::move(out));
}

Element Element::transpose() const {
  std::vector<Mat> out;
  for (const auto& m : blocks_) out.push_back(m.transpose());
  return Element(shape_, std::move(out));
}

Element Element::hermitian_part() const {
  std::vector<Mat> out;
  for (const auto& m : blocks_) out.push_back(0.5 * (m + m.adjoint()));
  return Element(shape_, std::move(out));
}

double Element::norm() const {
  double n = 0;
  for (const auto& m : blocks_) n = std::max(n, spectral_norm(m));
  return n;
}

double Element::max_abs() const {
  double n = 0;
  for (const auto& m : blocks_)
    if (m.size()) n = std::max(n, m.cwiseAbs().maxCoeff());
  return n;
}

void Element::require_same(const Element& y, const char* op) const {
  if (!(shape_ == y.shape_))
    throw ShapeMismatch(std::string(op) + ": shapes " + shape_.str() + " and " + y.shape_.str());
}

Element Element::operator+(const Element& y) const {
  require_same(y, "add");
  std::vector<Mat> out;
  for (std::size_t b = 0; b < blocks_.size(); ++b) out.push_back(blocks_[b] + y.blocks_[b]);
  return Element(shape_, std::move(out));
}

Element Element::operator-(const Element& y) const {
  require_same(y, "subtract");
  std::vector<Mat> out;
  for (std::size_t b = 0; b < blocks_.size(); ++b) out.push_back(blocks_[b] - y.blocks_[b]);
  return Element(shape_, std::move(out));
}

Element Element::operator*(const Element& y) const {
  require_same(y, "multiply");
  std::vector<Mat> out;
  for (std::size_t b = 0; b < blocks_.size(); ++b) out.push_back(blocks_[b] * y.blocks_[b]);
  return Element(shape_, std::move(out));
}

Element Element::operator-() const { return cd(-1.0) * *this; }

Element& Element::operator+=(const Element& y) {
  require_same(y, "add");
  for (std::size_t b = 0; b < blocks_.size(); ++b) blocks_[b] += y.blocks_[b];
  return *this;
}

Element& Element::operator-=(const Element& y) {
  require_same(y, "subtract");
  for (std::size_t b = 0; b < blocks_.size(); ++b) blocks_[b] -= y.blocks_[b];
  return *this;
}

Element operator*(cd s, const Element& x) {
  std::vector<Mat> out;
  for (const auto& m : x.blocks_) out.push_back(s * m);
  return Element(x.shape_, std::move(out));
}

bool Element::operator==(const Element& other) const {
  if (!(shape_ == other.shape_)) return false;
  for (std::size_t b = 0; b < blocks_.size(); ++b)
    if (blocks_[b] != other.blocks_[b]) return false;
  return true;
}

Element commutator(const Element& a, const Element& b) { return a * b - b * a; }

Element anticommutator(const Element& a, const Element& b) { return a * b + b * a; }

Element schur(const Element& x, const Element& y) {
  if (!(x.shape() == y.shape())) throw ShapeMismatch("schur: shape mismatch");
  std::vector<Mat> out;
  for (std::size_t b = 0; b < x.blocks().size(); ++b)
    out.push_back(x.block(b).cwiseProduct(y.block(b)));
  return Element(x.shape(), std::move(out));
}

Element tensor(const Element& x, const Element& y) {
  std::vector<Mat> out;
  for (const auto& a : x.blocks()) {
    for (const auto& b : y.blocks()) {
      Mat k(a.rows() * b.rows(), a.cols() * b.cols());
      for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
          k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
      out.push_back(std::move(k));
    }
  }
  return Element(tensor_shape(x.shape(), y.shape()), std::move(out));
}

std::vector<cd> center_coordinates(const Element& x) {
  std::vector<cd> c;
  for (std::size_t b = 0; b < x.blocks().size(); ++b)
    c.push_back(x.block(b).trace() / static_cast<double>(x.shape().dim(b)));
  return c;
}

Element center_valued_trace(const Element& x) {
  auto c = center_coordinates(x);
  return Element::center_lift(x.shape(), c);
}

PsdResult is_positive(const Element& x, const Tolerance& tol) {
  PsdResult r;
  double scale = 1.0 + x.norm();
  r.herm_deviation = (x - x.adjoint()).norm();
  r.min_eig = min_eigenvalue(x);
  r.positive = r.herm_deviation <= tol.herm * scale && r.min_eig >= -tol.psd * scale;
  return r;
}

double min_eigenvalue(const Element& x) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& b : x.blocks()) m = std::min(m, min_hermitian_eig(0.5 * (b + b.adjoint())));
  return m;
}

std::vector<double> hermitian_eigenvalues(const Element& x) {
  std::vector<double> ev;
  for (const auto& b : x.blocks()) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (b + b.adjoint()), Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) ev.push_back(es.eigenvalues()(i));
  }
  std::sort(ev.begin(), ev.end());
  return ev;
}

BlockPositivity block_positive_2x2(const Element& a, const Element& x, const Element& b,
                                   const Tolerance& tol) {
  if (!(a.shape() == x.shape()) || !(a.shape() == b.shape()))
    throw ShapeMismatch("block_positive_2x2: shape mismatch");
  BlockPositivity r;
  auto direct = is_positive(block_matrix({{a, x}, {x.adjoint(), b}}), tol);
  r.positive = direct.positive;
  r.min_eig = direct.min_eig;

  constexpr double kUnitRoundoff = 1.1e-16;
  double base = 1.0 + a.norm();
  r.schur_positive = true;
  for (double rung : {1e-4, 1e-6, 1e-8}) {
    double eps = rung * base;
    for (std::size_t blk = 0; blk < a.blocks().size() && r.schur_positive; ++blk) {
      Mat ah = 0.5 * (a.block(blk) + a.block(blk).adjoint());
      Mat shifted = ah + eps * Mat::Identity(ah.rows(), ah.cols());
      Eigen::LLT<Mat> llt(shifted);
      if (llt.info() != Eigen::Success) {
        r.schur_positive = false;
        break;
      }
      Mat y = llt.matrixL().solve(x.block(blk));
      Mat s = b.block(blk) - y.adjoint() * y;
      Eigen::SelfAdjointEigenSolver<Mat> es(shifted, Eigen::EigenvaluesOnly);
      double lo = es.eigenvalues()(0);
      if (lo <= 0) {
        r.schur_positive = false;
        break;
      }
      double cond = es.eigenvalues()(es.eigenvalues().size() - 1) / lo;
      double ynorm = spectral_norm(y);
      double floor = tol.psd * (1.0 + spectral_norm(s)) +
                     64 * kUnitRoundoff * cond * (1.0 + ynorm * ynorm);
      double herm = spectral_norm(s - s.adjoint());
      if (herm > tol.herm * (1.0 + spectral_norm(s)) + floor ||
          min_hermitian_eig(0.5 * (s + s.adjoint())) < -floor)
        r.schur_positive = false;
    }
    if (!r.schur_positive) break;
  }
  r.agree = r.positive == r.schur_positive;
  return r;
}

Element block_matrix(const std::vector<std::vector<Element>>& entries) {
  std::size_t n = entries.size();
  if (n == 0) throw ShapeMismatch("block_matrix: empty array");
  const Shape& base = entries[0].at(0).shape();
  for (const auto& row : entries) {
    if (row.size() != n) throw ShapeMismatch("block_matrix: array must be square");
    for (const auto& e : row)
      if (!(e.shape() == base)) throw ShapeMismatch("block_matrix: entries must share one shape");
  }
  std::vector<Mat> blocks;
  for (std::size_t b = 0; b < base.block_count(); ++b) {
    int d = base.dim(b);
    Mat m(n * d, n * d);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m.block(i * d, j * d, d, d) = entries[i][j].block(b);
    blocks.push_back(std::move(m));
  }
  return Element(base.amplified(static_cast<int>(n)), std::move(blocks));
}

std::vector<std::vector<Element>> split_block_matrix(const Element& x, int n) {
  if (n < 1) throw InputError("split_block_matrix: n must be positive");
  std::vector<int> dims;
  for (int d : x.shape().dims()) {
    if (d % n) throw ShapeMismatch("split_block_matrix: block side not divisible by n");
    dims.push_back(d / n);
  }
  Shape base(dims);
  std::vector<std::vector<Element>> out(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      std::vector<Mat> blocks;
      for (std::size_t b = 0; b < dims.size(); ++b) {
        int d = dims[b];
        blocks.push_back(x.block(b).block(i * d, j * d, d, d));
      }
      out[i].emplace_back(base, std::move(blocks));
    }
  }
  return out;
}

bool is_normal(const Element& x, const Tolerance& tol) {
  double n = x.norm();
  return (x.adjoint() * x - x * x.adjoint()).norm() <= tol.herm * (1.0 + n * n);
}

std::vector<cd> spectrum(const Element& x) {
  std::vector<cd> out;
  for (const auto& b : x.blocks()) {
    Eigen::ComplexEigenSolver<Mat> es(b, false);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
  }
  return out;
}

namespace {

bool inside(const Disk& d, cd p) { return std::abs(p - d.center) <= d.radius * (1 + 1e-12) + 1e-15; }

Disk from_two(cd a, cd b) { return {0.5 * (a + b), 0.5 * std::abs(a - b)}; }

Disk from_three(cd a, cd b, cd c) {
  double bx = b.real() - a.real(), by = b.imag() - a.imag();
  double cx = c.real() - a.real(), cy = c.imag() - a.imag();
  double det = 2 * (bx * cy - by * cx);
  if (std::abs(det) < 1e-300) {
    Disk best = from_two(a, b);
    for (const Disk& d : {from_two(a, c), from_two(b, c)})
      if (d.radius > best.radius) best = d;
    return best;
  }
  double b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
  double ux = (cy * b2 - by * c2) / det, uy = (bx * c2 - cx * b2) / det;
  cd center = a + cd(ux, uy);
  return {center, std::max({std::abs(a - center), std::abs(b - center), std::abs(c - center)})};
}

}  // namespace

Disk enclosing_disk(std::span<const cd> pts) {
  if (pts.empty()) return {};
  Disk d{pts[0], 0.0};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (inside(d, pts[i])) continue;
    d = {pts[i], 0.0};
    for (std::size_t j = 0; j < i; ++j) {
      if (inside(d, pts[j])) continue;
      d = from_two(pts[i], pts[j]);
      for (std::size_t k = 0; k < j; ++k)
        if (!inside(d, pts[k])) d = from_three(pts[i], pts[j], pts[k]);
    }
  }
  return d;
}

Disk smallest_disk(const Element& x, const Tolerance& tol) {
  if (!is_normal(x, tol)) throw PreconditionError("smallest_disk: element is not normal");
  if ((x - x.adjoint()).norm() <= tol.herm * (1.0 + x.norm())) {
    auto ev = hermitian_eigenvalues(x);
    return {cd(0.5 * (ev.front() + ev.back()), 0.0), 0.5 * (ev.back() - ev.front())};
  }
  auto sp = spectrum(x);
  return enclosing_disk(sp);
}

double smallest_disk_radius(const Element& x, const Tolerance& tol) {
  return smallest_disk(x, tol).radius;
}

Element spectral_apply(const Element& x, const std::function<double(double)>& f,
                       bool clamp_nonnegative) {
  std::vector<Mat> out;
  for (const auto& b : x.blocks()) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (b + b.adjoint()));
    Eigen::VectorXd ev = es.eigenvalues();
    Vec fv(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i)
      fv(i) = f(clamp_nonnegative ? std::max(ev(i), 0.0) : ev(i));
    const Mat& v = es.eigenvectors();
    out.push_back(v * fv.asDiagonal() * v.adjoint());
  }
  return Element(x.shape(), std::move(out));
}

Mat to_dense(const Element& x) {
  int n = x.shape().trace_dimension();
  Mat m = Mat::Zero(n, n);
  int off = 0;
  for (const auto& b : x.blocks()) {
    m.block(off, off, b.rows(), b.cols()) = b;
    off += static_cast<int>(b.rows());
  }
  return m;
}

Element from_dense(const Shape& shape, const Mat& dense) {
  if (dense.rows() != shape.trace_dimension() || dense.cols() != shape.trace_dimension())
    throw ShapeMismatch("from_dense: size does not match shape " + shape.str());
  std::vector<Mat> blocks;
  int off = 0;
  for (int d : shape.dims()) {
    blocks.push_back(dense.block(off, off, d, d));
    off += d;
  }
  return Element(shape, std::move(blocks));
}

}  // namespace opmap
