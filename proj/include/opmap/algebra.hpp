#pragma once

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "opmap/errors.hpp"

namespace opmap {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Block structure of a finite-dimensional C*-algebra: the side lengths of the
// full matrix algebras in the direct sum, in order.
class Shape {
 public:
  Shape() : dims_{1} {}
  explicit Shape(std::vector<int> dims);
  Shape(std::initializer_list<int> dims) : Shape(std::vector<int>(dims)) {}

  const std::vector<int>& dims() const { return dims_; }
  std::size_t block_count() const { return dims_.size(); }
  int dim(std::size_t b) const { return dims_.at(b); }

  // Sum of squared block sides: the complex dimension of the algebra.
  long total_dimension() const;
  // Sum of block sides: the side of the block-diagonal dense embedding.
  int trace_dimension() const;
  bool is_commutative() const;

  // Shape of M_n over this algebra.
  Shape amplified(int n) const;

  std::string str() const;
  bool operator==(const Shape& other) const = default;

 private:
  std::vector<int> dims_;
};

Shape concat(std::span<const Shape> shapes);
// Commutative algebra C^p, i.e. p blocks of side 1.
Shape commutative_shape(int p);
// Blocks ordered lexicographically over (left block, right block).
Shape tensor_shape(const Shape& a, const Shape& b);

struct Tolerance {
  double psd = 1e-9;
  double eq = 1e-12;
  double herm = 1e-9;

  void validate() const;
  bool operator==(const Tolerance& other) const = default;
};

class Element {
 public:
  Element() : Element(zero(Shape{})) {}
  Element(Shape shape, std::vector<Mat> blocks);
  // Single-block convenience.
  explicit Element(const Mat& block);

  static Element zero(const Shape& shape);
  static Element identity(const Shape& shape);
  static Element scalar(const Shape& shape, cd value);
  // Block-scalar element with block b equal to coords[b] * I.
  static Element center_lift(const Shape& shape, std::span<const cd> coords);

  const Shape& shape() const { return shape_; }
  const std::vector<Mat>& blocks() const { return blocks_; }
  const Mat& block(std::size_t b) const { return blocks_.at(b); }

  Element adjoint() const;
  Element conjugate() const;
  Element transpose() const;
  Element hermitian_part() const;
  // max over blocks of the spectral norm
  double norm() const;
  // max over blocks and entries of the modulus
  double max_abs() const;

  Element operator+(const Element& y) const;
  Element operator-(const Element& y) const;
  Element operator*(const Element& y) const;
  Element operator-() const;
  Element& operator+=(const Element& y);
  Element& operator-=(const Element& y);
  friend Element operator*(cd s, const Element& x);
  friend Element operator*(double s, const Element& x) { return cd(s) * x; }

  bool operator==(const Element& other) const;

 private:
  void require_same(const Element& y, const char* op) const;

  Shape shape_;
  std::vector<Mat> blocks_;
};

inline Element multiply(const Element& x, const Element& y) { return x * y; }
inline Element adjoint(const Element& x) { return x.adjoint(); }
inline double distance(const Element& x, const Element& y) { return (x - y).norm(); }

Element commutator(const Element& a, const Element& b);
Element anticommutator(const Element& a, const Element& b);
Element schur(const Element& x, const Element& y);
Element tensor(const Element& x, const Element& y);

// Normalized block traces tr(X_b)/d_b.
std::vector<cd> center_coordinates(const Element& x);
Element center_valued_trace(const Element& x);

struct PsdResult {
  bool positive = false;
  double min_eig = 0.0;
  double herm_deviation = 0.0;
};

PsdResult is_positive(const Element& x, const Tolerance& tol = {});
// Smallest eigenvalue of the Hermitian part over all blocks.
double min_eigenvalue(const Element& x);
// Ascending eigenvalues of the Hermitian part, all blocks merged.
std::vector<double> hermitian_eigenvalues(const Element& x);

struct BlockPositivity {
  bool positive = false;        // direct eigenvalue test of [[A,X],[X*,B]]
  bool schur_positive = false;  // Schur complement PSD on every epsilon rung
  bool agree = false;
  double min_eig = 0.0;
};

BlockPositivity block_positive_2x2(const Element& a, const Element& x, const Element& b,
                                   const Tolerance& tol = {});

// entries[i][j] all share one shape; result lives on shape.amplified(n).
Element block_matrix(const std::vector<std::vector<Element>>& entries);
std::vector<std::vector<Element>> split_block_matrix(const Element& x, int n);

bool is_normal(const Element& x, const Tolerance& tol = {});
std::vector<cd> spectrum(const Element& x);

struct Disk {
  cd center;
  double radius = 0.0;
};

// Minimum enclosing disk of a planar point set.
Disk enclosing_disk(std::span<const cd> points);
// min over alpha of ||X - alpha I|| for normal X.
Disk smallest_disk(const Element& x, const Tolerance& tol = {});
double smallest_disk_radius(const Element& x, const Tolerance& tol = {});

// f applied through the eigendecomposition of a Hermitian element. With
// clamp_nonnegative, eigenvalues are clipped at 0 first.
Element spectral_apply(const Element& x, const std::function<double(double)>& f,
                       bool clamp_nonnegative = false);

// Block-diagonal dense embedding and its inverse.
Mat to_dense(const Element& x);
Element from_dense(const Shape& shape, const Mat& dense);

}  // namespace opmap
