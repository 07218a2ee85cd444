#include "opmap/random.hpp"

#include <cmath>

namespace opmap {

namespace {

Element normalized(Element x) {
  double n = x.norm();
  return n > 0 ? (1.0 / n) * x : x;
}

}  // namespace

double Rng::uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }

int Rng::uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }

double Rng::normal() { return normal_(eng_); }

cd Rng::complex_normal() {
  double re = normal(), im = normal();
  return cd(re, im) / std::sqrt(2.0);
}

Mat Rng::gaussian(int rows, int cols, bool real) {
  Mat g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) g(i, j) = real ? cd(normal(), 0.0) : complex_normal();
  return g;
}

Mat Rng::unitary(int d) {
  Mat g = gaussian(d, d);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR();
  // Fix column phases so the distribution is Haar.
  for (int j = 0; j < d; ++j) {
    cd rjj = r(j, j);
    double a = std::abs(rjj);
    if (a > 0) q.col(j) *= rjj / a;
  }
  return q;
}

Mat Rng::isometry(int rows, int cols) {
  if (cols > rows) throw InputError("isometry needs cols <= rows");
  return unitary(rows).leftCols(cols);
}

Mat Rng::psd(int d, int rank, bool real) {
  if (rank <= 0) rank = uniform_int(1, d);
  Mat g = gaussian(d, rank, real);
  return g * g.adjoint();
}

Element Rng::gaussian(const Shape& s, bool real) {
  std::vector<Mat> blocks;
  for (int d : s.dims()) blocks.push_back(gaussian(d, d, real));
  return normalized(Element(s, std::move(blocks)));
}

Element Rng::hermitian(const Shape& s, bool real) {
  std::vector<Mat> blocks;
  for (int d : s.dims()) {
    Mat g = gaussian(d, d, real);
    blocks.push_back(0.5 * (g + g.adjoint()));
  }
  return normalized(Element(s, std::move(blocks)));
}

Element Rng::psd(const Shape& s, bool real) {
  std::vector<Mat> blocks;
  for (int d : s.dims()) blocks.push_back(psd(d, 0, real));
  Element x = normalized(Element(s, std::move(blocks)));
  return x.hermitian_part();
}

Element Rng::unitary(const Shape& s) {
  std::vector<Mat> blocks;
  for (int d : s.dims()) blocks.push_back(unitary(d));
  return Element(s, std::move(blocks));
}

Element Rng::density(const Shape& s, bool full_rank) {
  std::vector<Mat> blocks;
  cd total = 0.0;
  for (int d : s.dims()) {
    Mat p = psd(d, full_rank ? d : 0);
    total += p.trace();
    blocks.push_back(std::move(p));
  }
  Element x(s, std::move(blocks));
  return ((1.0 / total.real()) * x).hermitian_part();
}

}  // namespace opmap
