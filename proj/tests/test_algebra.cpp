#include <doctest.h>

#include "opmap/algebra.hpp"
#include "opmap/element_io.hpp"
#include "opmap/random.hpp"
#include "oracles.hpp"

using namespace opmap;

namespace {

Element diag2(double a, double b) {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return Element(m);
}

}  // namespace

TEST_CASE("shape validation") {
  CHECK_THROWS_AS(Shape(std::vector<int>{}), ShapeMismatch);
  CHECK_THROWS_AS(Shape({2, 0}), ShapeMismatch);
  Shape s{2, 3};
  CHECK(s.total_dimension() == 13);
  CHECK(s.trace_dimension() == 5);
  CHECK(s.amplified(2) == Shape{4, 6});
  CHECK(tensor_shape(Shape{2, 3}, Shape{1, 2}) == Shape{2, 4, 3, 6});
  CHECK_THROWS_AS(Element(s, {Mat::Zero(2, 2)}), ShapeMismatch);
  CHECK_THROWS_AS(Element(s, {Mat::Zero(2, 2), Mat::Zero(2, 2)}), ShapeMismatch);
}

TEST_CASE("blockwise arithmetic") {
  Rng rng(1);
  Shape s{2, 3};
  Element x = rng.gaussian(s), y = rng.gaussian(s);
  CHECK(multiply(Element::identity(s), x) == x);
  Element h = rng.hermitian(s);
  CHECK(adjoint(h).max_abs() > 0);
  CHECK((adjoint(h) - h).max_abs() == 0.0);
  Element p = x * y;
  CHECK((p.block(0) - x.block(0) * y.block(0)).norm() == 0.0);
  CHECK((p.block(1) - x.block(1) * y.block(1)).norm() == 0.0);
  CHECK(x.adjoint().adjoint() == x);
  CHECK_THROWS_AS(x * Element::identity(Shape{2}), ShapeMismatch);
}

TEST_CASE("norm is the max block spectral norm and satisfies the C* identity") {
  Rng rng(2);
  Element x = diag2(3, -1);
  CHECK(x.norm() == doctest::Approx(3));
  for (int t = 0; t < 200; ++t) {
    Element g = 3.7 * rng.gaussian(Shape{2, 3, 1});
    double n = g.norm();
    CHECK(std::abs((g.adjoint() * g).norm() - n * n) <= 1e-10 * n * n);
  }
}

TEST_CASE("is_positive examples") {
  auto r = is_positive(Element::identity(Shape{3}));
  CHECK(r.positive);
  CHECK(r.min_eig == doctest::Approx(1));
  r = is_positive(diag2(1, -1));
  CHECK_FALSE(r.positive);
  CHECK(r.min_eig == doctest::Approx(-1));
  Mat nh(2, 2);
  nh << 1, 1, 0, 1;
  r = is_positive(Element(nh));
  CHECK_FALSE(r.positive);
  CHECK(r.herm_deviation > 0.5);
}

TEST_CASE("Gram elements are positive over 1000 seeds") {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(seed);
    Shape s{static_cast<int>(1 + seed % 4), 2};
    std::vector<Mat> blocks;
    for (int d : s.dims()) {
      Mat g = rng.gaussian(d, d);
      blocks.push_back(g * g.adjoint());
    }
    auto r = is_positive(Element(s, blocks));
    REQUIRE(r.positive);
    CHECK(r.min_eig >= -1e-9);
  }
}

TEST_CASE("block_positive_2x2") {
  Shape s{2};
  Element i = Element::identity(s), z = Element::zero(s);
  auto r = block_positive_2x2(i, i, i);
  CHECK(r.positive);
  CHECK(r.agree);
  r = block_positive_2x2(i, i, z);
  CHECK_FALSE(r.positive);
  CHECK_FALSE(r.schur_positive);
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    Shape sh{1 + t % 3, 2};
    std::vector<Mat> gb;
    for (int d : sh.dims()) gb.push_back(rng.gaussian(d, rng.uniform_int(1, d)) );
    // A = G G*, X = G padded to square, B = I
    std::vector<Mat> ab, xb;
    for (std::size_t b = 0; b < gb.size(); ++b) {
      int d = sh.dim(b);
      Mat g = Mat::Zero(d, d);
      g.leftCols(gb[b].cols()) = gb[b];
      ab.push_back(g * g.adjoint());
      xb.push_back(g);
    }
    Element a(sh, ab), x(sh, xb);
    auto rr = block_positive_2x2(a, x, Element::identity(sh));
    CHECK(rr.positive);
    CHECK(rr.agree);
  }
}

TEST_CASE("block_positive_2x2 agrees with the assembled block matrix") {
  Rng rng(4);
  int agree = 0;
  for (int t = 0; t < 200; ++t) {
    Shape s{2, 1};
    Element a = rng.psd(s), b = rng.psd(s);
    Element x = rng.uniform(0.0, 1.5) * rng.gaussian(s);
    auto r = block_positive_2x2(a, x, b);
    bool direct = is_positive(block_matrix({{a, x}, {x.adjoint(), b}})).positive;
    CHECK(r.positive == direct);
    agree += r.agree;
  }
  CHECK(agree == 200);
}

TEST_CASE("tensor") {
  Shape s2{2};
  CHECK(tensor(Element::identity(s2), Element::identity(s2)) == Element::identity(Shape{4}));
  Element e11(oracle::unit(2, 0, 0));
  Element t = tensor(e11, e11);
  CHECK(t.shape() == Shape{4});
  CHECK(t.block(0)(0, 0) == cd(1.0));
  CHECK(t.block(0).cwiseAbs().sum() == doctest::Approx(1.0));
  Rng rng(5);
  for (int k = 0; k < 200; ++k) {
    Element x = rng.gaussian(Shape{2, 3}), y = rng.gaussian(Shape{3, 1});
    Element lhs = tensor(x, Element::identity(y.shape())) * tensor(Element::identity(x.shape()), y);
    CHECK((lhs - tensor(x, y)).max_abs() <= 1e-14);
    CHECK((tensor(x, y).block(1) - oracle::kron(x.block(0), y.block(1))).norm() <= 1e-14);
    Element p = rng.psd(Shape{2}), q = rng.psd(Shape{3});
    CHECK(is_positive(tensor(p, q)).positive);
  }
}

TEST_CASE("schur") {
  Rng rng(6);
  Element x = rng.gaussian(Shape{3});
  CHECK(schur(x, Element(Mat::Ones(3, 3))) == x);
  CHECK(schur(Element(oracle::unit(2, 0, 1)), Element(oracle::unit(2, 1, 0))).max_abs() == 0.0);
  for (int t = 0; t < 100; ++t) CHECK(is_positive(schur(rng.psd(Shape{4}), rng.psd(Shape{4}))).positive);
}

TEST_CASE("commutators") {
  Rng rng(7);
  Element a = rng.gaussian(Shape{3});
  CHECK(commutator(a, a).max_abs() == 0.0);
  Element c = commutator(Element(oracle::unit(2, 0, 0)), Element(oracle::unit(2, 0, 1)));
  CHECK(c == Element(oracle::unit(2, 0, 1)));
  CHECK(anticommutator(Element(oracle::pauli_x()), Element(oracle::pauli_y())).max_abs() == 0.0);
}

TEST_CASE("center_valued_trace") {
  Shape s{2, 3};
  CHECK(center_valued_trace(Element::identity(s)) == Element::identity(s));
  Element half = center_valued_trace(Element(oracle::unit(2, 0, 0)));
  CHECK((half - 0.5 * Element::identity(Shape{2})).max_abs() <= 1e-15);
  Rng rng(8);
  for (int t = 0; t < 500; ++t) {
    Element x = rng.gaussian(s), y = rng.gaussian(s);
    CHECK((center_valued_trace(x * y) - center_valued_trace(y * x)).norm() <= 1e-12);
    Element e = center_valued_trace(x);
    CHECK((center_valued_trace(e) - e).norm() <= 1e-12);
    CHECK(commutator(e, y).norm() <= 1e-12);
    CHECK(is_positive(center_valued_trace(rng.psd(s))).positive);
  }
}

TEST_CASE("smallest disk radius") {
  CHECK(smallest_disk_radius(diag2(0, 1)) == doctest::Approx(0.5));
  CHECK(smallest_disk_radius(Element::identity(Shape{3})) == doctest::Approx(0.0));
  Rng rng(9);
  for (int t = 0; t < 20; ++t) {
    Element h = rng.hermitian(Shape{3});
    auto ev = hermitian_eigenvalues(h);
    double r = smallest_disk_radius(h);
    CHECK(std::abs(r - 0.5 * (ev.back() - ev.front())) <= 1e-10);
    CHECK(std::abs(r - oracle::grid_disk_radius(h.block(0), ev.front(), ev.back())) <= 1e-6);
  }
  // normal, non-Hermitian: unitary has spectrum on the unit circle
  for (int t = 0; t < 10; ++t) {
    Element u = rng.unitary(Shape{4});
    auto sp = spectrum(u);
    CHECK(std::abs(smallest_disk_radius(u) - oracle::brute_disk_radius(sp)) <= 1e-9);
  }
  Mat nn(2, 2);
  nn << 0, 1, 0, 0;
  CHECK_THROWS_AS(smallest_disk_radius(Element(nn)), PreconditionError);
}

TEST_CASE("enclosing disk of planar points") {
  std::vector<cd> pts{{0, 0}, {2, 0}, {1, 1}, {1, -1}, {1, 0.2}};
  Disk d = enclosing_disk(pts);
  CHECK(d.radius == doctest::Approx(1.0));
  CHECK(std::abs(d.center - cd(1, 0)) <= 1e-12);
  std::vector<cd> tri{{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}};
  CHECK(enclosing_disk(tri).radius == doctest::Approx(1 / std::sqrt(3.0)));
  Rng rng(13);
  for (int t = 0; t < 300; ++t) {
    std::vector<cd> cloud;
    int n = rng.uniform_int(1, 9);
    for (int i = 0; i < n; ++i) cloud.push_back(rng.complex_normal());
    CHECK(std::abs(enclosing_disk(cloud).radius - oracle::brute_disk_radius(cloud)) <= 1e-9);
  }
}

TEST_CASE("block_matrix") {
  Rng rng(10);
  Element x = rng.gaussian(Shape{2, 1});
  CHECK(block_matrix({{x}}) == x);
  Element one = Element::identity(Shape{1}), zero = Element::zero(Shape{1});
  CHECK(block_matrix({{one, zero}, {zero, one}}) == Element::identity(Shape{2}));
  Element a = rng.gaussian(Shape{2, 3}), b = rng.gaussian(Shape{2, 3});
  auto parts = split_block_matrix(block_matrix({{a, b}, {b, a}}), 2);
  CHECK(parts[0][1] == b);
  CHECK(parts[1][1] == a);
  CHECK_THROWS_AS(block_matrix({{a, x}, {a, a}}), ShapeMismatch);
}

TEST_CASE("spectral calculus") {
  Rng rng(11);
  Element p = rng.psd(Shape{3, 2});
  Element sq = spectral_apply(p, [](double v) { return std::sqrt(v); }, true);
  CHECK((sq * sq - p).norm() <= 1e-12);
  CHECK((sq.block(0) - oracle::mat_power(p.block(0), 0.5)).norm() <= 1e-12);
}

TEST_CASE("element JSON round trip is exact") {
  Rng rng(12);
  Element x = rng.gaussian(Shape{2, 3, 1});
  std::string text = element_to_json(x).dump();
  CHECK(element_from_json(json::parse(text)) == x);
  CHECK_THROWS_AS(element_from_json(json::parse(R"({"shape":[2],"blocks":[[[1,2],[3]]]})")), InputError);
  CHECK_THROWS_AS(element_from_json(json::parse(R"({"shape":[2],"blocks":[[[1]]]})")), InputError);
  CHECK_THROWS_AS(element_from_json(json::parse(R"({"shape":[2,1],"blocks":[[[1,0],[0,1]]]})")), InputError);
}
