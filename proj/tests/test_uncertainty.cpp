#include <doctest.h>

#include "opmap/generators.hpp"
#include "opmap/maps.hpp"
#include "opmap/random.hpp"
#include "opmap/uncertainty.hpp"
#include "oracles.hpp"

using namespace opmap;

namespace {

MapDescriptor state(const Element& rho) { return maps::state_bundle({{rho.shape(), {rho}}}); }

MapDescriptor random_states(std::uint64_t seed, const Shape& s, int count) {
  Rng rng(seed);
  maps::StateSlot slot{s, {}};
  for (int j = 0; j < count; ++j) slot.states.push_back(rng.density(s));
  return register_map(maps::state_bundle({slot}));
}

Element pauli(const Mat& m) { return Element(m); }

cd scalar_of(const Element& x) { return x.block(0)(0, 0); }

}  // namespace

TEST_CASE("variance of the unit vanishes for unital maps") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto map = gen::random_unital_cp(seed, 3, 2);
    CHECK(variance(map, Element::identity(Shape{3})).norm() <= 1e-12);
  }
}

TEST_CASE("state variance and covariance") {
  Rng rng(1);
  Element rho = rng.density(Shape{3});
  auto phi = state(rho);
  for (int t = 0; t < 20; ++t) {
    Element a = rng.hermitian(Shape{3}), b = rng.hermitian(Shape{3});
    Mat r = rho.block(0), am = a.block(0);
    cd expected = (r * am * am).trace() - std::pow((r * am).trace(), 2);
    CHECK(std::abs(scalar_of(variance(phi, a)) - expected) < 1e-13);
    CHECK(scalar_of(variance(phi, a)).real() >= -1e-14);
    Element cab = covariance(phi, a, b), cba = covariance(phi, b, a);
    CHECK((cab.adjoint() - cba).norm() < 1e-13);
  }
  auto unital = gen::random_unital_cp(3, 2, 3);
  Element a = rng.hermitian(Shape{2}), b = rng.hermitian(Shape{2});
  CHECK((covariance(unital, a, b).adjoint() - covariance(unital, b, a)).norm() < 1e-12);
  Element v = variance(unital, a);
  CHECK((v - v.adjoint()).max_abs() <= 1e-10);
}

TEST_CASE("shape and arity errors") {
  auto phi = gen::random_unital_cp(1, 2, 2);
  CHECK_THROWS_AS(covariance(phi, Element::identity(Shape{3}), Element::identity(Shape{3})), ShapeMismatch);
  CHECK_THROWS_AS(covariance(phi, Args{}, Args{}), ShapeMismatch);
}

TEST_CASE("variance-covariance matrix") {
  Rng rng(2);
  SUBCASE("A = B gives Var(A) in every block") {
    auto map = gen::random_unital_cp(5, 2, 2);
    Element a = rng.hermitian(Shape{2});
    auto blocks = split_block_matrix(vc_matrix(map, {a}, {a}), 2);
    Element v = variance(map, a);
    for (auto& row : blocks)
      for (auto& e : row) CHECK((e - v).norm() <= 1e-14);
  }
  SUBCASE("unital CP maps give PSD matrices") {
    double worst = 1;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      int d = 2 + static_cast<int>(seed % 2);
      auto map = gen::random_unital_cp(seed, d, 1 + static_cast<int>(seed % 3));
      Rng r(seed);
      auto rep = vc_report(map, {r.hermitian(Shape{d})}, {r.hermitian(Shape{d})});
      CHECK(rep.holds());
      worst = std::min(worst, rep.margin);
    }
    CHECK(worst >= -1e-9);
  }
  SUBCASE("transpose is not 3-positive and a witness is found") {
    auto t = maps::transpose(2);
    CHECK_THROWS_AS(vc_report(t, {Element::identity(Shape{2})}, {Element::identity(Shape{2})}), PreconditionError);
    bool found = false;
    for (int k = 0; k < 20 && !found; ++k) {
      Element a = rng.hermitian(Shape{2}), b = rng.hermitian(Shape{2});
      found = min_eigenvalue(vc_matrix(t, {a}, {b})) < -1e-6;
    }
    CHECK(found);
  }
}

TEST_CASE("Schrodinger relation") {
  SUBCASE("Pauli example") {
    auto phi = state(0.5 * Element::identity(Shape{2}));
    auto rep = schrodinger_margin(phi, pauli(oracle::pauli_x()), pauli(oracle::pauli_y()));
    CHECK(rep.margin == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(scalar_of(variance(phi, pauli(oracle::pauli_x()))) - 1.0) < 1e-15);
  }
  SUBCASE("commuting observables") {
    Rng rng(4);
    Mat u = rng.unitary(3);
    Mat da = Mat::Zero(3, 3), db = Mat::Zero(3, 3);
    for (int i = 0; i < 3; ++i) da(i, i) = rng.normal(), db(i, i) = rng.normal();
    auto phi = state(rng.density(Shape{3}));
    auto rep = schrodinger_margin(phi, Element(Mat(u * da * u.adjoint())), Element(Mat(u * db * u.adjoint())));
    CHECK(rep.margin >= -1e-12);
  }
  SUBCASE("random states on M2 and M3, multiple coordinates") {
    double worst = 1;
    for (std::uint64_t t = 0; t < 1000; ++t) {
      int d = 2 + static_cast<int>(t % 2);
      auto phi = random_states(t, Shape{d}, 2);
      Rng rng(trial_seed(99, t));
      auto rep = schrodinger_margin(phi, rng.hermitian(Shape{d}), rng.hermitian(Shape{d}));
      worst = std::min(worst, rep.margin);
    }
    CHECK(worst >= -1e-12);
  }
  CHECK_THROWS_AS(schrodinger_margin(gen::random_unital_cp(1, 2, 2), Element::identity(Shape{2}),
                                     Element::identity(Shape{2})),
                  PreconditionError);
}

TEST_CASE("Heisenberg suite on maps factoring through a commutative algebra") {
  double worst = 1;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    int d = 2 + static_cast<int>(seed % 2);
    gen::DmOptions o;
    o.tracial = seed % 2 == 0;
    auto map = gen::random_dm_map(seed, Shape{d}, Shape{2}, o);
    REQUIRE(map.flags().dm_order >= 4);
    Rng rng(seed);
    auto reps = heisenberg_suite(map, {rng.hermitian(Shape{d})}, {rng.hermitian(Shape{d})});
    REQUIRE(reps.size() == 4);
    for (const auto& r : reps) {
      CHECK(r.holds());
      worst = std::min(worst, r.margin);
    }
  }
  CHECK(worst >= -1e-9);
}

TEST_CASE("Heisenberg suite details") {
  Rng rng(6);
  auto map = gen::random_dm_map(6, Shape{2}, Shape{2});
  Element a = rng.hermitian(Shape{2});
  SUBCASE("A = B: the commutator entry vanishes") {
    auto reps = heisenberg_suite(map, {a}, {a});
    CHECK(reps[1].holds());
    CHECK(reps[1].margin == doctest::Approx(min_eigenvalue(variance(map, a))).epsilon(1e-9));
  }
  SUBCASE("commutative range adds the scalar product form") {
    double worst = 1;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      auto m = gen::random_dm_map(seed, Shape{3}, Shape{1}, {.tracial = seed % 2 == 1});
      Rng r(seed);
      auto reps = heisenberg_suite(m, {r.hermitian(Shape{3})}, {r.hermitian(Shape{3})});
      REQUIRE(reps.size() == 5);
      CHECK(reps[3].quantity == "heisenberg_ki2");
      worst = std::min(worst, reps[3].margin);
    }
    CHECK(worst >= -1e-12);
  }
  SUBCASE("flags are required") {
    CHECK_THROWS_AS(heisenberg_suite(gen::random_unital_cp(1, 2, 2), {a}, {a}), PreconditionError);
  }
  SUBCASE("report json") {
    auto reps = heisenberg_suite(map, {a}, {a});
    json j = inequality_to_json(reps[2]);
    CHECK(j["quantity"] == "heisenberg_iii");
    CHECK(j["details"].contains("alt_margin_norm_a"));
    CHECK(j["witness"]["a"].size() == 1);
  }
}

TEST_CASE("slot compressions") {
  Shape s{2};
  auto t = register_map(maps::tensor_map({s, s}));
  Rng rng(7);
  Element a = rng.gaussian(s), b = rng.gaussian(s);
  CHECK((slot_pair(t, 0, 1)(a, b) - tensor(a, b)).norm() < 1e-15);
  CHECK((slot_pair(t, 0, 1)(a, b) - slot_pair(t, 1, 0)(b, a)).norm() < 1e-15);
  for (int i = 0; i < 2; ++i)
    CHECK(slot_compress(t, i)(Element::identity(s)) == t(identity_tuple(t)));
  CHECK_THROWS_AS(slot_pair(t, 1, 1), InputError);
  CHECK_THROWS_AS(slot_compress(t, 2), InputError);
}

TEST_CASE("partial covariance") {
  Rng rng(8);
  Shape s{2};
  Mat v = rng.isometry(4, 2);
  auto map = register_map(maps::cp_multilinear({s, s}, v));
  SUBCASE("unit tuple gives zero for unital maps") {
    auto um = register_map(maps::cp_multilinear({s, s}, rng.isometry(4, 4)));
    REQUIRE(um.flags().unital);
    Args a{rng.hermitian(s), rng.hermitian(s)};
    CHECK(partial_covariance(um, identity_tuple(um), a).norm() <= 1e-12);
  }
  SUBCASE("k = 1 reduces to covariance") {
    auto phi = gen::random_unital_cp(2, 3, 2);
    Element a = rng.hermitian(Shape{3}), b = rng.hermitian(Shape{3});
    CHECK(partial_covariance(phi, {a}, {b}) == covariance(phi, a, b));
  }
  SUBCASE("hand assembly oracle") {
    Args a{rng.hermitian(s), rng.hermitian(s)}, b{rng.hermitian(s), rng.hermitian(s)};
    Mat id = Mat::Identity(2, 2);
    auto phi = [&](const Mat& x1, const Mat& x2) -> Mat { return v.adjoint() * oracle::kron(x1, x2) * v; };
    auto pad = [&](int i, const Mat& x) { return i == 0 ? std::pair{x, id} : std::pair{id, x}; };
    Element pc = partial_covariance(map, a, b);
    auto blocks = split_block_matrix(pc, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        auto [x1, x2] = pad(i, a[i].block(0).adjoint());
        auto [y1, y2] = pad(j, b[j].block(0));
        Mat expected = phi(x1 * y1, x2 * y2) - phi(x1, x2) * phi(y1, y2);
        CHECK((blocks[i][j].block(0) - expected).norm() < 1e-13);
      }
  }
}

TEST_CASE("partial variance-covariance matrix") {
  Shape s{2};
  SUBCASE("k = 1 matches vc_matrix bit for bit") {
    auto phi = gen::random_unital_cp(4, 2, 2);
    Rng rng(4);
    Element a = rng.hermitian(s), b = rng.hermitian(s);
    CHECK(pvc_matrix(phi, {a}, {b}) == vc_matrix(phi, {a}, {b}));
  }
  SUBCASE("CP multilinear maps") {
    double worst = 1, worst_var = 1;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      auto map = gen::random_cp_multilinear(seed, {s, s}, 2);
      Rng rng(seed);
      Args a{rng.hermitian(s), rng.hermitian(s)}, b{rng.hermitian(s), rng.hermitian(s)};
      worst = std::min(worst, pvc_report(map, a, b).margin);
    }
    std::vector<MapDescriptor> pool;
    for (std::uint64_t seed = 0; seed < 25; ++seed)
      pool.push_back(gen::random_cp_multilinear(seed, {s, Shape{1, 2}}, 3));
    for (std::uint64_t t = 0; t < 500; ++t) {
      const auto& map = pool[t % 25];
      Rng rng(trial_seed(5, t));
      Args a{rng.hermitian(s), rng.hermitian(Shape{1, 2})};
      worst_var = std::min(worst_var, partial_variance_report(map, a).margin);
    }
    CHECK(worst >= -1e-9);
    CHECK(worst_var >= -1e-9);
  }
  SUBCASE("flags are required") {
    auto map = register_map(maps::transpose_tensor(2));
    Args a{Element::identity(s), Element::identity(s)};
    CHECK_THROWS_AS(pvc_report(map, a, a), PreconditionError);
  }
}

TEST_CASE("composite-system matrix") {
  Shape s{2};
  SUBCASE("C = A, D = B leaves a diagonal of variances") {
    auto map = gen::random_dm_multilinear(1, {s, s}, Shape{2});
    Rng rng(1);
    CompositeObservables o{0, 1, rng.hermitian(s), rng.hermitian(s), {}, {}};
    o.c = o.a;
    o.d = o.b;
    auto blocks = split_block_matrix(composite_matrix(map, o), 4);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c)
        if (r != c) CHECK(blocks[r][c].norm() <= 1e-14);
    CHECK(composite_report(map, o).holds());
  }
  SUBCASE("random maps with a commutative factorization") {
    double worst = 1, worst_prod = 1;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      auto map = gen::random_dm_multilinear(seed, {s, s}, Shape{2});
      Rng rng(seed);
      CompositeObservables o{0, 1, rng.hermitian(s), rng.hermitian(s), rng.hermitian(s), rng.hermitian(s)};
      worst = std::min(worst, composite_report(map, o).margin);
      auto scalar_map = gen::random_dm_multilinear(seed, {s, s}, Shape{1});
      worst_prod = std::min(worst_prod, composite_product_margin(scalar_map, o).margin);
    }
    CHECK(worst >= -1e-9);
    CHECK(worst_prod >= -1e-12);
  }
  SUBCASE("sign-pattern Schur product of the commutative factor") {
    Rng rng(3);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      std::vector<maps::StateSlot> slots;
      for (int l = 0; l < 2; ++l) slots.push_back({s, {rng.density(s), rng.density(s)}});
      auto psi = register_map(maps::state_bundle(slots));
      Args e{rng.hermitian(s), rng.hermitian(s)}, f{rng.hermitian(s), rng.hermitian(s)};
      Element big = pvc_matrix(psi, e, f);
      auto blocks = split_block_matrix(big, 4);
      const double h[4] = {1, -1, 1, -1};
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) blocks[r][c] = (h[r] * h[c]) * blocks[r][c];
      CHECK(is_positive(big).positive);
      CHECK(is_positive(block_matrix(blocks)).positive);
    }
  }
  SUBCASE("errors") {
    auto map = gen::random_dm_multilinear(1, {s, s}, Shape{2});
    CompositeObservables o{0, 0, Element::identity(s), Element::identity(s), Element::identity(s),
                           Element::identity(s)};
    CHECK_THROWS_AS(composite_matrix(map, o), InputError);
    o.j = 1;
    CHECK_THROWS_AS(composite_report(maps::tensor_map({s, s}), o), PreconditionError);
  }
}

TEST_CASE("tensor-product uncertainty bound") {
  Shape s4{4};
  double worst = 1, worst_c = 1;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    auto map = random_states(t, s4, 2);
    Rng rng(trial_seed(31, t));
    TensorObservables o{2, 2, rng.hermitian(Shape{2}), rng.hermitian(Shape{2}), rng.hermitian(Shape{2}),
                        rng.hermitian(Shape{2})};
    worst = std::min(worst, tensor_uncertainty_bound(map, o).margin);
    o.c = rng.psd(Shape{2});
    o.d = rng.psd(Shape{2});
    worst_c = std::min(worst_c, tensor_uncertainty_bound_contraction(map, o).margin);
  }
  CHECK(worst >= -1e-12);
  CHECK(worst_c >= -1e-12);

  auto map = random_states(0, s4, 1);
  Rng rng(2);
  TensorObservables o{2, 2, rng.hermitian(Shape{2}), 0.3 * Element::identity(Shape{2}), rng.hermitian(Shape{2}),
                      rng.hermitian(Shape{2})};
  o.alpha = cd(0.3);
  o.c = 0.3 * Element::identity(Shape{2});
  CHECK_THROWS_AS(tensor_uncertainty_bound(map, o), PreconditionError);

  SUBCASE("the disk center gives the tightest bound") {
    TensorObservables p{2, 2, rng.hermitian(Shape{2}), rng.hermitian(Shape{2}), rng.hermitian(Shape{2}),
                        rng.hermitian(Shape{2})};
    auto best = tensor_uncertainty_bound(map, p);
    for (double shift : {-0.2, 0.1, 0.5}) {
      TensorObservables q = p;
      q.alpha = smallest_disk(p.c).center + shift;
      CHECK(tensor_uncertainty_bound(map, q).details["norm_c"].get<double>() >=
            best.details["norm_c"].get<double>() - 1e-12);
    }
  }
}

TEST_CASE("skew information") {
  Rng rng(10);
  auto tr = register_map(maps::tracial_linear(Shape{3}, {Element::identity(Shape{1})}));
  SUBCASE("classical Wigner-Yanase-Dyson correlation") {
    for (double alpha : {0.25, 0.5, 0.75}) {
      auto rho = DensityOperator::trace_one(rng.density(Shape{3}));
      Element a = rng.hermitian(Shape{3}), b = rng.hermitian(Shape{3});
      Mat r = rho.element.block(0), am = a.block(0), bm = b.block(0);
      cd expected = (r * am * bm).trace() -
                           (oracle::mat_power(r, 1 - alpha) * am * oracle::mat_power(r, alpha) * bm).trace();
      cd got = scalar_of(skew_correlation(tr, rho, SpectralFunctionPair::wyd(alpha), a, b));
      CHECK(std::abs(got - expected) < 1e-12);
    }
  }
  SUBCASE("Corr(I, B) = 0") {
    auto rho = DensityOperator::trace_one(rng.density(Shape{3}));
    Element b = rng.hermitian(Shape{3});
    CHECK(skew_correlation(tr, rho, SpectralFunctionPair::wyd(0.5), Element::identity(Shape{3}), b).norm() < 1e-14);
  }
  SUBCASE("the skew matrix is PSD for tracial maps with a commutative factorization") {
    double worst = 1;
    for (std::uint64_t t = 0; t < 500; ++t) {
      int d = 2 + static_cast<int>(t % 2);
      auto map = gen::random_dm_map(t, Shape{d}, Shape{2}, {.tracial = true});
      Rng r(trial_seed(17, t));
      auto rho = DensityOperator::trace_one(r.density(Shape{d}, t % 5 != 0));
      double alpha = 0.25 * static_cast<double>(1 + t % 3);
      auto rep = skew_report(map, rho, SpectralFunctionPair::wyd(alpha), r.hermitian(Shape{d}), r.hermitian(Shape{d}));
      worst = std::min(worst, rep.margin);
    }
    CHECK(worst >= -1e-9);
  }
  SUBCASE("monotonicity and flag checks") {
    auto rho = DensityOperator::trace_one(rng.density(Shape{3}));
    SpectralFunctionPair bad{"opposite", [](double t) { return t; }, [](double t) { return -t; }};
    CHECK_THROWS_AS(skew_matrix(tr, rho, bad, Element::identity(Shape{3}), Element::identity(Shape{3})),
                    PreconditionError);
    bad.same_monotonic_check = false;
    CHECK_NOTHROW(skew_matrix(tr, rho, bad, Element::identity(Shape{3}), Element::identity(Shape{3})));
    auto plain = gen::random_unital_cp(1, 3, 2);
    CHECK_THROWS_AS(skew_report(plain, rho, SpectralFunctionPair::wyd(0.5), Element::identity(Shape{3}),
                                Element::identity(Shape{3})),
                    PreconditionError);
  }
}

TEST_CASE("variance upper bound") {
  SUBCASE("X = I") {
    auto phi = gen::random_unital_cp(1, 2, 2);
    auto rep = variance_upper_bound(phi, Element::identity(Shape{2}));
    CHECK(rep.details["bound"].get<double>() <= 1e-24);
    CHECK(std::abs(rep.margin) <= 1e-14);
  }
  SUBCASE("spectrum {0, 1}: Var <= 1/4 with equality at the balanced state") {
    Rng rng(5);
    Mat u = rng.unitary(2);
    Mat dx = Mat::Zero(2, 2);
    dx(1, 1) = 1;
    Element x(Mat(u * dx * u.adjoint()));
    double best = 0;
    for (int i = 0; i <= 1000; ++i) {
      double p = i / 1000.0;
      Mat dr = Mat::Zero(2, 2);
      dr(0, 0) = p, dr(1, 1) = 1 - p;
      auto phi = state(Element(Mat(u * dr * u.adjoint())));
      auto rep = variance_upper_bound(phi, x);
      CHECK(rep.details["bound"].get<double>() == doctest::Approx(0.25).epsilon(1e-12));
      best = std::max(best, scalar_of(variance(phi, x)).real());
      if (i == 500) CHECK(std::abs(rep.margin) <= 1e-14);
    }
    CHECK(best == doctest::Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("random unital CP maps") {
    double worst = 1;
    for (std::uint64_t t = 0; t < 1000; ++t) {
      int d = 2 + static_cast<int>(t % 2);
      auto phi = gen::random_unital_cp(t, d, 1 + static_cast<int>(t % 3));
      Rng rng(trial_seed(41, t));
      worst = std::min(worst, variance_upper_bound(phi, rng.hermitian(Shape{d})).margin);
    }
    CHECK(worst >= -1e-10);
  }
  SUBCASE("slot form for unital multilinear maps") {
    Rng rng(6);
    Shape s{2};
    for (std::uint64_t t = 0; t < 50; ++t) {
      auto map = register_map(maps::cp_multilinear({s, s}, rng.isometry(4, 4)));
      CHECK(variance_upper_bound(map, static_cast<int>(t % 2), rng.hermitian(s)).margin >= -1e-10);
    }
  }
  SUBCASE("non-normal X is rejected") {
    auto phi = gen::random_unital_cp(1, 2, 2);
    Mat n = Mat::Zero(2, 2);
    n(0, 1) = 1;
    CHECK_THROWS_AS(variance_upper_bound(phi, Element(n)), PreconditionError);
  }
}

TEST_CASE("variance of a composite dominates the composed variance") {
  Rng rng(12);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    int d = 2 + static_cast<int>(seed % 2);
    auto phi1 = random_states(seed, Shape{d}, 2);
    Element q1 = 0.5 * Element::identity(Shape{2}), q2 = q1;
    auto part = gen::unit_partition(seed, 3, Shape{2});
    auto phi2 = maps::monomial(2, Shape{2}, {{{1, 0}, part[0]}, {{1, 1}, part[1]}, {{0, 2}, part[2]}});
    auto composed = maps::compose(phi2, phi1);
    Element x = rng.hermitian(Shape{d});
    Element gap = variance(composed, x) - phi2(variance(phi1, x));
    CHECK(is_positive(gap).positive);
  }
}

TEST_CASE("density operators") {
  Rng rng(13);
  Shape s{2, 1};
  Element p = rng.density(s);
  CHECK_NOTHROW(DensityOperator::trace_one(p));
  CHECK_THROWS_AS(DensityOperator::trace_one(2.0 * p), InputError);
  CHECK_THROWS_AS(DensityOperator::trace_one(-1.0 * p), InputError);
  auto phi = gen::random_tracial_linear(1, Shape{2}, Shape{2}, false);
  Element unit = phi(Element::identity(Shape{2}));
  CHECK_THROWS_AS(DensityOperator::map_unital(Element::identity(Shape{2}), phi), InputError);
  auto tr = maps::tracial_linear(Shape{2}, {Element::identity(Shape{1})});
  auto rho = DensityOperator::map_unital(0.5 * Element::identity(Shape{2}), tr);
  auto psi = density_compression(tr, rho);
  CHECK(psi.flags().unital);
  CHECK(std::abs(scalar_of(psi(Element::identity(Shape{2}))) - 1.0) < 1e-14);
  CHECK_THROWS_AS(Observable(rng.gaussian(Shape{2})), InputError);
  CHECK_NOTHROW(Observable(rng.hermitian(Shape{2})));
}
