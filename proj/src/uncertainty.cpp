#include "opmap/uncertainty.hpp"

#include <algorithm>
#include <cmath>

namespace opmap {

namespace {

Args tuple_mul(const Args& a, const Args& b) {
  if (a.size() != b.size()) throw ShapeMismatch("tuple arity mismatch");
  Args out;
  for (std::size_t l = 0; l < a.size(); ++l) out.push_back(a[l] * b[l]);
  return out;
}

Args tuple_adj(const Args& a) {
  Args out;
  for (const auto& x : a) out.push_back(x.adjoint());
  return out;
}

Args tuple_scale(cd s, const Args& a) {
  Args out;
  for (const auto& x : a) out.push_back(s * x);
  return out;
}

Args tuple_sub(const Args& a, const Args& b) {
  Args out;
  for (std::size_t l = 0; l < a.size(); ++l) out.push_back(a[l] - b[l]);
  return out;
}

Args tuple_add(const Args& a, const Args& b) {
  Args out;
  for (std::size_t l = 0; l < a.size(); ++l) out.push_back(a[l] + b[l]);
  return out;
}

void check_arity(const MapDescriptor& map, const Args& a) {
  if (static_cast<int>(a.size()) != map.arity())
    throw ShapeMismatch("expected a " + std::to_string(map.arity()) + "-tuple, got " +
                        std::to_string(a.size()));
  for (int l = 0; l < map.arity(); ++l)
    if (!(a[l].shape() == map.domain(l)))
      throw ShapeMismatch("slot " + std::to_string(l) + " expects " + map.domain(l).str());
}

json tuple_json(const Args& a) {
  json j = json::array();
  for (const auto& x : a) j.push_back(element_to_json(x));
  return j;
}

void require_commutative(const MapDescriptor& map, const char* what) {
  if (!map.codomain().is_commutative())
    throw PreconditionError(std::string(what) + " needs a commutative codomain, got " +
                            map.codomain().str());
}

InequalityReport matrix_report(std::string quantity, const Element& m, const Tolerance& tol, json witness) {
  PsdResult r = is_positive(m, tol);
  InequalityReport rep;
  rep.quantity = std::move(quantity);
  rep.margin = r.min_eig;
  rep.verdict = r.positive ? InequalityVerdict::holds : InequalityVerdict::violated;
  rep.witness = std::move(witness);
  rep.details["herm_deviation"] = r.herm_deviation;
  return rep;
}

// min over coordinates of Re(lhs - rhs), both on a commutative shape.
InequalityReport coordinate_report(std::string quantity, const Element& lhs, const Element& rhs,
                                   const Tolerance& tol, json witness) {
  double margin = std::numeric_limits<double>::infinity(), scale = 0.0;
  for (std::size_t b = 0; b < lhs.shape().block_count(); ++b) {
    cd l = lhs.block(b)(0, 0), r = rhs.block(b)(0, 0);
    margin = std::min(margin, (l - r).real());
    scale = std::max({scale, std::abs(l), std::abs(r)});
  }
  InequalityReport rep;
  rep.quantity = std::move(quantity);
  rep.margin = margin;
  rep.verdict = margin >= -tol.psd * (1.0 + scale) ? InequalityVerdict::holds : InequalityVerdict::violated;
  rep.witness = std::move(witness);
  return rep;
}

InequalityReport scalar_report(std::string quantity, double lhs, double rhs, const Tolerance& tol,
                               json witness) {
  InequalityReport rep;
  rep.quantity = std::move(quantity);
  rep.margin = lhs - rhs;
  double scale = std::max(std::abs(lhs), std::abs(rhs));
  rep.verdict = rep.margin >= -tol.psd * (1.0 + scale) ? InequalityVerdict::holds
                                                       : InequalityVerdict::violated;
  rep.witness = std::move(witness);
  return rep;
}

// Entrywise squared modulus.
Element abs_sq(const Element& x) {
  std::vector<Mat> blocks;
  for (const auto& m : x.blocks()) blocks.push_back(m.cwiseAbs2().cast<cd>());
  return Element(x.shape(), blocks);
}

void require_hermitian(const Element& x, const char* name, const Tolerance& tol = {}) {
  double dev = (x - x.adjoint()).norm();
  if (dev > tol.herm * (1.0 + x.norm()))
    throw InputError(std::string(name) + " must be self-adjoint (deviation " + std::to_string(dev) + ")");
}

bool multilinear_slots(const MapDescriptor& map) {
  return map.arity() > 1 && map.linearity().kind == LinearityKind::multilinear;
}

// Off-diagonal commutator entry for the composite matrix.
Element half_commutator_term(const MapDescriptor& map, int slot, const Element& x, const Element& y) {
  if (multilinear_slots(map))
    return 0.5 * (map(unit_padded(map, slot, x * y)) - map(unit_padded(map, slot, y * x)));
  Args z = zero_tuple(map);
  z[slot] = 0.5 * commutator(x, y);
  return map(z);
}

Element sqrt_psd(const Element& p) {
  return spectral_apply(p, [](double t) { return std::sqrt(t); }, true);
}

}  // namespace

Observable::Observable(Element x, const Tolerance& tol) : element(std::move(x)) {
  require_hermitian(element, "observable", tol);
}

DensityOperator DensityOperator::trace_one(Element p, const Tolerance& tol) {
  if (!is_positive(p, tol).positive) throw InputError("density operator must be positive");
  cd tr = 0.0;
  for (const auto& b : p.blocks()) tr += b.trace();
  if (std::abs(tr - 1.0) > 1e-10) throw InputError("density operator must have trace 1");
  return {std::move(p), DensityNormalization::trace_one};
}

DensityOperator DensityOperator::map_unital(Element p, const MapDescriptor& map, const Tolerance& tol) {
  if (!is_positive(p, tol).positive) throw InputError("density operator must be positive");
  if (map.arity() != 1) throw InputError("map_unital normalization needs a single-slot map");
  Element img = map(p);
  if ((img - Element::identity(img.shape())).norm() > 1e-10)
    throw InputError("density operator must satisfy Phi(P) = I");
  return {std::move(p), DensityNormalization::map_unital};
}

MapDescriptor density_compression(const MapDescriptor& map, const DensityOperator& p) {
  if (map.arity() != 1) throw InputError("density_compression needs a single-slot map");
  Element root = sqrt_psd(p.element);
  ClaimedFlags f = map.flags();
  f.unital = p.normalization == DensityNormalization::map_unital && map.linearity().is_multilinear();
  f.tracial = false;
  return MapDescriptor(map.name() + "_compressed", map.domain_shapes(), map.codomain(), map.linearity(),
                       [map, root](std::span<const Element> a) { return map(root * a[0] * root); }, f);
}

SpectralFunctionPair SpectralFunctionPair::wyd(double alpha) {
  if (alpha < 0 || alpha > 1) throw InputError("alpha must lie in [0, 1]");
  SpectralFunctionPair p;
  p.name = "wyd(" + std::to_string(alpha) + ")";
  p.f = [alpha](double t) { return std::pow(t, 1.0 - alpha); };
  p.g = [alpha](double t) { return std::pow(t, alpha); };
  return p;
}

bool SpectralFunctionPair::same_monotonic_on(const Element& rho, double tol) const {
  auto ev = hermitian_eigenvalues(rho);
  for (double& x : ev) x = std::max(x, 0.0);
  for (std::size_t i = 0; i < ev.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if ((f(ev[i]) - f(ev[j])) * (g(ev[i]) - g(ev[j])) < -tol) return false;
  return true;
}

std::string inequality_verdict_name(InequalityVerdict v) {
  switch (v) {
    case InequalityVerdict::holds: return "holds";
    case InequalityVerdict::violated: return "violated";
    case InequalityVerdict::not_applicable: return "not_applicable";
  }
  return "unknown";
}

json inequality_to_json(const InequalityReport& r) {
  return {{"quantity", r.quantity},
          {"margin", r.margin},
          {"verdict", inequality_verdict_name(r.verdict)},
          {"witness", r.witness},
          {"seed", r.seed},
          {"details", r.details}};
}

Element covariance(const MapDescriptor& map, const Args& a, const Args& b) {
  check_arity(map, a);
  check_arity(map, b);
  Args as = tuple_adj(a);
  return map(tuple_mul(as, b)) - map(as) * map(b);
}

Element covariance(const MapDescriptor& map, const Element& a, const Element& b) {
  return covariance(map, Args{a}, Args{b});
}

Element variance(const MapDescriptor& map, const Args& a) { return covariance(map, a, a); }
Element variance(const MapDescriptor& map, const Element& a) { return variance(map, Args{a}); }

Element vc_matrix(const MapDescriptor& map, const Args& a, const Args& b) {
  return block_matrix({{variance(map, a), covariance(map, a, b)},
                       {covariance(map, b, a), variance(map, b)}});
}

InequalityReport vc_report(const MapDescriptor& map, const Args& a, const Args& b, const Tolerance& tol) {
  if (!map.flags().unital || !map.flags().at_least_n_positive(3))
    throw PreconditionError("variance-covariance matrix needs a unital 3-positive map");
  return matrix_report("vc_matrix", vc_matrix(map, a, b), tol, {{"a", tuple_json(a)}, {"b", tuple_json(b)}});
}

InequalityReport schrodinger_margin(const MapDescriptor& map, const Element& a, const Element& b,
                                    const Tolerance& tol) {
  if (map.arity() != 1 || map.linearity().kind != LinearityKind::linear)
    throw PreconditionError("Schrodinger relation needs a linear single-slot map");
  require_commutative(map, "Schrodinger relation");
  Element cov = covariance(map, a, b);
  Element re = 0.5 * (cov + cov.conjugate());
  Element comm = map(commutator(a, b));
  Element lhs = variance(map, a) * variance(map, b);
  Element rhs = abs_sq(re) + 0.25 * abs_sq(comm);
  return coordinate_report("schrodinger", lhs, rhs, tol,
                           {{"a", element_to_json(a)}, {"b", element_to_json(b)}});
}

std::vector<InequalityReport> heisenberg_suite(const MapDescriptor& map, const Args& a, const Args& b,
                                               const Tolerance& tol) {
  const ClaimedFlags& f = map.flags();
  if (f.dm_order < 3) throw PreconditionError("Heisenberg suite needs a map with a commutative factorization of order >= 3");
  if (!f.vanishes_at_zero) throw PreconditionError("Heisenberg suite needs Phi(0) = 0");
  check_arity(map, a);
  check_arity(map, b);
  json w = {{"a", tuple_json(a)}, {"b", tuple_json(b)}};
  std::vector<InequalityReport> out;

  Element va = variance(map, a), vb = variance(map, b);
  out.push_back(matrix_report("heisenberg_i", vc_matrix(map, a, b), tol, w));

  Args half_ab = tuple_scale(0.5, tuple_sub(tuple_mul(a, b), tuple_mul(b, a)));
  Args half_ba = tuple_scale(-1.0, half_ab);
  Element t = map(half_ab), t_ba = map(half_ba);
  out.push_back(matrix_report("heisenberg_ii", block_matrix({{va, t}, {t_ba, vb}}), tol, w));

  // Norm forms: ||Var A|| Var B >= T*T and ||Var B|| Var A >= TT*.
  Element tst = t.adjoint() * t, tts = t * t.adjoint();
  Element m1 = va.norm() * vb - tst, m2 = vb.norm() * va - tts;
  auto r1 = matrix_report("heisenberg_iii", m1, tol, w);
  auto r2 = matrix_report("heisenberg_iii", m2, tol, w);
  InequalityReport iii = r1.margin <= r2.margin ? r1 : r2;
  iii.verdict = r1.holds() && r2.holds() ? InequalityVerdict::holds : InequalityVerdict::violated;
  iii.details["margin_norm_a"] = r1.margin;
  iii.details["margin_norm_b"] = r2.margin;
  iii.details["alt_margin_norm_a"] = min_eigenvalue(va.norm() * vb - tts);
  iii.details["alt_margin_norm_b"] = min_eigenvalue(vb.norm() * va - tst);
  out.push_back(iii);

  if (map.codomain().is_commutative())
    out.push_back(coordinate_report("heisenberg_ki2", va * vb, abs_sq(t), tol, w));

  if (f.dm_order >= 4) {
    Args half_anti = tuple_scale(0.5, tuple_add(tuple_mul(a, b), tuple_mul(b, a)));
    Element s = map(half_anti);
    Element fa = map(a), fb = map(b);
    out.push_back(matrix_report("heisenberg_iv", block_matrix({{va, s - fa * fb}, {s - fb * fa, vb}}), tol, w));
  } else {
    InequalityReport na;
    na.quantity = "heisenberg_iv";
    na.verdict = InequalityVerdict::not_applicable;
    na.witness = w;
    na.details["reason"] = "needs order >= 4";
    out.push_back(na);
  }
  return out;
}

Args unit_padded(const MapDescriptor& map, int slot, const Element& x) {
  if (slot < 0 || slot >= map.arity()) throw InputError("slot index " + std::to_string(slot) + " out of range");
  if (!(x.shape() == map.domain(slot))) throw ShapeMismatch("slot " + std::to_string(slot) + " expects " + map.domain(slot).str());
  Args a = identity_tuple(map);
  a[slot] = x;
  return a;
}

MapDescriptor slot_compress(const MapDescriptor& map, int i) {
  if (i < 0 || i >= map.arity()) throw InputError("slot index " + std::to_string(i) + " out of range");
  Linearity lin = map.linearity().is_multilinear() ? Linearity::linear() : map.linearity();
  ClaimedFlags f = map.flags();
  f.dm_order = 0;
  return MapDescriptor(map.name() + "_(" + std::to_string(i) + ")", {map.domain(i)}, map.codomain(), lin,
                       [map, i](std::span<const Element> a) { return map(unit_padded(map, i, a[0])); }, f);
}

MapDescriptor slot_pair(const MapDescriptor& map, int i, int j) {
  if (i < 0 || i >= map.arity() || j < 0 || j >= map.arity())
    throw InputError("slot index out of range");
  if (i == j) throw InputError("slot_pair needs distinct slots");
  Linearity lin = map.linearity().is_multilinear() ? Linearity::multilinear() : map.linearity();
  ClaimedFlags f = map.flags();
  f.dm_order = 0;
  return MapDescriptor(
      map.name() + "_(" + std::to_string(i) + "," + std::to_string(j) + ")", {map.domain(i), map.domain(j)},
      map.codomain(), lin,
      [map, i, j](std::span<const Element> a) {
        return map(tuple_mul(unit_padded(map, i, a[0]), unit_padded(map, j, a[1])));
      },
      f);
}

Element partial_covariance(const MapDescriptor& map, const Args& a, const Args& b) {
  check_arity(map, a);
  check_arity(map, b);
  const int k = map.arity();
  std::vector<Element> left, right;
  for (int i = 0; i < k; ++i) {
    left.push_back(map(unit_padded(map, i, a[i].adjoint())));
    right.push_back(map(unit_padded(map, i, b[i])));
  }
  std::vector<std::vector<Element>> e(k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      Element joint = map(tuple_mul(unit_padded(map, i, a[i].adjoint()), unit_padded(map, j, b[j])));
      e[i].push_back(joint - left[i] * right[j]);
    }
  return block_matrix(e);
}

Element partial_variance(const MapDescriptor& map, const Args& a) { return partial_covariance(map, a, a); }

Element pvc_matrix(const MapDescriptor& map, const Args& a, const Args& b) {
  const int k = map.arity();
  if (k == 1) return vc_matrix(map, a, b);
  auto q = [k](const Element& m) { return split_block_matrix(m, k); };
  auto aa = q(partial_variance(map, a)), ab = q(partial_covariance(map, a, b)),
       ba = q(partial_covariance(map, b, a)), bb = q(partial_variance(map, b));
  std::vector<std::vector<Element>> e(2 * k);
  for (int r = 0; r < 2 * k; ++r)
    for (int c = 0; c < 2 * k; ++c) {
      const auto& src = r < k ? (c < k ? aa : ab) : (c < k ? ba : bb);
      e[r].push_back(src[r % k][c % k]);
    }
  return block_matrix(e);
}

InequalityReport pvc_report(const MapDescriptor& map, const Args& a, const Args& b, const Tolerance& tol) {
  int need = 2 * map.arity() + 1;
  if (!map.flags().at_least_n_positive(need))
    throw PreconditionError("partial variance-covariance matrix needs a " + std::to_string(need) + "-positive map");
  return matrix_report("pvc_matrix", pvc_matrix(map, a, b), tol, {{"a", tuple_json(a)}, {"b", tuple_json(b)}});
}

InequalityReport partial_variance_report(const MapDescriptor& map, const Args& a, const Tolerance& tol) {
  int need = map.arity() + 1;
  if (!map.flags().at_least_n_positive(need))
    throw PreconditionError("partial variance needs a " + std::to_string(need) + "-positive map");
  return matrix_report("partial_variance", partial_variance(map, a), tol, {{"a", tuple_json(a)}});
}

namespace {

struct CompositeParts {
  Element va, vb, vc, vd, ac, bd;  // ac, bd: the (1/2)-commutator entries
};

CompositeParts composite_parts(const MapDescriptor& map, const CompositeObservables& o) {
  if (o.i == o.j) throw InputError("composite observables need distinct slots");
  Args pa = unit_padded(map, o.i, o.a), pb = unit_padded(map, o.j, o.b), pc = unit_padded(map, o.i, o.c),
       pd = unit_padded(map, o.j, o.d);
  return {variance(map, pa), variance(map, pb), variance(map, pc), variance(map, pd),
          half_commutator_term(map, o.i, o.a, o.c), half_commutator_term(map, o.j, o.b, o.d)};
}

json composite_json(const CompositeObservables& o) {
  return {{"i", o.i}, {"j", o.j}, {"a", element_to_json(o.a)}, {"b", element_to_json(o.b)},
          {"c", element_to_json(o.c)}, {"d", element_to_json(o.d)}};
}

}  // namespace

Element composite_matrix(const MapDescriptor& map, const CompositeObservables& obs) {
  auto p = composite_parts(map, obs);
  Element z = Element::zero(map.codomain());
  // [C, A] = -[A, C]
  Element ca = multilinear_slots(map) ? -1.0 * p.ac : half_commutator_term(map, obs.i, obs.c, obs.a);
  Element db = multilinear_slots(map) ? -1.0 * p.bd : half_commutator_term(map, obs.j, obs.d, obs.b);
  return block_matrix({{p.va, z, p.ac, z}, {z, p.vb, z, p.bd}, {ca, z, p.vc, z}, {z, db, z, p.vd}});
}

InequalityReport composite_report(const MapDescriptor& map, const CompositeObservables& obs,
                                  const Tolerance& tol) {
  if (map.flags().dm_order < kUnbounded)
    throw PreconditionError("composite matrix needs a completely positive commutative factorization");
  return matrix_report("composite_matrix", composite_matrix(map, obs), tol, composite_json(obs));
}

InequalityReport composite_product_margin(const MapDescriptor& map, const CompositeObservables& obs,
                                          const Tolerance& tol) {
  auto p = composite_parts(map, obs);
  // |Phi([A,C])|^2 |Phi([B,D])|^2 / 16 = |2 ac|^2 |2 bd|^2 / 16 = |ac|^2 |bd|^2
  if (map.codomain().is_commutative()) {
    Element lhs = p.va * p.vb * p.vc * p.vd;
    Element rhs = abs_sq(p.ac) * abs_sq(p.bd);
    return coordinate_report("composite_product", lhs, rhs, tol, composite_json(obs));
  }
  double lhs = p.va.norm() * p.vb.norm() * p.vc.norm() * p.vd.norm();
  double rhs = std::pow(p.ac.norm() * p.bd.norm(), 2);
  return scalar_report("composite_product_norm", lhs, rhs, tol, composite_json(obs));
}

namespace {

struct TensorParts {
  Element lhs, num;
  json witness;
};

TensorParts tensor_parts(const MapDescriptor& map, const TensorObservables& o, const Tolerance& tol) {
  if (map.arity() != 1 || map.linearity().kind != LinearityKind::linear)
    throw PreconditionError("tensor bound needs a linear map on the composite system");
  require_commutative(map, "tensor bound");
  if (map.domain(0) != Shape{o.dim_a * o.dim_b})
    throw ShapeMismatch("tensor bound: map domain must be M_" + std::to_string(o.dim_a * o.dim_b));
  for (auto [x, d, name] : {std::tuple{&o.a, o.dim_a, "A"}, std::tuple{&o.c, o.dim_a, "C"},
                            std::tuple{&o.b, o.dim_b, "B"}, std::tuple{&o.d, o.dim_b, "D"}}) {
    if (x->shape() != Shape{d}) throw ShapeMismatch(std::string(name) + " has the wrong shape");
    require_hermitian(*x, name, tol);
  }
  Element unit = map(Element::identity(map.domain(0)));
  if ((unit - Element::identity(unit.shape())).norm() > 1e-10)
    throw PreconditionError("tensor bound needs a unital map");
  Element ia = Element::identity(Shape{o.dim_a}), ib = Element::identity(Shape{o.dim_b});
  Element lhs = variance(map, tensor(o.a, ib)) * variance(map, tensor(ia, o.b));
  Element num = abs_sq(map(tensor(commutator(o.a, o.c), ib)) * map(tensor(ia, commutator(o.b, o.d))));
  json w = {{"a", element_to_json(o.a)}, {"b", element_to_json(o.b)},
            {"c", element_to_json(o.c)}, {"d", element_to_json(o.d)}};
  return {lhs, num, w};
}

}  // namespace

InequalityReport tensor_uncertainty_bound(const MapDescriptor& map, const TensorObservables& obs,
                                          const Tolerance& tol) {
  auto parts = tensor_parts(map, obs, tol);
  cd alpha = obs.alpha ? *obs.alpha : smallest_disk(obs.c, tol).center;
  cd beta = obs.beta ? *obs.beta : smallest_disk(obs.d, tol).center;
  double nc = (obs.c - Element::scalar(obs.c.shape(), alpha)).norm();
  double nd = (obs.d - Element::scalar(obs.d.shape(), beta)).norm();
  if (nc <= tol.eq || nd <= tol.eq)
    throw PreconditionError("tensor bound: ||C - alpha I|| and ||D - beta I|| must be nonzero");
  double denom = 16.0 * nc * nc * nd * nd;
  auto rep = coordinate_report("tensor_bound", parts.lhs, (1.0 / denom) * parts.num, tol, parts.witness);
  rep.details["alpha"] = {alpha.real(), alpha.imag()};
  rep.details["beta"] = {beta.real(), beta.imag()};
  rep.details["norm_c"] = nc;
  rep.details["norm_d"] = nd;
  return rep;
}

InequalityReport tensor_uncertainty_bound_contraction(const MapDescriptor& map, const TensorObservables& obs,
                                                      const Tolerance& tol) {
  auto parts = tensor_parts(map, obs, tol);
  for (const Element* x : {&obs.c, &obs.d})
    if (!is_positive(*x, tol).positive || x->norm() > 1.0 + tol.psd)
      throw PreconditionError("contraction bound needs C and D to be positive contractions");
  return coordinate_report("tensor_bound_contraction", parts.lhs, parts.num, tol, parts.witness);
}

namespace {

std::pair<Element, Element> spectral_pair(const DensityOperator& rho, const SpectralFunctionPair& pair) {
  if (pair.same_monotonic_check && !pair.same_monotonic_on(rho.element))
    throw PreconditionError("f and g are not of the same monotonicity on spec(rho)");
  return {spectral_apply(rho.element, pair.f, true), spectral_apply(rho.element, pair.g, true)};
}

void check_single(const MapDescriptor& map, const DensityOperator& rho) {
  if (map.arity() != 1) throw InputError("skew information needs a single-slot map");
  if (!(rho.element.shape() == map.domain(0))) throw ShapeMismatch("density operator shape mismatch");
}

}  // namespace

Element skew_correlation(const MapDescriptor& map, const DensityOperator& rho, const SpectralFunctionPair& pair,
                         const Element& a, const Element& b) {
  check_single(map, rho);
  auto [f, g] = spectral_pair(rho, pair);
  return map(f * g * a * b) - map(f * a * g * b);
}

Element skew_information(const MapDescriptor& map, const DensityOperator& rho, const SpectralFunctionPair& pair,
                         const Element& a) {
  return skew_correlation(map, rho, pair, a, a);
}

Element skew_matrix(const MapDescriptor& map, const DensityOperator& rho, const SpectralFunctionPair& pair,
                    const Element& a, const Element& b) {
  check_single(map, rho);
  auto [f, g] = spectral_pair(rho, pair);
  Element ia = map(f * g * a * a) - map(f * a * g * a);
  Element ib = map(f * g * b * b) - map(f * b * g * b);
  Element star = map(0.5 * (f * g * anticommutator(a, b))) - map(0.5 * (f * a * g * b + f * b * g * a));
  return block_matrix({{ia, star}, {star, ib}});
}

InequalityReport skew_report(const MapDescriptor& map, const DensityOperator& rho, const SpectralFunctionPair& pair,
                             const Element& a, const Element& b, const Tolerance& tol) {
  const ClaimedFlags& f = map.flags();
  if (!f.tracial || f.dm_order < 4 || !f.vanishes_at_zero)
    throw PreconditionError("skew matrix needs a tracial map with Phi(0) = 0 and a commutative factorization of order >= 4");
  auto rep = matrix_report("skew_matrix", skew_matrix(map, rho, pair, a, b), tol,
                           {{"rho", element_to_json(rho.element)}, {"a", element_to_json(a)}, {"b", element_to_json(b)}});
  rep.details["pair"] = pair.name;
  return rep;
}

namespace {

InequalityReport variance_bound_impl(const MapDescriptor& map, const Args& padded, const Element& x,
                                     const Tolerance& tol) {
  if (!map.flags().unital || !map.flags().positive)
    throw PreconditionError("variance bound needs a unital positive map");
  if (!map.linearity().is_multilinear()) throw PreconditionError("variance bound needs a linear or multilinear map");
  double r = smallest_disk_radius(x, tol);
  Element var = variance(map, padded);
  Element gap = r * r * Element::identity(var.shape()) - var;
  auto rep = matrix_report("variance_upper_bound", gap, tol, {{"x", element_to_json(x)}});
  rep.details["bound"] = r * r;
  rep.details["variance_norm"] = var.norm();
  return rep;
}

}  // namespace

InequalityReport variance_upper_bound(const MapDescriptor& map, const Element& x, const Tolerance& tol) {
  if (map.arity() != 1) throw InputError("use the slot form for multimaps");
  return variance_bound_impl(map, Args{x}, x, tol);
}

InequalityReport variance_upper_bound(const MapDescriptor& map, int slot, const Element& x, const Tolerance& tol) {
  return variance_bound_impl(map, unit_padded(map, slot, x), x, tol);
}

}  // namespace opmap
