#include "opmap/decomposition.hpp"

#include <cmath>
#include <numbers>

#include "opmap/maps.hpp"
#include "opmap/parallel.hpp"
#include "opmap/random.hpp"

namespace opmap {

namespace {

// Block-unit projection: identity on block b, zero elsewhere.
Element block_unit(const Shape& s, std::size_t b) {
  std::vector<cd> c(s.block_count(), 0.0);
  c[b] = 1.0;
  return Element::center_lift(s, c);
}

Args random_args(const MapDescriptor& map, Rng& rng) {
  Args a;
  for (const auto& s : map.domain_shapes()) a.push_back(rng.gaussian(s));
  return a;
}

void certify(TracialDecomposition& d, const MapDescriptor& map, const DecompositionOptions& opts) {
  std::vector<double> res(std::max(opts.samples, 0L)), scale(res.size());
  std::vector<Args> inputs(res.size());
  parallel_for(res.size(), opts.threads, [&](std::size_t t) {
    Rng rng(trial_seed(opts.seed, t));
    inputs[t] = random_args(map, rng);
    Element direct = map(inputs[t]);
    res[t] = (direct - d.composed(inputs[t])).norm();
    scale[t] = std::max(1.0, direct.norm());
  });
  d.samples = static_cast<long>(res.size());
  d.seed = opts.seed;
  d.residual = 0.0;
  std::size_t worst = 0;
  double worst_ratio = -1;
  for (std::size_t t = 0; t < res.size(); ++t) {
    d.residual = std::max(d.residual, res[t]);
    if (res[t] / scale[t] > worst_ratio) worst_ratio = res[t] / scale[t], worst = t;
  }
  d.certified = res.empty() || worst_ratio <= opts.tol;
  if (!d.certified) d.witness = inputs[worst];
}

}  // namespace

json decomposition_to_json(const TracialDecomposition& d) {
  json j;
  j["phi1"] = d.phi1.spec();
  j["phi2"] = d.phi2.spec();
  j["residual"] = d.residual;
  j["certified"] = d.certified;
  j["condition_number"] = d.condition_number;
  j["extraction_error"] = d.extraction_error;
  j["samples"] = d.samples;
  j["seed"] = d.seed;
  if (d.witness) {
    json w = json::array();
    for (const auto& e : *d.witness) w.push_back(element_to_json(e));
    j["witness"] = w;
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

TracialDecomposition decompose_tracial(const MapDescriptor& map, const DecompositionOptions& opts) {
  if (!map.flags().tracial) throw PreconditionError("decompose_tracial: map is not flagged tracial");
  if (!map.linearity().is_multilinear())
    throw InputError("decompose_tracial: map must be linear or multilinear; use the nonlinear variant");
  const auto& shapes = map.domain_shapes();
  MapDescriptor phi1 = maps::center_trace(shapes);

  std::vector<int> dims;
  for (const auto& s : shapes) dims.push_back(static_cast<int>(s.block_count()));
  std::vector<Element> coeffs;
  std::vector<int> idx(shapes.size(), 0);
  Args tuple(shapes.size());
  while (true) {
    for (std::size_t l = 0; l < shapes.size(); ++l) tuple[l] = block_unit(shapes[l], idx[l]);
    coeffs.push_back(map(tuple));
    int pos = static_cast<int>(idx.size()) - 1;
    while (pos >= 0 && ++idx[pos] == dims[pos]) idx[pos--] = 0;
    if (pos < 0) break;
  }
  MapDescriptor phi2 = maps::center_multilinear(dims, coeffs);
  TracialDecomposition d(phi1, phi2);
  certify(d, map, opts);
  return d;
}

CanonicalForm tracial_linear_canonical_form(const MapDescriptor& map, const DecompositionOptions& opts) {
  if (map.arity() != 1 || map.domain(0).block_count() != 1 || !map.linearity().is_multilinear())
    throw InputError("canonical form needs a linear map on a single matrix block");
  int d = map.domain(0).dim(0);
  Element unit_image = map(Element::identity(map.domain(0)));
  CanonicalForm cf{(1.0 / d) * unit_image, 0.0};
  double scale = 1.0;
  for (long t = 0; t < opts.samples; ++t) {
    Rng rng(trial_seed(opts.seed, t));
    Element a = rng.gaussian(map.domain(0));
    Element fa = map(a);
    cf.residual = std::max(cf.residual, (fa - a.block(0).trace() * cf.p).norm());
    scale = std::max(scale, fa.norm());
  }
  if (cf.residual > opts.tol * scale)
    throw PreconditionError("map does not factor through the trace (residual " +
                            std::to_string(cf.residual) + ")");
  return cf;
}

// ---- Homogeneous components ---------------------------------------------

struct HomogeneousComponentTable::Impl {
  explicit Impl(MapDescriptor m) : map(std::move(m)) {}

  MapDescriptor map;
  int degree = 0;
  std::vector<double> radii;
  int angles = 0;
  Eigen::MatrixXd vinv;  // inverse Vandermonde, (power) x (radius)
  double cond = 1.0;
  Element base;
  double error = 0.0;

  std::map<std::pair<int, int>, Element> evaluate_all(const Element& a) const {
    const int D = degree, T = angles, R = static_cast<int>(radii.size());
    const Shape& cs = map.codomain();
    // g[q + D][k]: Fourier coefficient q at radius k
    std::vector<std::vector<Element>> g(2 * D + 1, std::vector<Element>(R, Element::zero(cs)));
    for (int k = 0; k < R; ++k) {
      for (int t = 0; t < T; ++t) {
        double theta = 2 * std::numbers::pi * t / T;
        cd z = std::polar(radii[k], theta);
        Element f = map(z * a);
        for (int q = -D; q <= D; ++q) g[q + D][k] += std::polar(1.0 / T, -q * theta) * f;
      }
    }
    std::map<std::pair<int, int>, Element> out;
    for (int q = -D; q <= D; ++q) {
      for (int s = std::abs(q); s <= D; s += 2) {
        int m = (s + q) / 2, n = (s - q) / 2;
        if (s == 0) {
          out.emplace(std::make_pair(0, 0), base);
          continue;
        }
        Element c = Element::zero(cs);
        for (int k = 0; k < R; ++k) c += cd(vinv(s, k)) * g[q + D][k];
        out.emplace(std::make_pair(m, n), std::move(c));
      }
    }
    return out;
  }
};

int HomogeneousComponentTable::degree() const { return impl_->degree; }
const std::vector<double>& HomogeneousComponentTable::radii() const { return impl_->radii; }
int HomogeneousComponentTable::angles() const { return impl_->angles; }
double HomogeneousComponentTable::condition_number() const { return impl_->cond; }
const Element& HomogeneousComponentTable::base_point_value() const { return impl_->base; }
double HomogeneousComponentTable::extraction_error() const { return impl_->error; }

std::vector<std::pair<int, int>> HomogeneousComponentTable::indices() const {
  std::vector<std::pair<int, int>> out;
  for (int s = 0; s <= impl_->degree; ++s)
    for (int m = s; m >= 0; --m) out.emplace_back(m, s - m);
  return out;
}

std::map<std::pair<int, int>, Element> HomogeneousComponentTable::evaluate_all(const Element& a) const {
  return impl_->evaluate_all(a);
}

Element HomogeneousComponentTable::component(int m, int n, const Element& a) const {
  if (m < 0 || n < 0 || m + n > impl_->degree) throw InputError("component index outside the table");
  return impl_->evaluate_all(a).at({m, n});
}

MapDescriptor HomogeneousComponentTable::component_map(int m, int n) const {
  if (m < 0 || n < 0 || m + n > impl_->degree) throw InputError("component index outside the table");
  auto impl = impl_;
  const MapDescriptor& src = impl->map;
  ClaimedFlags f;
  f.tracial = src.flags().tracial;
  return MapDescriptor(
      src.name() + "_" + std::to_string(m) + "_" + std::to_string(n), src.domain_shapes(),
      src.codomain(), Linearity::mixed(m, n),
      [impl, m, n](std::span<const Element> a) { return impl->evaluate_all(a[0]).at({m, n}); }, f);
}

HomogeneousComponentTable extract_homogeneous_components(const MapDescriptor& map,
                                                         const ExtractionOptions& opts) {
  if (map.arity() != 1) throw InputError("component extraction needs a single-slot map");
  auto impl = std::make_shared<HomogeneousComponentTable::Impl>(map);
  const int D = opts.degree >= 0 ? opts.degree : map.linearity().degree;
  if (D < 0) throw InputError("degree bound must be nonnegative");
  impl->degree = D;
  impl->radii = opts.radii;
  if (impl->radii.empty())
    for (int i = 0; i <= D; ++i) impl->radii.push_back(0.5 + 0.25 * i);
  if (static_cast<int>(impl->radii.size()) != D + 1)
    throw InputError("component extraction needs exactly D + 1 radii");
  for (std::size_t i = 0; i < impl->radii.size(); ++i) {
    if (!(impl->radii[i] > 0)) throw InputError("radii must be positive");
    for (std::size_t j = 0; j < i; ++j)
      if (impl->radii[i] == impl->radii[j]) throw InputError("radii must be distinct");
  }
  impl->angles = opts.angles > 0 ? opts.angles : 4 * D + 4;
  if (impl->angles <= 2 * D) throw InputError("angular count must exceed 2D");

  Eigen::MatrixXd v(D + 1, D + 1);
  for (int k = 0; k <= D; ++k)
    for (int s = 0; s <= D; ++s) v(k, s) = std::pow(impl->radii[k], s);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(v);
  const auto& sv = svd.singularValues();
  impl->cond = sv(0) / sv(sv.size() - 1);
  if (!(impl->cond <= opts.max_condition))
    throw NumericalError("radial Vandermonde system is ill-conditioned (condition number " +
                         std::to_string(impl->cond) + "); widen the radii");
  impl->vinv = v.fullPivLu().inverse();
  impl->base = map(Element::zero(map.domain(0)));

  for (long t = 0; t < opts.probes; ++t) {
    Rng rng(trial_seed(opts.seed, t));
    Element a = rng.gaussian(map.domain(0));
    Element sum = Element::zero(map.codomain());
    for (const auto& [idx, c] : impl->evaluate_all(a)) sum += c;
    impl->error = std::max(impl->error, (map(a) - sum).norm());
  }
  HomogeneousComponentTable table;
  table.impl_ = std::move(impl);
  return table;
}

double homogeneity_defect(const MapDescriptor& component, int trials, std::uint64_t seed) {
  const Linearity& lin = component.linearity();
  if (lin.kind != LinearityKind::mixed_homogeneous)
    throw InputError("homogeneity_defect needs a mixed-homogeneous component");
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(trial_seed(seed, t));
    Element a = rng.gaussian(component.domain(0));
    cd z = std::polar(rng.uniform(0.3, 1.7), rng.uniform(0.0, 2 * std::numbers::pi));
    cd factor = std::pow(z, lin.m) * std::pow(std::conj(z), lin.n);
    Element fa = component(a);
    double scale = std::max(1.0, fa.norm() * std::abs(factor));
    worst = std::max(worst, (component(z * a) - factor * fa).norm() / scale);
  }
  return worst;
}

Element multilinear_lift(const MapDescriptor& component, std::span<const Element> a,
                         std::span<const Element> b, double tol) {
  const Linearity& lin = component.linearity();
  if (lin.kind != LinearityKind::mixed_homogeneous)
    throw InputError("multilinear_lift needs a mixed-homogeneous component");
  const int m = lin.m, n = lin.n, vars = m + n;
  if (vars > 3) throw InputError("multilinear_lift is limited to m + n <= 3");
  if (vars == 0) throw InputError("the (0,0) component has no lift");
  if (static_cast<int>(a.size()) != m || static_cast<int>(b.size()) != n)
    throw InputError("multilinear_lift: expected " + std::to_string(m) + " linear and " +
                     std::to_string(n) + " conjugate-linear arguments");
  const int phases = 2 * vars + 1;
  Args args(a.begin(), a.end());
  args.insert(args.end(), b.begin(), b.end());

  auto lift_at = [&](const Args& xs) {
    long total = 1;
    for (int v = 0; v < vars; ++v) total *= phases;
    Element acc = Element::zero(component.codomain());
    std::vector<int> idx(vars, 0);
    for (long g = 0; g < total; ++g) {
      long rest = g;
      for (int v = vars - 1; v >= 0; --v) idx[v] = static_cast<int>(rest % phases), rest /= phases;
      Element x = Element::zero(component.domain(0));
      cd weight = 1.0;
      for (int v = 0; v < vars; ++v) {
        cd s = std::polar(1.0, 2 * std::numbers::pi * idx[v] / phases);
        x += s * xs[v];
        weight *= v < m ? std::conj(s) : s;
      }
      acc += weight * component(x);
    }
    double fact = 1.0;
    for (int i = 2; i <= m; ++i) fact *= i;
    for (int i = 2; i <= n; ++i) fact *= i;
    return (1.0 / (fact * static_cast<double>(total))) * acc;
  };

  Element lifted = lift_at(args);
  Args diag(vars, args[0]);
  Element on_diag = lift_at(diag), direct = component(args[0]);
  if ((on_diag - direct).norm() > tol * std::max(1.0, direct.norm()))
    throw NumericalError("multilinear_lift: diagonal check failed; component is not (m,n)-homogeneous");
  return lifted;
}

TracialDecomposition decompose_tracial_nonlinear(const MapDescriptor& map, int degree,
                                                 const DecompositionOptions& opts) {
  if (map.arity() != 1) throw InputError("nonlinear decomposition needs a single-slot map");
  if (!map.flags().tracial || !map.flags().completely_positive())
    throw PreconditionError("nonlinear decomposition needs a tracial completely positive map");
  if (degree < 1 || degree > 3) throw InputError("nonlinear decomposition supports 1 <= D <= 3");
  ExtractionOptions eo;
  eo.degree = degree;
  eo.seed = opts.seed ^ 0x5A5A5A5Aull;
  auto table = extract_homogeneous_components(map, eo);

  const Shape& dom = map.domain(0);
  const int p = static_cast<int>(dom.block_count());
  std::vector<Element> units;
  for (int b = 0; b < p; ++b) units.push_back(block_unit(dom, b));

  std::map<std::vector<int>, Element> terms;
  terms.emplace(std::vector<int>(2 * p, 0), table.base_point_value());
  for (auto [m, n] : table.indices()) {
    if (m + n == 0) continue;
    MapDescriptor comp = table.component_map(m, n);
    int vars = m + n;
    long combos = 1;
    for (int v = 0; v < vars; ++v) combos *= p;
    for (long c = 0; c < combos; ++c) {
      std::vector<int> pick(vars);
      long rest = c;
      for (int v = vars - 1; v >= 0; --v) pick[v] = static_cast<int>(rest % p), rest /= p;
      Args la, lb;
      std::vector<int> exps(2 * p, 0);
      for (int v = 0; v < vars; ++v) {
        if (v < m) {
          la.push_back(units[pick[v]]);
          ++exps[pick[v]];
        } else {
          lb.push_back(units[pick[v]]);
          ++exps[p + pick[v]];
        }
      }
      Element coeff = multilinear_lift(comp, la, lb, 1e-7);
      auto it = terms.find(exps);
      if (it == terms.end()) terms.emplace(exps, coeff);
      else it->second += coeff;
    }
  }
  std::vector<maps::MonomialTerm> mt;
  for (auto& [e, c] : terms) mt.push_back({e, c});
  MapDescriptor phi1 = maps::center_trace({dom}, true);
  MapDescriptor phi2 = maps::monomial(2 * p, map.codomain(), mt);
  TracialDecomposition d(phi1, phi2);
  d.condition_number = table.condition_number();
  d.extraction_error = table.extraction_error();
  certify(d, map, opts);
  if (d.extraction_error > opts.tol * std::max(1.0, table.base_point_value().norm()) && d.certified)
    d.certified = false;
  return d;
}

}  // namespace opmap
