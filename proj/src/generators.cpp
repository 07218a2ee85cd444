#include "opmap/generators.hpp"

#include <cmath>

#include "opmap/maps.hpp"
#include "opmap/random.hpp"

namespace opmap::gen {

namespace {

Element inverse_sqrt(const Element& s) {
  return spectral_apply(s, [](double x) { return 1.0 / std::sqrt(x); });
}

std::vector<std::vector<int>> exponent_vectors(int p, int max_degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> e(p, 0);
  while (true) {
    int deg = 0;
    for (int x : e) deg += x;
    if (deg >= 1 && deg <= max_degree) out.push_back(e);
    int pos = p - 1;
    while (pos >= 0 && ++e[pos] > max_degree) e[pos--] = 0;
    if (pos < 0) break;
  }
  return out;
}

}  // namespace

std::vector<Element> unit_partition(std::uint64_t seed, int count, const Shape& shape) {
  Rng rng(seed);
  std::vector<Element> q;
  Element sum = Element::zero(shape);
  for (int j = 0; j < count; ++j) {
    std::vector<Mat> blocks;
    for (int d : shape.dims()) blocks.push_back(rng.psd(d, d) + 0.05 * Mat::Identity(d, d));
    q.emplace_back(shape, std::move(blocks));
    sum += q.back();
  }
  Element r = inverse_sqrt(sum);
  for (auto& x : q) x = (r * x * r).hermitian_part();
  return q;
}

KrausSet random_kraus_set(std::uint64_t seed, int d_in, int d_out, int count) {
  Rng rng(seed);
  KrausSet ks;
  for (int r = 0; r < count; ++r) ks.operators.push_back(rng.gaussian(d_out, d_in));
  return ks;
}

MapDescriptor random_kraus_map(std::uint64_t seed, int d_in, int d_out, int count, bool normalized) {
  KrausSet ks = random_kraus_set(seed, d_in, d_out, count);
  if (normalized) ks = ks.normalized();
  return register_map(maps::kraus(ks));
}

MapDescriptor random_unital_cp(std::uint64_t seed, int d, int count) {
  return random_kraus_map(seed, d, d, count, true);
}

MapDescriptor random_tracial_linear(std::uint64_t seed, const Shape& domain, const Shape& codomain,
                                    bool unital) {
  int p = static_cast<int>(domain.block_count());
  std::vector<Element> coeffs;
  if (unital) {
    coeffs = unit_partition(seed, p, codomain);
    for (int b = 0; b < p; ++b) coeffs[b] = (1.0 / domain.dim(b)) * coeffs[b];
  } else {
    Rng rng(seed);
    for (int b = 0; b < p; ++b) coeffs.push_back(rng.psd(codomain));
  }
  return register_map(maps::tracial_linear(domain, coeffs));
}

MapDescriptor random_tracial_multilinear(std::uint64_t seed, const std::vector<Shape>& shapes,
                                         const Shape& codomain, int terms, bool unital) {
  Rng rng(seed);
  std::vector<maps::TracialTerm> tt;
  for (int j = 0; j < terms; ++j) {
    std::vector<int> blocks;
    for (const auto& s : shapes) blocks.push_back(rng.uniform_int(0, static_cast<int>(s.block_count()) - 1));
    tt.push_back({blocks, rng.psd(codomain)});
  }
  if (unital) {
    auto part = unit_partition(seed ^ 0x9E3779B97F4A7C15ull, terms, codomain);
    for (int j = 0; j < terms; ++j) {
      double dims = 1;
      for (std::size_t l = 0; l < shapes.size(); ++l) dims *= shapes[l].dim(tt[j].blocks[l]);
      tt[j].coefficient = (1.0 / dims) * part[j];
    }
  }
  return register_map(maps::tracial_multilinear(shapes, tt));
}

MapDescriptor random_cp_multilinear(std::uint64_t seed, const std::vector<Shape>& shapes,
                                    int codomain_dim) {
  Rng rng(seed);
  int big = 1;
  for (const auto& s : shapes) big *= s.trace_dimension();
  if (codomain_dim > big) throw InputError("random_cp_multilinear: codomain larger than tensor space");
  return register_map(maps::cp_multilinear(shapes, rng.isometry(big, codomain_dim)));
}

MapDescriptor random_state_bundle(std::uint64_t seed, const Shape& domain, int p) {
  Rng rng(seed);
  maps::StateSlot slot{domain, {}};
  for (int j = 0; j < p; ++j) slot.states.push_back(rng.density(domain));
  return register_map(maps::state_bundle({slot}));
}

MapDescriptor random_dm_map(std::uint64_t seed, const Shape& domain, const Shape& codomain,
                            const DmOptions& opts) {
  Rng rng(seed);
  MapDescriptor inner = opts.tracial ? maps::center_trace({domain})
                                     : [&] {
                                         maps::StateSlot slot{domain, {}};
                                         for (int j = 0; j < opts.centers; ++j)
                                           slot.states.push_back(rng.density(domain));
                                         return maps::state_bundle({slot});
                                       }();
  int p = static_cast<int>(inner.codomain().block_count());
  auto exps = exponent_vectors(p, std::max(opts.max_degree, 1));
  std::vector<std::vector<int>> chosen;
  for (const auto& e : exps)
    if (rng.uniform() < 0.6) chosen.push_back(e);
  if (chosen.empty()) chosen.push_back(exps.front());
  auto part = unit_partition(seed ^ 0xD1B54A32D192ED03ull, static_cast<int>(chosen.size()), codomain);
  std::vector<maps::MonomialTerm> terms;
  for (std::size_t j = 0; j < chosen.size(); ++j) terms.push_back({chosen[j], part[j]});
  MapDescriptor outer = maps::monomial(p, codomain, terms);
  return register_map(maps::compose(outer, inner));
}

MapDescriptor random_dm_multilinear(std::uint64_t seed, const std::vector<Shape>& shapes,
                                    const Shape& codomain, int centers) {
  Rng rng(seed);
  std::vector<maps::StateSlot> slots;
  std::vector<int> dims;
  std::size_t total = 1;
  for (const auto& s : shapes) {
    maps::StateSlot slot{s, {}};
    for (int j = 0; j < centers; ++j) slot.states.push_back(rng.density(s));
    slots.push_back(std::move(slot));
    dims.push_back(centers);
    total *= centers;
  }
  auto part = unit_partition(seed ^ 0xA0761D6478BD642Full, static_cast<int>(total), codomain);
  MapDescriptor outer = maps::center_multilinear(dims, part);
  return register_map(maps::compose(outer, maps::state_bundle(slots)));
}

MapDescriptor random_tracial_polynomial(std::uint64_t seed, int d, const Shape& codomain,
                                        int max_degree) {
  Rng rng(seed);
  std::vector<maps::TracePolynomialTerm> terms;
  for (int s = 1; s <= max_degree; ++s)
    for (int m = 0; m <= s; ++m)
      if (rng.uniform() < 0.7) terms.push_back({m, s - m, rng.uniform(0.1, 1.0)});
  if (terms.empty()) terms.push_back({1, 1, 1.0});
  return register_map(maps::tracial_polynomial(d, terms, rng.psd(codomain)));
}

}  // namespace opmap::gen
