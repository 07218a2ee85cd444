#pragma once

#include <cstdint>
#include <vector>

#include "opmap/map_model.hpp"

namespace opmap::gen {

// PSD P_1..P_count on `shape` with sum P_j = I.
std::vector<Element> unit_partition(std::uint64_t seed, int count, const Shape& shape);

KrausSet random_kraus_set(std::uint64_t seed, int d_in, int d_out, int count);
// Normalized variant rescales the operators so that sum V V* = I.
MapDescriptor random_kraus_map(std::uint64_t seed, int d_in, int d_out, int count,
                               bool normalized = false);
MapDescriptor random_unital_cp(std::uint64_t seed, int d, int count);

MapDescriptor random_tracial_linear(std::uint64_t seed, const Shape& domain, const Shape& codomain,
                                    bool unital = false);
MapDescriptor random_tracial_multilinear(std::uint64_t seed, const std::vector<Shape>& shapes,
                                         const Shape& codomain, int terms = 3, bool unital = false);
// V* (A_1 (x) ... (x) A_k) V with V an isometry, hence unital.
MapDescriptor random_cp_multilinear(std::uint64_t seed, const std::vector<Shape>& shapes,
                                    int codomain_dim);

// p random full-rank states on one slot: a unital CP map with commutative range.
MapDescriptor random_state_bundle(std::uint64_t seed, const Shape& domain, int p);

struct DmOptions {
  int centers = 2;     // states in the commutative factor (ignored when tracial)
  int max_degree = 2;  // highest monomial degree in the second factor
  bool tracial = false;
};
// phi2 o phi1 with phi1 a unital CP map into C^p (states, or the center trace
// when tracial) and phi2 a unital sum of monomials with PSD coefficients and no
// constant term. Has property D_m for every m and vanishes at zero.
MapDescriptor random_dm_map(std::uint64_t seed, const Shape& domain, const Shape& codomain,
                            const DmOptions& opts = {});
// Multilinear analogue: per-slot state bundles followed by a multilinear map on
// the product of centers with PSD coefficients summing to I.
MapDescriptor random_dm_multilinear(std::uint64_t seed, const std::vector<Shape>& shapes,
                                    const Shape& codomain, int centers = 2);

// p(tr A/d, conj tr A/d) P with nonnegative coefficients of bidegree <= max_degree.
MapDescriptor random_tracial_polynomial(std::uint64_t seed, int d, const Shape& codomain,
                                        int max_degree = 2);

}  // namespace opmap::gen
