#pragma once

#include <vector>

#include "opmap/map_model.hpp"

namespace opmap::maps {

// Every builder attaches the map-spec JSON that reproduces it. None of them
// register; map_spec::build and the generators do.

// A -> sum V A V*; V is codomain x domain.
MapDescriptor kraus(const KrausSet& ks);
MapDescriptor transpose(int d);
MapDescriptor identity(const Shape& s);

// Slot l is sent to (tr(rho_j A_l))_j; output coordinates are concatenated
// across slots on a commutative codomain.
struct StateSlot {
  Shape shape;
  std::vector<Element> states;
};
MapDescriptor state_bundle(const std::vector<StateSlot>& slots);

// Slotwise center-valued trace as coordinates tr(A_b)/d_b on C^p. With
// conjugate_copy the conjugated coordinates are appended.
MapDescriptor center_trace(const std::vector<Shape>& shapes, bool conjugate_copy = false);

// sum_b tr(M_b) P_b
MapDescriptor tracial_linear(const Shape& domain, const std::vector<Element>& coefficients);

struct TracialTerm {
  std::vector<int> blocks;  // one block index per slot
  Element coefficient;
};
// sum_j prod_l tr(A^l_{b_l(j)}) P_j
MapDescriptor tracial_multilinear(const std::vector<Shape>& shapes,
                                  const std::vector<TracialTerm>& terms);

// V* (A_1 (x) ... (x) A_k) V on block-diagonal dense embeddings.
MapDescriptor cp_multilinear(const std::vector<Shape>& shapes, const Mat& v);
MapDescriptor tensor_map(const std::vector<Shape>& shapes);
MapDescriptor product(const Shape& s, int arity);
// Blockwise entrywise product of the arguments.
MapDescriptor schur_product(const Shape& s, int arity);
// Entrywise |x|^alpha_i of each argument (|x|^{2 alpha_i} when conjugate),
// combined by Schur product.
MapDescriptor hadamard_power(int m, const std::vector<double>& alphas, bool conjugate = false);
// (A, B) -> A^T (x) B^T
MapDescriptor transpose_tensor(int d);
// (A_1, ..., A_k) -> (A_1, ..., A_{k-1})
MapDescriptor projection(const Shape& s, int arity);
MapDescriptor operator_norm(const Shape& s);

struct MonomialTerm {
  std::vector<int> exponents;  // one per center coordinate
  Element coefficient;
};
// z -> sum_e z^e P_e on C^p.
MapDescriptor monomial(int p, const Shape& codomain, const std::vector<MonomialTerm>& terms);

// Multilinear map on C^{p_1} x ... x C^{p_k}:
// (z^1, ..., z^k) -> sum_c z^1_{c_1} ... z^k_{c_k} Q_c, coefficients row-major in c.
MapDescriptor center_multilinear(const std::vector<int>& slot_dims,
                                 const std::vector<Element>& coefficients);

struct TracePolynomialTerm {
  int m = 0;
  int n = 0;
  cd coefficient;
};
// A -> sum c (tr A / d)^m (conj tr A / d)^n P on M_d.
MapDescriptor tracial_polynomial(int d, const std::vector<TracePolynomialTerm>& terms,
                                 const Element& p);

// outer o inner. When outer has several slots, the inner output is split
// along outer's domain shapes.
MapDescriptor compose(const MapDescriptor& outer, const MapDescriptor& inner);

// Splits x on concat(shapes) into its per-slot parts.
Args split_concat(const Element& x, const std::vector<Shape>& shapes);
Element join_concat(std::span<const Element> parts);

}  // namespace opmap::maps
