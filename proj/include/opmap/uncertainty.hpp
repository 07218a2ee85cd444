#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "opmap/map_model.hpp"

namespace opmap {

// Tuples are elements of the product algebra: products and adjoints act
// slotwise, and a single-slot map takes one-element tuples.

struct Observable {
  Element element;
  explicit Observable(Element x, const Tolerance& tol = {});
};

enum class DensityNormalization { trace_one, map_unital };

struct DensityOperator {
  Element element;
  DensityNormalization normalization = DensityNormalization::trace_one;

  // PSD with total trace 1.
  static DensityOperator trace_one(Element p, const Tolerance& tol = {});
  // PSD with map(P) = I.
  static DensityOperator map_unital(Element p, const MapDescriptor& map, const Tolerance& tol = {});
};

// X -> map(P^{1/2} X P^{1/2}) on a single-slot map.
MapDescriptor density_compression(const MapDescriptor& map, const DensityOperator& p);

struct SpectralFunctionPair {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> g;
  bool same_monotonic_check = true;

  // f = t^{1 - alpha}, g = t^alpha
  static SpectralFunctionPair wyd(double alpha);
  // (f(x) - f(y))(g(x) - g(y)) >= -tol over all spectrum pairs of rho.
  bool same_monotonic_on(const Element& rho, double tol = 1e-12) const;
};

enum class InequalityVerdict { holds, violated, not_applicable };
std::string inequality_verdict_name(InequalityVerdict v);

struct InequalityReport {
  std::string quantity;
  double margin = 0.0;  // min eigenvalue, or min over coordinates of LHS - RHS
  InequalityVerdict verdict = InequalityVerdict::holds;
  json witness;         // inputs that reproduce the margin
  std::uint64_t seed = 0;
  json details = json::object();

  bool holds() const { return verdict != InequalityVerdict::violated; }
};

json inequality_to_json(const InequalityReport& r);

// Cov(A, B) = Phi(A* B) - Phi(A*) Phi(B)
Element covariance(const MapDescriptor& map, const Args& a, const Args& b);
Element covariance(const MapDescriptor& map, const Element& a, const Element& b);
Element variance(const MapDescriptor& map, const Args& a);
Element variance(const MapDescriptor& map, const Element& a);

// [[Var A, Cov(A,B)], [Cov(B,A), Var B]]; needs a unital 3-positive claim.
Element vc_matrix(const MapDescriptor& map, const Args& a, const Args& b);
InequalityReport vc_report(const MapDescriptor& map, const Args& a, const Args& b,
                           const Tolerance& tol = {});

// Var A Var B - |Re Cov(A,B)|^2 - |Phi([A,B])|^2 / 4 per center coordinate.
InequalityReport schrodinger_margin(const MapDescriptor& map, const Element& a, const Element& b,
                                    const Tolerance& tol = {});

// Parts (i)-(iv) for maps built with a commutative middle factor, plus the
// scalar product form when the codomain is commutative. Part (iv) is
// not_applicable below order 4.
std::vector<InequalityReport> heisenberg_suite(const MapDescriptor& map, const Args& a,
                                               const Args& b, const Tolerance& tol = {});

// Slots are 0-based. Other slots are fixed at units.
Args unit_padded(const MapDescriptor& map, int slot, const Element& x);
MapDescriptor slot_compress(const MapDescriptor& map, int i);
// (A, B) -> Phi(pad_i(A) pad_j(B))
MapDescriptor slot_pair(const MapDescriptor& map, int i, int j);

// k x k block matrix [Phi_(i,j)(A_i*, B_j) - Phi_(i)(A_i*) Phi_(j)(B_j)].
Element partial_covariance(const MapDescriptor& map, const Args& a, const Args& b);
Element partial_variance(const MapDescriptor& map, const Args& a);
// 2k x 2k; needs a (2k+1)-positive claim.
Element pvc_matrix(const MapDescriptor& map, const Args& a, const Args& b);
InequalityReport pvc_report(const MapDescriptor& map, const Args& a, const Args& b,
                            const Tolerance& tol = {});
// Variance-only path; needs a (k+1)-positive claim.
InequalityReport partial_variance_report(const MapDescriptor& map, const Args& a,
                                         const Tolerance& tol = {});

struct CompositeObservables {
  int i = 0;
  int j = 1;
  Element a, b, c, d;  // a, c live in slot i; b, d in slot j
};

// 4 x 4 block matrix on pad_i(A), pad_j(B), pad_i(C), pad_j(D). Multilinear
// maps use (1/2) Phi_(i)([A, C]) off the diagonal, other maps
// Phi((1/2)[pad_i(A), pad_i(C)]).
Element composite_matrix(const MapDescriptor& map, const CompositeObservables& obs);
InequalityReport composite_report(const MapDescriptor& map, const CompositeObservables& obs,
                                  const Tolerance& tol = {});
// Var A Var B Var C Var D - |Phi([A,C])|^2 |Phi([B,D])|^2 / 16, per coordinate
// for a commutative codomain, with operator norms otherwise.
InequalityReport composite_product_margin(const MapDescriptor& map, const CompositeObservables& obs,
                                          const Tolerance& tol = {});

struct TensorObservables {
  int dim_a = 0;
  int dim_b = 0;
  Element a, c;  // on M_{dim_a}
  Element b, d;  // on M_{dim_b}
  std::optional<cd> alpha;  // default: center of the smallest disk around spec(C)
  std::optional<cd> beta;
};

// Linear unital CP map on M_{dim_a dim_b} with commutative range:
// Var(A (x) I) Var(I (x) B) >= |Phi([A,C] (x) I) Phi(I (x) [B,D])|^2
//                              / (16 ||C - alpha I||^2 ||D - beta I||^2).
InequalityReport tensor_uncertainty_bound(const MapDescriptor& map, const TensorObservables& obs,
                                          const Tolerance& tol = {});
// C and D positive contractions: the bound without the norm denominator.
InequalityReport tensor_uncertainty_bound_contraction(const MapDescriptor& map,
                                                      const TensorObservables& obs,
                                                      const Tolerance& tol = {});

// Phi(f g A B) - Phi(f A g B) with f = f(rho), g = g(rho).
Element skew_correlation(const MapDescriptor& map, const DensityOperator& rho,
                         const SpectralFunctionPair& pair, const Element& a, const Element& b);
Element skew_information(const MapDescriptor& map, const DensityOperator& rho,
                         const SpectralFunctionPair& pair, const Element& a);
Element skew_matrix(const MapDescriptor& map, const DensityOperator& rho,
                    const SpectralFunctionPair& pair, const Element& a, const Element& b);
InequalityReport skew_report(const MapDescriptor& map, const DensityOperator& rho,
                             const SpectralFunctionPair& pair, const Element& a, const Element& b,
                             const Tolerance& tol = {});

// min eig of (inf_alpha ||X - alpha I||^2) I - Var(X) for normal X.
InequalityReport variance_upper_bound(const MapDescriptor& map, const Element& x,
                                      const Tolerance& tol = {});
// Multilinear form: X padded into slot s.
InequalityReport variance_upper_bound(const MapDescriptor& map, int slot, const Element& x,
                                      const Tolerance& tol = {});

}  // namespace opmap
