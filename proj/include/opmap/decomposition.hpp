#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "opmap/map_model.hpp"
#include "opmap/maps.hpp"

namespace opmap {

struct DecompositionOptions {
  long samples = 50;
  std::uint64_t seed = 0xC5A1;
  double tol = 1e-9;
  int threads = 1;
};

// Phi = phi2 o phi1 with phi1 into a commutative algebra C^p.
struct TracialDecomposition {
  TracialDecomposition(MapDescriptor p1, MapDescriptor p2)
      : phi1(std::move(p1)), phi2(std::move(p2)), composed(maps::compose(phi2, phi1)) {}

  MapDescriptor phi1;
  MapDescriptor phi2;
  MapDescriptor composed;  // phi2 o phi1
  double residual = 0.0;
  long samples = 0;
  std::uint64_t seed = 0;
  bool certified = false;
  std::optional<Args> witness;  // worst sample when not certified
  double condition_number = 1.0;
  double extraction_error = 0.0;

  Element evaluate(std::span<const Element> args) const { return composed(args); }
};

json decomposition_to_json(const TracialDecomposition& d);

// Multilinear (or linear) tracial maps: phi1 is the slotwise center trace in
// coordinates, phi2 the restriction of Phi to block-scalar tuples.
TracialDecomposition decompose_tracial(const MapDescriptor& map, const DecompositionOptions& opts = {});

struct CanonicalForm {
  Element p;  // Phi(A) = tr(A) P
  double residual = 0.0;
};
CanonicalForm tracial_linear_canonical_form(const MapDescriptor& map,
                                            const DecompositionOptions& opts = {});

struct ExtractionOptions {
  int degree = -1;             // -1: the map's declared degree bound
  std::vector<double> radii;   // empty: 1/2, 3/4, 1, 5/4, ...
  int angles = 0;              // 0: 4D + 4
  long probes = 20;            // held-out inputs for extraction_error
  std::uint64_t seed = 0xC5A1;
  double max_condition = 1e12;
};

class HomogeneousComponentTable {
 public:
  int degree() const;
  const std::vector<double>& radii() const;
  int angles() const;
  double condition_number() const;
  const Element& base_point_value() const;  // Phi(0)
  double extraction_error() const;
  // (m, n) with m + n <= D
  std::vector<std::pair<int, int>> indices() const;

  std::map<std::pair<int, int>, Element> evaluate_all(const Element& a) const;
  Element component(int m, int n, const Element& a) const;
  // Phi_{m,n} as a descriptor of linearity mixed_homogeneous(m, n).
  MapDescriptor component_map(int m, int n) const;

 private:
  friend HomogeneousComponentTable extract_homogeneous_components(const MapDescriptor&,
                                                                  const ExtractionOptions&);
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

// Fourier analysis of theta -> Phi(r e^{i theta} A) separates m - n; a
// Vandermonde solve across radii separates m + n.
HomogeneousComponentTable extract_homogeneous_components(const MapDescriptor& map,
                                                         const ExtractionOptions& opts = {});

// max ||Phi_{m,n}(zA) - z^m conj(z)^n Phi_{m,n}(A)|| / scale over random (z, A).
double homogeneity_defect(const MapDescriptor& component, int trials, std::uint64_t seed);

// Symmetric lift L of an (m,n)-homogeneous map: linear in a_1..a_m,
// conjugate-linear in b_1..b_n, with L(A,..,A; A,..,A) = Phi_{m,n}(A).
// Requires m + n <= 3; the diagonal identity is checked at a_1 on every call.
Element multilinear_lift(const MapDescriptor& component, std::span<const Element> a,
                         std::span<const Element> b, double tol = 1e-8);

// Single-slot tracial completely positive maps. phi1(A) is the center trace
// of A followed by its conjugate coordinates; phi2 is a polynomial on C^{2p}.
TracialDecomposition decompose_tracial_nonlinear(const MapDescriptor& map, int degree,
                                                 const DecompositionOptions& opts = {});

}  // namespace opmap
