#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "opmap/algebra.hpp"
#include "opmap/element_io.hpp"

namespace opmap {

using Args = std::vector<Element>;
using Evaluator = std::function<Element(std::span<const Element>)>;

// Stands in for "every n" in positivity orders and the D_m property.
inline constexpr int kUnbounded = 1 << 20;

enum class LinearityKind { linear, multilinear, mixed_homogeneous, polynomial, opaque };

struct Linearity {
  LinearityKind kind = LinearityKind::opaque;
  int m = 0;  // mixed_homogeneous bidegree
  int n = 0;
  int degree = 6;  // truncation order for polynomial/opaque maps

  static Linearity linear() { return {LinearityKind::linear, 0, 0, 1}; }
  static Linearity multilinear() { return {LinearityKind::multilinear, 0, 0, 1}; }
  static Linearity mixed(int m, int n) { return {LinearityKind::mixed_homogeneous, m, n, m + n}; }
  static Linearity polynomial(int degree) { return {LinearityKind::polynomial, 0, 0, degree}; }
  static Linearity opaque(int degree = 6) { return {LinearityKind::opaque, 0, 0, degree}; }

  // Linear in every slot (k = 1 linear maps included).
  bool is_multilinear() const {
    return kind == LinearityKind::linear || kind == LinearityKind::multilinear;
  }
  std::string str() const;
  static Linearity parse(const std::string& s);
};

struct ClaimedFlags {
  bool unital = false;
  bool tracial = false;
  bool positive = false;
  int n_positive = 0;  // kUnbounded means completely positive
  int dm_order = 0;    // property D_m: factors through a commutative algebra
  bool vanishes_at_zero = false;

  bool completely_positive() const { return n_positive >= kUnbounded; }
  bool at_least_n_positive(int n) const { return n_positive >= n || (n <= 1 && positive); }
};

json flags_to_json(const ClaimedFlags& f);
ClaimedFlags flags_from_json(const json& j);

struct RegistrationOptions;

class MapDescriptor {
 public:
  MapDescriptor(std::string name, std::vector<Shape> domains, Shape codomain, Linearity linearity,
                Evaluator evaluator, ClaimedFlags flags = {}, json spec = nullptr);

  const std::string& name() const { return name_; }
  int arity() const { return static_cast<int>(domains_.size()); }
  const std::vector<Shape>& domain_shapes() const { return domains_; }
  const Shape& domain(int slot) const { return domains_.at(slot); }
  const Shape& codomain() const { return codomain_; }
  const Linearity& linearity() const { return linearity_; }
  const ClaimedFlags& flags() const { return flags_; }
  // Serializable map-spec this descriptor was built from, or null.
  const json& spec() const { return spec_; }
  bool registered() const { return registered_; }
  bool homogeneous_domains() const;

  Element operator()(std::span<const Element> args) const;
  Element operator()(const Element& a) const;
  Element operator()(const Element& a, const Element& b) const;

  MapDescriptor with_flags(ClaimedFlags flags) const;
  MapDescriptor with_name(std::string name) const;
  MapDescriptor with_spec(json spec) const;

 private:
  friend MapDescriptor register_map(MapDescriptor, const RegistrationOptions&);

  std::string name_;
  std::vector<Shape> domains_;
  Shape codomain_;
  Linearity linearity_;
  Evaluator evaluator_;
  ClaimedFlags flags_;
  json spec_;
  bool registered_ = false;
};

inline Element evaluate(const MapDescriptor& map, std::span<const Element> args) { return map(args); }

Args identity_tuple(const MapDescriptor& map);
Args zero_tuple(const MapDescriptor& map);

struct RegistrationOptions {
  int trials = 20;
  double tol = 1e-9;
  std::uint64_t seed = 0x5EED;
  // Randomized budget for positivity claims that have no exact certificate.
  int positivity_trials = 400;
};

// Spot-checks every claim the descriptor makes (linearity class, unitality,
// traciality, positivity, vanishing at zero) and marks it registered. Throws
// RegistrationError on the first refuted claim.
MapDescriptor register_map(MapDescriptor map, const RegistrationOptions& opts = {});

struct Notion {
  enum class Kind { type1, type2, choi_exact };
  Kind kind = Kind::type2;
  int n = 1;

  std::string str() const;
  static Notion parse(const std::string& s);
  static Notion type1(int n) { return {Kind::type1, n}; }
  static Notion type2(int n) { return {Kind::type2, n}; }
};

enum class Verdict { certified_positive, violated, exhausted_trials };
std::string verdict_name(Verdict v);
Verdict parse_verdict(const std::string& s);

struct TrialOptions {
  long trials = 1000;
  std::uint64_t seed = 0xC5A1;
  Tolerance tol{};
  int threads = 1;
  long first_trial = 0;      // resume cursor; trial t uses trial_seed(seed, t)
  bool real_inputs = false;  // sample real symmetric PSD inputs
};

struct PositivityReport {
  std::string check = "positivity";
  Verdict verdict = Verdict::exhausted_trials;
  std::optional<Args> witness;
  double min_eig = 0.0;
  double herm_deviation = 0.0;
  long trials = 0;
  std::uint64_t seed = 0;
  Notion notion{};
  // Trial index that produced the witness; -1 for probes and exact certificates.
  long witness_trial = -1;

  bool violated() const { return verdict == Verdict::violated; }
};

json report_to_json(const PositivityReport& r);
PositivityReport report_from_json(const json& j);

// Output block (i,j) = map(A^1_ij, ..., A^k_ij).
Element amplify_type2(const MapDescriptor& map, int n, std::span<const Element> args);
// Output block (i,j) = sum over l, r, ..., t of map(A1_il, A2_lr, ..., Ak_tj).
Element amplify_type1(const MapDescriptor& map, int n, std::span<const Element> args);

struct KrausSet {
  std::vector<Mat> operators;  // each codomain x domain

  int domain_dim() const { return static_cast<int>(operators.at(0).cols()); }
  int codomain_dim() const { return static_cast<int>(operators.at(0).rows()); }
  void validate() const;
  // sum V V*, which equals the image of the identity
  Mat unit_image() const;
  bool unital(double tol = 1e-10) const;
  // Rescales so that sum V V* = I.
  KrausSet normalized() const;
};

struct ChoiMatrix {
  Element matrix;  // block matrix [map(E_ij)] on codomain.amplified(d)
  int domain_dim = 0;
  int codomain_dim = 0;
};

ChoiMatrix choi_matrix(const MapDescriptor& map);
PsdResult is_completely_positive_exact(const ChoiMatrix& choi, const Tolerance& tol = {});
// Matrix-unit block matrix [E_ij] in M_n(M_d), zero beyond d.
Element matrix_unit_block(int d, int n);

PositivityReport test_positive(const MapDescriptor& map, Notion notion, const TrialOptions& opts,
                               const std::vector<Args>& probes = {});

// The element whose positivity a report asserts, recomputed from a witness.
Element check_subject(const MapDescriptor& map, const std::string& check, Notion notion,
                      std::span<const Element> witness);
PsdResult replay_witness(const MapDescriptor& map, const PositivityReport& report,
                         const Tolerance& tol);

struct TracialReport {
  std::vector<double> slot_residuals;
  double joint_residual = 0.0;
  double global_residual = 0.0;
  double scale = 1.0;
  bool tracial = false;
};

TracialReport test_tracial(const MapDescriptor& map, const TrialOptions& opts);

enum class InputClass { normal, arbitrary };

// Phi(A*A) - Phi(A*)Phi(A) over sampled tuples A.
PositivityReport test_choi_inequality(const MapDescriptor& map, InputClass inputs,
                                      const TrialOptions& opts);
// Phi(A) - Phi(B) - Phi(A - B) for A = B + GG*, B >= 0.
PositivityReport test_superadditive(const MapDescriptor& map, const TrialOptions& opts);
// Phi(A) - Phi(B) for A = B + GG*, B >= 0.
PositivityReport test_monotone(const MapDescriptor& map, const TrialOptions& opts);
// max ||Phi(A*) - Phi(A)*|| / scale over random tuples.
double self_adjoint_residual(const MapDescriptor& map, const TrialOptions& opts);

}  // namespace opmap
