#include "opmap/maps.hpp"

#include <cmath>
#include <numeric>

namespace opmap::maps {

namespace {

json spec_of(const std::string& kind, json params) {
  return {{"kind", kind}, {"params", std::move(params)}};
}

json shapes_json(const std::vector<Shape>& shapes) {
  json j = json::array();
  for (const auto& s : shapes) j.push_back(shape_to_json(s));
  return j;
}

json elements_json(const std::vector<Element>& xs) {
  json j = json::array();
  for (const auto& x : xs) j.push_back(element_to_json(x));
  return j;
}

ClaimedFlags cp_flags() {
  ClaimedFlags f;
  f.positive = true;
  f.n_positive = kUnbounded;
  return f;
}

bool all_psd(const std::vector<Element>& xs) {
  for (const auto& x : xs)
    if (!is_positive(x).positive) return false;
  return true;
}

bool is_unit(const Element& x) { return (x - Element::identity(x.shape())).norm() <= 1e-10; }

cd trace_of(const Mat& m) { return m.trace(); }

}  // namespace

Args split_concat(const Element& x, const std::vector<Shape>& shapes) {
  Args out;
  std::size_t b = 0;
  for (const auto& s : shapes) {
    std::vector<Mat> blocks;
    for (std::size_t i = 0; i < s.block_count(); ++i) blocks.push_back(x.block(b++));
    out.emplace_back(s, std::move(blocks));
  }
  if (b != x.shape().block_count()) throw ShapeMismatch("split_concat: block count mismatch");
  return out;
}

Element join_concat(std::span<const Element> parts) {
  std::vector<Shape> shapes;
  std::vector<Mat> blocks;
  for (const auto& p : parts) {
    shapes.push_back(p.shape());
    blocks.insert(blocks.end(), p.blocks().begin(), p.blocks().end());
  }
  return Element(concat(shapes), std::move(blocks));
}

MapDescriptor kraus(const KrausSet& ks) {
  ks.validate();
  json ops = json::array();
  for (const auto& v : ks.operators) ops.push_back(matrix_to_json(v));
  ClaimedFlags f = cp_flags();
  f.unital = ks.unital();
  f.vanishes_at_zero = true;
  auto ops_copy = ks.operators;
  return MapDescriptor(
      "kraus", {Shape{ks.domain_dim()}}, Shape{ks.codomain_dim()}, Linearity::linear(),
      [ops_copy](std::span<const Element> a) {
        const Mat& x = a[0].block(0);
        Mat out = Mat::Zero(ops_copy[0].rows(), ops_copy[0].rows());
        for (const auto& v : ops_copy) out += v * x * v.adjoint();
        return Element(out);
      },
      f, spec_of("kraus", {{"operators", ops}}));
}

MapDescriptor transpose(int d) {
  ClaimedFlags f;
  f.positive = true;
  f.n_positive = 1;
  f.unital = true;
  f.vanishes_at_zero = true;
  return MapDescriptor(
      "transpose", {Shape{d}}, Shape{d}, Linearity::linear(),
      [](std::span<const Element> a) { return a[0].transpose(); }, f,
      spec_of("transpose", {{"dim", d}}));
}

MapDescriptor identity(const Shape& s) {
  ClaimedFlags f = cp_flags();
  f.unital = true;
  f.vanishes_at_zero = true;
  return MapDescriptor(
      "identity", {s}, s, Linearity::linear(), [](std::span<const Element> a) { return a[0]; }, f,
      spec_of("identity", {{"shape", shape_to_json(s)}}));
}

MapDescriptor state_bundle(const std::vector<StateSlot>& slots) {
  if (slots.empty()) throw InputError("state_bundle needs at least one slot");
  std::vector<Shape> shapes;
  json sj = json::array();
  int p = 0;
  bool unital = true;
  for (const auto& s : slots) {
    if (s.states.empty()) throw InputError("state_bundle slot needs at least one state");
    for (const auto& rho : s.states) {
      if (!(rho.shape() == s.shape)) throw ShapeMismatch("state_bundle: state shape mismatch");
      cd tr = 0.0;
      for (const auto& b : rho.blocks()) tr += b.trace();
      if (std::abs(tr - 1.0) > 1e-10) unital = false;
    }
    shapes.push_back(s.shape);
    p += static_cast<int>(s.states.size());
    sj.push_back({{"shape", shape_to_json(s.shape)}, {"states", elements_json(s.states)}});
  }
  bool positive = true;
  for (const auto& s : slots)
    for (const auto& rho : s.states) positive = positive && is_positive(rho).positive;
  ClaimedFlags f;
  if (positive) f = cp_flags();
  f.unital = unital;
  f.vanishes_at_zero = true;
  if (positive && slots.size() == 1) f.dm_order = kUnbounded;
  Shape codomain = commutative_shape(p);
  return MapDescriptor(
      "state_bundle", shapes, codomain, Linearity::linear(),
      [slots, codomain](std::span<const Element> a) {
        std::vector<Mat> blocks;
        for (std::size_t l = 0; l < slots.size(); ++l)
          for (const auto& rho : slots[l].states) {
            cd v = 0.0;
            for (std::size_t b = 0; b < rho.blocks().size(); ++b)
              v += (rho.block(b) * a[l].block(b)).trace();
            blocks.push_back(Mat::Constant(1, 1, v));
          }
        return Element(codomain, std::move(blocks));
      },
      f, spec_of("state_bundle", {{"slots", sj}}));
}

MapDescriptor center_trace(const std::vector<Shape>& shapes, bool conjugate_copy) {
  if (shapes.empty()) throw InputError("center_trace needs at least one slot");
  int p = 0;
  for (const auto& s : shapes) p += static_cast<int>(s.block_count());
  Shape codomain = commutative_shape(conjugate_copy ? 2 * p : p);
  ClaimedFlags f;
  f.tracial = true;
  f.vanishes_at_zero = true;
  if (!conjugate_copy) {
    f = cp_flags();
    f.tracial = true;
    f.vanishes_at_zero = true;
  }
  f.unital = true;
  Linearity lin = conjugate_copy ? Linearity::opaque(1) : Linearity::linear();
  return MapDescriptor(
      conjugate_copy ? "center_trace_bundle" : "center_trace", shapes, codomain, lin,
      [codomain, conjugate_copy](std::span<const Element> a) {
        std::vector<cd> c;
        for (const auto& x : a) {
          auto cx = center_coordinates(x);
          c.insert(c.end(), cx.begin(), cx.end());
        }
        if (conjugate_copy) {
          std::size_t p = c.size();
          for (std::size_t i = 0; i < p; ++i) c.push_back(std::conj(c[i]));
        }
        return Element::center_lift(codomain, c);
      },
      f,
      spec_of("center_trace", {{"shapes", shapes_json(shapes)}, {"conjugate_copy", conjugate_copy}}));
}

MapDescriptor tracial_linear(const Shape& domain, const std::vector<Element>& coefficients) {
  if (coefficients.size() != domain.block_count())
    throw InputError("tracial_linear needs one coefficient per block");
  Shape codomain = coefficients[0].shape();
  Element unit = Element::zero(codomain);
  for (std::size_t b = 0; b < coefficients.size(); ++b) {
    if (!(coefficients[b].shape() == codomain)) throw ShapeMismatch("tracial_linear coefficients");
    unit += static_cast<double>(domain.dim(b)) * coefficients[b];
  }
  ClaimedFlags f;
  if (all_psd(coefficients)) f = cp_flags();
  f.tracial = true;
  f.unital = is_unit(unit);
  f.vanishes_at_zero = true;
  return MapDescriptor(
      "tracial_linear", {domain}, codomain, Linearity::linear(),
      [coefficients, codomain](std::span<const Element> a) {
        Element out = Element::zero(codomain);
        for (std::size_t b = 0; b < coefficients.size(); ++b)
          out += trace_of(a[0].block(b)) * coefficients[b];
        return out;
      },
      f,
      spec_of("tracial_linear",
              {{"shape", shape_to_json(domain)}, {"coefficients", elements_json(coefficients)}}));
}

MapDescriptor tracial_multilinear(const std::vector<Shape>& shapes,
                                  const std::vector<TracialTerm>& terms) {
  if (terms.empty()) throw InputError("tracial_multilinear needs at least one term");
  Shape codomain = terms[0].coefficient.shape();
  json tj = json::array();
  std::vector<Element> coeffs;
  Element unit = Element::zero(codomain);
  for (const auto& t : terms) {
    if (t.blocks.size() != shapes.size()) throw InputError("term needs one block index per slot");
    double dims = 1.0;
    for (std::size_t l = 0; l < shapes.size(); ++l) {
      if (t.blocks[l] < 0 || t.blocks[l] >= static_cast<int>(shapes[l].block_count()))
        throw InputError("term block index out of range");
      dims *= shapes[l].dim(t.blocks[l]);
    }
    if (!(t.coefficient.shape() == codomain)) throw ShapeMismatch("term coefficient shape");
    unit += dims * t.coefficient;
    coeffs.push_back(t.coefficient);
    tj.push_back({{"blocks", t.blocks}, {"coefficient", element_to_json(t.coefficient)}});
  }
  ClaimedFlags f;
  if (all_psd(coeffs)) f = cp_flags();
  f.tracial = true;
  f.unital = is_unit(unit);
  f.vanishes_at_zero = true;
  return MapDescriptor(
      "tracial_multilinear", shapes, codomain,
      shapes.size() == 1 ? Linearity::linear() : Linearity::multilinear(),
      [terms, codomain](std::span<const Element> a) {
        Element out = Element::zero(codomain);
        for (const auto& t : terms) {
          cd c = 1.0;
          for (std::size_t l = 0; l < a.size(); ++l) c *= trace_of(a[l].block(t.blocks[l]));
          out += c * t.coefficient;
        }
        return out;
      },
      f, spec_of("tracial_multilinear", {{"shapes", shapes_json(shapes)}, {"terms", tj}}));
}

MapDescriptor cp_multilinear(const std::vector<Shape>& shapes, const Mat& v) {
  long big = 1;
  for (const auto& s : shapes) big *= s.trace_dimension();
  if (v.rows() != big) throw ShapeMismatch("cp_multilinear: isometry rows must equal the tensor dimension");
  int c = static_cast<int>(v.cols());
  ClaimedFlags f = cp_flags();
  f.unital = (v.adjoint() * v - Mat::Identity(c, c)).norm() <= 1e-10;
  f.vanishes_at_zero = true;
  return MapDescriptor(
      "cp_multilinear", shapes, Shape{c},
      shapes.size() == 1 ? Linearity::linear() : Linearity::multilinear(),
      [v](std::span<const Element> a) {
        Mat t = to_dense(a[0]);
        for (std::size_t l = 1; l < a.size(); ++l) t = to_dense(tensor(Element(t), Element(to_dense(a[l])))) ;
        return Element(Mat(v.adjoint() * t * v));
      },
      f, spec_of("cp_multilinear", {{"shapes", shapes_json(shapes)}, {"isometry", matrix_to_json(v)}}));
}

MapDescriptor tensor_map(const std::vector<Shape>& shapes) {
  if (shapes.empty()) throw InputError("tensor needs at least one slot");
  Shape codomain = shapes[0];
  for (std::size_t l = 1; l < shapes.size(); ++l) codomain = tensor_shape(codomain, shapes[l]);
  ClaimedFlags f = cp_flags();
  f.unital = true;
  f.vanishes_at_zero = true;
  return MapDescriptor(
      "tensor", shapes, codomain, shapes.size() == 1 ? Linearity::linear() : Linearity::multilinear(),
      [](std::span<const Element> a) {
        Element out = a[0];
        for (std::size_t l = 1; l < a.size(); ++l) out = tensor(out, a[l]);
        return out;
      },
      f, spec_of("tensor", {{"shapes", shapes_json(shapes)}}));
}

MapDescriptor product(const Shape& s, int arity) {
  if (arity < 1) throw InputError("product arity must be positive");
  ClaimedFlags f;
  f.unital = true;
  f.vanishes_at_zero = true;
  if (s.is_commutative()) {
    f = cp_flags();
    f.unital = true;
    f.vanishes_at_zero = true;
  }
  return MapDescriptor(
      "product", std::vector<Shape>(arity, s), s,
      arity == 1 ? Linearity::linear() : Linearity::multilinear(),
      [](std::span<const Element> a) {
        Element out = a[0];
        for (std::size_t l = 1; l < a.size(); ++l) out = out * a[l];
        return out;
      },
      f, spec_of("product", {{"shape", shape_to_json(s)}, {"arity", arity}}));
}

MapDescriptor schur_product(const Shape& s, int arity) {
  if (arity < 1) throw InputError("schur_product arity must be positive");
  ClaimedFlags f;
  f.vanishes_at_zero = true;
  return MapDescriptor(
      "schur_product", std::vector<Shape>(arity, s), s,
      arity == 1 ? Linearity::linear() : Linearity::multilinear(),
      [](std::span<const Element> a) {
        Element out = a[0];
        for (std::size_t l = 1; l < a.size(); ++l) out = schur(out, a[l]);
        return out;
      },
      f, spec_of("schur_product", {{"shape", shape_to_json(s)}, {"arity", arity}}));
}

MapDescriptor hadamard_power(int m, const std::vector<double>& alphas, bool conjugate) {
  if (alphas.empty()) throw InputError("hadamard_power needs at least one exponent");
  for (double a : alphas)
    if (!(a > 0) || !std::isfinite(a)) throw InputError("hadamard_power exponents must be positive");
  Shape s{m};
  return MapDescriptor(
      conjugate ? "conjugate_power" : "hadamard_power",
      std::vector<Shape>(alphas.size(), s), s, Linearity::opaque(),
      [alphas, conjugate, m](std::span<const Element> a) {
        Mat out = Mat::Ones(m, m);
        for (std::size_t l = 0; l < alphas.size(); ++l) {
          double e = conjugate ? 2 * alphas[l] : alphas[l];
          const Mat& x = a[l].block(0);
          for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) out(i, j) *= std::pow(std::abs(x(i, j)), e);
        }
        return Element(out);
      },
      {}, spec_of("hadamard_power", {{"dim", m}, {"alphas", alphas}, {"conjugate", conjugate}}));
}

MapDescriptor transpose_tensor(int d) {
  Shape s{d};
  ClaimedFlags f;
  f.positive = true;
  f.unital = true;
  f.vanishes_at_zero = true;
  return MapDescriptor(
      "transpose_tensor", {s, s}, Shape{d * d}, Linearity::multilinear(),
      [](std::span<const Element> a) { return tensor(a[0].transpose(), a[1].transpose()); }, f,
      spec_of("transpose_tensor", {{"dim", d}}));
}

MapDescriptor projection(const Shape& s, int arity) {
  if (arity < 2) throw InputError("projection needs arity at least 2");
  std::vector<Shape> outs(arity - 1, s);
  ClaimedFlags f;
  f.vanishes_at_zero = true;
  f.unital = true;
  return MapDescriptor(
      "projection", std::vector<Shape>(arity, s), concat(outs), Linearity::linear(),
      [](std::span<const Element> a) { return join_concat(a.first(a.size() - 1)); }, f,
      spec_of("projection", {{"shape", shape_to_json(s)}, {"arity", arity}}));
}

MapDescriptor operator_norm(const Shape& s) {
  return MapDescriptor(
      "operator_norm", {s}, Shape{1}, Linearity::opaque(1),
      [](std::span<const Element> a) { return Element(Mat::Constant(1, 1, a[0].norm())); }, {},
      spec_of("operator_norm", {{"shape", shape_to_json(s)}}));
}

MapDescriptor monomial(int p, const Shape& codomain, const std::vector<MonomialTerm>& terms) {
  if (p < 1) throw InputError("monomial needs a positive center dimension");
  json tj = json::array();
  std::vector<Element> coeffs;
  Element unit = Element::zero(codomain);
  bool has_constant = false;
  int degree = 0;
  for (const auto& t : terms) {
    if (static_cast<int>(t.exponents.size()) != p) throw InputError("monomial exponent length");
    if (!(t.coefficient.shape() == codomain)) throw ShapeMismatch("monomial coefficient shape");
    int deg = 0;
    for (int e : t.exponents) {
      if (e < 0) throw InputError("monomial exponents must be nonnegative");
      deg += e;
    }
    degree = std::max(degree, deg);
    has_constant = has_constant || deg == 0;
    unit += t.coefficient;
    coeffs.push_back(t.coefficient);
    tj.push_back({{"exponents", t.exponents}, {"coefficient", element_to_json(t.coefficient)}});
  }
  ClaimedFlags f;
  if (!has_constant && all_psd(coeffs)) f = cp_flags();
  f.unital = is_unit(unit);
  f.vanishes_at_zero = !has_constant;
  Shape domain = commutative_shape(p);
  return MapDescriptor(
      "monomial", {domain}, codomain, Linearity::polynomial(std::max(degree, 1)),
      [terms, codomain](std::span<const Element> a) {
        Element out = Element::zero(codomain);
        for (const auto& t : terms) {
          cd c = 1.0;
          for (std::size_t b = 0; b < t.exponents.size(); ++b)
            if (t.exponents[b]) c *= std::pow(a[0].block(b)(0, 0), t.exponents[b]);
          out += c * t.coefficient;
        }
        return out;
      },
      f,
      spec_of("monomial", {{"center_dim", p}, {"codomain", shape_to_json(codomain)}, {"terms", tj}}));
}

MapDescriptor center_multilinear(const std::vector<int>& slot_dims,
                                 const std::vector<Element>& coefficients) {
  if (slot_dims.empty()) throw InputError("center_multilinear needs at least one slot");
  std::size_t total = 1;
  std::vector<Shape> shapes;
  for (int p : slot_dims) {
    if (p < 1) throw InputError("center dimensions must be positive");
    total *= p;
    shapes.push_back(commutative_shape(p));
  }
  if (coefficients.size() != total) throw InputError("center_multilinear coefficient count");
  Shape codomain = coefficients[0].shape();
  Element unit = Element::zero(codomain);
  for (const auto& c : coefficients) {
    if (!(c.shape() == codomain)) throw ShapeMismatch("center_multilinear coefficient shape");
    unit += c;
  }
  ClaimedFlags f;
  if (all_psd(coefficients)) f = cp_flags();
  f.unital = is_unit(unit);
  f.vanishes_at_zero = true;
  if (f.completely_positive()) f.dm_order = kUnbounded;
  return MapDescriptor(
      "center_multilinear", shapes, codomain,
      slot_dims.size() == 1 ? Linearity::linear() : Linearity::multilinear(),
      [slot_dims, coefficients, codomain](std::span<const Element> a) {
        Element out = Element::zero(codomain);
        std::vector<int> idx(slot_dims.size(), 0);
        for (const auto& q : coefficients) {
          cd c = 1.0;
          for (std::size_t l = 0; l < idx.size(); ++l) c *= a[l].block(idx[l])(0, 0);
          if (c != 0.0) out += c * q;
          for (int pos = static_cast<int>(idx.size()) - 1; pos >= 0; --pos) {
            if (++idx[pos] < slot_dims[pos]) break;
            idx[pos] = 0;
          }
        }
        return out;
      },
      f,
      spec_of("center_multilinear",
              {{"slot_dims", slot_dims}, {"coefficients", elements_json(coefficients)}}));
}

MapDescriptor tracial_polynomial(int d, const std::vector<TracePolynomialTerm>& terms,
                                 const Element& p) {
  if (terms.empty()) throw InputError("tracial_polynomial needs at least one term");
  int degree = 0;
  bool nonneg = true, constant = false;
  json tj = json::array();
  cd unit_sum = 0.0;
  for (const auto& t : terms) {
    if (t.m < 0 || t.n < 0) throw InputError("tracial_polynomial degrees must be nonnegative");
    degree = std::max(degree, t.m + t.n);
    nonneg = nonneg && t.coefficient.imag() == 0.0 && t.coefficient.real() >= 0.0;
    constant = constant || (t.m + t.n == 0);
    unit_sum += t.coefficient;
    tj.push_back({{"m", t.m}, {"n", t.n}, {"coefficient", {t.coefficient.real(), t.coefficient.imag()}}});
  }
  ClaimedFlags f;
  if (nonneg && is_positive(p).positive) f = cp_flags();
  f.tracial = true;
  f.vanishes_at_zero = !constant;
  f.unital = is_unit(unit_sum * p);
  Linearity lin = Linearity::polynomial(std::max(degree, 1));
  if (terms.size() == 1) lin = Linearity::mixed(terms[0].m, terms[0].n);
  return MapDescriptor(
      "tracial_polynomial", {Shape{d}}, p.shape(), lin,
      [terms, p, d](std::span<const Element> a) {
        cd z = a[0].block(0).trace() / static_cast<double>(d);
        cd s = 0.0;
        for (const auto& t : terms)
          s += t.coefficient * std::pow(z, t.m) * std::pow(std::conj(z), t.n);
        return s * p;
      },
      f,
      spec_of("tracial_polynomial", {{"dim", d}, {"terms", tj}, {"matrix", element_to_json(p)}}));
}

MapDescriptor compose(const MapDescriptor& outer, const MapDescriptor& inner) {
  Shape joined = concat(outer.domain_shapes());
  if (!(joined == inner.codomain()))
    throw ShapeMismatch("compose: inner codomain " + inner.codomain().str() +
                        " does not match outer domain " + joined.str());
  const Linearity& li = inner.linearity();
  const Linearity& lo = outer.linearity();
  Linearity lin = Linearity::opaque(std::max(li.degree, 1) * std::max(lo.degree, 1));
  if (li.kind == LinearityKind::linear) {
    if (lo.kind == LinearityKind::linear) {
      lin = Linearity::linear();
    } else if (lo.kind == LinearityKind::multilinear && outer.arity() == inner.arity()) {
      lin = Linearity::multilinear();
    } else if (outer.arity() == 1) {
      lin = lo;
    }
  }
  const ClaimedFlags& fi = inner.flags();
  const ClaimedFlags& fo = outer.flags();
  ClaimedFlags f;
  f.positive = fi.positive && fo.positive;
  f.n_positive = std::min(fi.n_positive, fo.n_positive);
  f.unital = fi.unital && fo.unital;
  f.tracial = fi.tracial;
  f.vanishes_at_zero = fo.vanishes_at_zero && fi.vanishes_at_zero;
  if (fi.positive && li.kind == LinearityKind::linear && inner.codomain().is_commutative())
    f.dm_order = fo.n_positive;
  std::vector<Shape> outer_shapes = outer.domain_shapes();
  return MapDescriptor(
      outer.name() + "_o_" + inner.name(), inner.domain_shapes(), outer.codomain(), lin,
      [outer, inner, outer_shapes](std::span<const Element> a) {
        Element mid = inner(a);
        if (outer_shapes.size() == 1) return outer(mid);
        Args parts = split_concat(mid, outer_shapes);
        return outer(parts);
      },
      f, json{{"kind", "composite"}, {"params", {{"outer", outer.spec()}, {"inner", inner.spec()}}}});
}

}  // namespace opmap::maps
