#include "opmap/map_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <regex>

#include "opmap/parallel.hpp"
#include "opmap/random.hpp"

namespace opmap {

namespace {

constexpr long kChunk = 128;

Args random_tuple(const std::vector<Shape>& shapes, Rng& rng) {
  Args out;
  for (const auto& s : shapes) out.push_back(rng.gaussian(s));
  return out;
}

double output_scale(std::initializer_list<const Element*> xs) {
  double s = 1.0;
  for (const Element* x : xs) s = std::max(s, x->norm());
  return s;
}

struct Outcome {
  bool ok = true;
  double min_eig = std::numeric_limits<double>::infinity();
  double herm = 0.0;
  Args input;
};

Outcome judge(const Element& subject, Args input, const Tolerance& tol) {
  auto r = is_positive(subject, tol);
  return {r.positive, r.min_eig, r.herm_deviation, std::move(input)};
}

// Runs trials in fixed-size chunks so that the first witness (lowest trial
// index) and the running minimum do not depend on the worker count.
template <class F>
PositivityReport run_trials(PositivityReport rep, const TrialOptions& opts, F&& trial_fn) {
  rep.seed = opts.seed;
  rep.verdict = Verdict::exhausted_trials;
  rep.min_eig = std::numeric_limits<double>::infinity();
  rep.trials = 0;
  std::vector<Outcome> outcomes;
  for (long start = 0; start < opts.trials; start += kChunk) {
    long count = std::min(kChunk, opts.trials - start);
    outcomes.assign(count, Outcome{});
    parallel_for(static_cast<std::size_t>(count), opts.threads, [&](std::size_t i) {
      long t = opts.first_trial + start + static_cast<long>(i);
      Rng rng(trial_seed(opts.seed, static_cast<std::uint64_t>(t)));
      outcomes[i] = trial_fn(rng, t);
    });
    for (long i = 0; i < count; ++i) {
      auto& o = outcomes[i];
      rep.trials = start + i + 1;
      if (!o.ok) {
        rep.verdict = Verdict::violated;
        rep.min_eig = o.min_eig;
        rep.herm_deviation = o.herm;
        rep.witness = std::move(o.input);
        rep.witness_trial = opts.first_trial + start + i;
        return rep;
      }
      if (o.min_eig < rep.min_eig) {
        rep.min_eig = o.min_eig;
        rep.herm_deviation = o.herm;
      }
    }
  }
  if (opts.trials <= 0) rep.min_eig = 0.0;
  return rep;
}

bool is_linear_single_block(const MapDescriptor& map) {
  return map.arity() == 1 && map.domain(0).block_count() == 1 &&
         map.linearity().is_multilinear();
}

void require_unital(const MapDescriptor& map, const Tolerance& tol, const char* who) {
  Element u = map(identity_tuple(map));
  if (!(u.shape() == map.codomain()) ||
      (u - Element::identity(map.codomain())).norm() > std::max(tol.herm, 1e-9) * (1 + u.norm()))
    throw PreconditionError(std::string(who) + ": map is not unital");
}

}  // namespace

// ---- Linearity / flags --------------------------------------------------

std::string Linearity::str() const {
  switch (kind) {
    case LinearityKind::linear: return "linear";
    case LinearityKind::multilinear: return "multilinear";
    case LinearityKind::mixed_homogeneous:
      return "mixed_homogeneous(" + std::to_string(m) + "," + std::to_string(n) + ")";
    case LinearityKind::polynomial: return "polynomial(" + std::to_string(degree) + ")";
    case LinearityKind::opaque: return "opaque(" + std::to_string(degree) + ")";
  }
  return "opaque";
}

Linearity Linearity::parse(const std::string& s) {
  static const std::regex two(R"(mixed_homogeneous\((\d+),(\d+)\))");
  static const std::regex one(R"((polynomial|opaque)\((\d+)\))");
  std::smatch mt;
  if (s == "linear") return linear();
  if (s == "multilinear") return multilinear();
  if (s == "opaque") return opaque();
  if (std::regex_match(s, mt, two)) return mixed(std::stoi(mt[1]), std::stoi(mt[2]));
  if (std::regex_match(s, mt, one)) {
    int d = std::stoi(mt[2]);
    return mt[1] == "polynomial" ? polynomial(d) : opaque(d);
  }
  throw InputError("unknown linearity class: " + s);
}

json flags_to_json(const ClaimedFlags& f) {
  json j = json::object();
  j["unital"] = f.unital;
  j["tracial"] = f.tracial;
  j["positive"] = f.positive;
  j["n_positive"] = f.completely_positive() ? json("cp") : json(f.n_positive);
  j["dm_order"] = f.dm_order >= kUnbounded ? json("inf") : json(f.dm_order);
  j["vanishes_at_zero"] = f.vanishes_at_zero;
  return j;
}

ClaimedFlags flags_from_json(const json& j) {
  ClaimedFlags f;
  if (j.is_null()) return f;
  if (!j.is_object()) throw InputError("claims must be an object");
  f.unital = j.value("unital", false);
  f.tracial = j.value("tracial", false);
  f.positive = j.value("positive", false);
  f.vanishes_at_zero = j.value("vanishes_at_zero", false);
  if (j.contains("n_positive")) {
    const auto& v = j["n_positive"];
    f.n_positive = v.is_string() ? (v == "cp" ? kUnbounded : throw InputError("bad n_positive"))
                                 : v.get<int>();
  }
  if (j.value("completely_positive", false)) f.n_positive = kUnbounded;
  if (j.contains("dm_order")) {
    const auto& v = j["dm_order"];
    f.dm_order = v.is_string() ? (v == "inf" ? kUnbounded : throw InputError("bad dm_order"))
                               : v.get<int>();
  }
  if (f.n_positive > 0) f.positive = true;
  return f;
}

// ---- MapDescriptor ------------------------------------------------------

MapDescriptor::MapDescriptor(std::string name, std::vector<Shape> domains, Shape codomain,
                             Linearity linearity, Evaluator evaluator, ClaimedFlags flags,
                             json spec)
    : name_(std::move(name)),
      domains_(std::move(domains)),
      codomain_(std::move(codomain)),
      linearity_(linearity),
      evaluator_(std::move(evaluator)),
      flags_(flags),
      spec_(std::move(spec)) {
  if (domains_.empty()) throw InputError("map arity must be positive");
  if (!evaluator_) throw InputError("map needs an evaluator");
}

bool MapDescriptor::homogeneous_domains() const {
  return std::all_of(domains_.begin(), domains_.end(),
                     [&](const Shape& s) { return s == domains_.front(); });
}

Element MapDescriptor::operator()(std::span<const Element> args) const {
  if (static_cast<int>(args.size()) != arity())
    throw ShapeMismatch(name_ + ": expected " + std::to_string(arity()) + " arguments, got " +
                        std::to_string(args.size()));
  for (int i = 0; i < arity(); ++i)
    if (!(args[i].shape() == domains_[i]))
      throw ShapeMismatch(name_ + ": argument " + std::to_string(i) + " has shape " +
                          args[i].shape().str() + ", expected " + domains_[i].str());
  Element out = evaluator_(args);
  if (!(out.shape() == codomain_))
    throw ShapeMismatch(name_ + ": evaluator returned shape " + out.shape().str());
  return out;
}

Element MapDescriptor::operator()(const Element& a) const { return (*this)(std::span(&a, 1)); }

Element MapDescriptor::operator()(const Element& a, const Element& b) const {
  Args args{a, b};
  return (*this)(args);
}

MapDescriptor MapDescriptor::with_flags(ClaimedFlags flags) const {
  MapDescriptor m = *this;
  m.flags_ = flags;
  m.registered_ = false;
  return m;
}

MapDescriptor MapDescriptor::with_name(std::string name) const {
  MapDescriptor m = *this;
  m.name_ = std::move(name);
  return m;
}

MapDescriptor MapDescriptor::with_spec(json spec) const {
  MapDescriptor m = *this;
  m.spec_ = std::move(spec);
  return m;
}

Args identity_tuple(const MapDescriptor& map) {
  Args a;
  for (const auto& s : map.domain_shapes()) a.push_back(Element::identity(s));
  return a;
}

Args zero_tuple(const MapDescriptor& map) {
  Args a;
  for (const auto& s : map.domain_shapes()) a.push_back(Element::zero(s));
  return a;
}

// ---- Registration -------------------------------------------------------

MapDescriptor register_map(MapDescriptor map, const RegistrationOptions& opts) {
  Rng rng(opts.seed);
  const double tol = opts.tol;
  auto fail = [&](const std::string& what) {
    throw RegistrationError(map.name() + ": claim refuted at registration: " + what);
  };
  const Linearity& lin = map.linearity();
  const int k = map.arity();

  for (int t = 0; t < opts.trials; ++t) {
    Args a = random_tuple(map.domain_shapes(), rng);
    Args b = random_tuple(map.domain_shapes(), rng);
    cd z = rng.complex_normal();
    Element fa = map(a);
    if (lin.kind == LinearityKind::linear) {
      Args sum, scaled;
      for (int i = 0; i < k; ++i) {
        sum.push_back(a[i] + b[i]);
        scaled.push_back(z * a[i]);
      }
      Element fb = map(b);
      double scale = output_scale({&fa, &fb}) * (1 + std::abs(z));
      if ((map(sum) - fa - fb).norm() > tol * scale) fail("additivity");
      if ((map(scaled) - z * fa).norm() > tol * scale) fail("homogeneity");
    } else if (lin.kind == LinearityKind::multilinear) {
      for (int i = 0; i < k; ++i) {
        Args sum = a, other = a, scaled = a;
        sum[i] = a[i] + b[i];
        other[i] = b[i];
        scaled[i] = z * a[i];
        Element fo = map(other);
        double scale = output_scale({&fa, &fo}) * (1 + std::abs(z));
        if ((map(sum) - fa - fo).norm() > tol * scale)
          fail("additivity in slot " + std::to_string(i));
        if ((map(scaled) - z * fa).norm() > tol * scale)
          fail("homogeneity in slot " + std::to_string(i));
      }
    } else if (lin.kind == LinearityKind::mixed_homogeneous) {
      Args scaled;
      for (const auto& x : a) scaled.push_back(z * x);
      cd factor = std::pow(z, lin.m) * std::pow(std::conj(z), lin.n);
      double scale = output_scale({&fa}) * (1 + std::abs(factor));
      if ((map(scaled) - factor * fa).norm() > tol * scale) fail("mixed homogeneity");
    }
  }

  const ClaimedFlags& f = map.flags();
  if (f.unital) {
    Element u = map(identity_tuple(map));
    if ((u - Element::identity(map.codomain())).norm() > tol * (1 + u.norm())) fail("unital");
  }
  if (f.vanishes_at_zero && map(zero_tuple(map)).norm() > tol) fail("vanishes at zero");
  if (f.tracial) {
    TrialOptions to;
    to.trials = opts.trials;
    to.seed = opts.seed;
    to.tol.eq = tol;
    if (!test_tracial(map, to).tracial) fail("tracial");
  }
  int n = f.completely_positive() ? 3 : std::min(f.n_positive, 3);
  if (n == 0 && f.positive) n = 1;
  if (n > 0) {
    TrialOptions po;
    po.trials = opts.positivity_trials;
    po.seed = opts.seed;
    po.tol.psd = po.tol.herm = tol;
    Notion notion = Notion::type2(n);
    if (is_linear_single_block(map) && f.completely_positive())
      notion = Notion::type2(map.domain(0).dim(0));
    if (test_positive(map, notion, po).violated())
      fail(notion.str() + " positivity");
  }
  map.registered_ = true;
  return map;
}

// ---- Notions and reports ------------------------------------------------

std::string Notion::str() const {
  switch (kind) {
    case Kind::type1: return "type1(" + std::to_string(n) + ")";
    case Kind::type2: return "type2(" + std::to_string(n) + ")";
    case Kind::choi_exact: return "choi_exact";
  }
  return "type2(1)";
}

Notion Notion::parse(const std::string& s) {
  static const std::regex re(R"((type1|type2)\((-?\d+)\))");
  std::smatch mt;
  if (s == "choi_exact") return {Kind::choi_exact, 1};
  if (!std::regex_match(s, mt, re)) throw InputError("unknown notion: " + s);
  int n = std::stoi(mt[2]);
  if (n < 1) throw InputError("notion order must be positive: " + s);
  return {mt[1] == "type1" ? Kind::type1 : Kind::type2, n};
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::certified_positive: return "certified_positive";
    case Verdict::violated: return "violated";
    case Verdict::exhausted_trials: return "exhausted_trials";
  }
  return "exhausted_trials";
}

Verdict parse_verdict(const std::string& s) {
  if (s == "certified_positive") return Verdict::certified_positive;
  if (s == "violated") return Verdict::violated;
  if (s == "exhausted_trials") return Verdict::exhausted_trials;
  throw InputError("unknown verdict: " + s);
}

json report_to_json(const PositivityReport& r) {
  json j;
  j["check"] = r.check;
  j["verdict"] = verdict_name(r.verdict);
  j["notion"] = r.notion.str();
  if (r.notion.kind == Notion::Kind::choi_exact) j["order"] = r.notion.n;
  j["min_eig"] = r.min_eig;
  j["herm_deviation"] = r.herm_deviation;
  j["trials"] = r.trials;
  j["seed"] = r.seed;
  j["witness_trial"] = r.witness_trial;
  if (r.witness) {
    json w = json::array();
    for (const auto& e : *r.witness) w.push_back(element_to_json(e));
    j["witness"] = std::move(w);
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

PositivityReport report_from_json(const json& j) {
  PositivityReport r;
  r.check = j.value("check", std::string("positivity"));
  r.verdict = parse_verdict(j.at("verdict").get<std::string>());
  r.notion = Notion::parse(j.at("notion").get<std::string>());
  if (r.notion.kind == Notion::Kind::choi_exact) r.notion.n = j.value("order", 1);
  r.min_eig = j.at("min_eig").get<double>();
  r.herm_deviation = j.value("herm_deviation", 0.0);
  r.trials = j.value("trials", 0L);
  r.seed = j.value("seed", std::uint64_t{0});
  r.witness_trial = j.value("witness_trial", -1L);
  if (j.contains("witness") && !j["witness"].is_null()) {
    Args w;
    for (const auto& e : j["witness"]) w.push_back(element_from_json(e));
    r.witness = std::move(w);
  }
  return r;
}

// ---- Amplifications -----------------------------------------------------

Element amplify_type2(const MapDescriptor& map, int n, std::span<const Element> args) {
  if (static_cast<int>(args.size()) != map.arity()) throw ShapeMismatch("amplify_type2: arity mismatch");
  std::vector<std::vector<std::vector<Element>>> parts;
  for (int s = 0; s < map.arity(); ++s) {
    if (!(args[s].shape() == map.domain(s).amplified(n)))
      throw ShapeMismatch("amplify_type2: argument " + std::to_string(s) + " is not on " +
                          map.domain(s).amplified(n).str());
    parts.push_back(split_block_matrix(args[s], n));
  }
  std::vector<std::vector<Element>> out(n);
  Args tuple(map.arity());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      for (int s = 0; s < map.arity(); ++s) tuple[s] = parts[s][i][j];
      out[i].push_back(map(tuple));
    }
  return block_matrix(out);
}

Element amplify_type1(const MapDescriptor& map, int n, std::span<const Element> args) {
  if (!map.homogeneous_domains())
    throw InputError("amplify_type1 requires identical domain algebras in every slot");
  const int k = map.arity();
  if (static_cast<int>(args.size()) != k) throw ShapeMismatch("amplify_type1: arity mismatch");
  std::vector<std::vector<std::vector<Element>>> parts;
  for (int s = 0; s < k; ++s) {
    if (!(args[s].shape() == map.domain(s).amplified(n)))
      throw ShapeMismatch("amplify_type1: argument shape mismatch");
    parts.push_back(split_block_matrix(args[s], n));
  }
  std::vector<std::vector<Element>> out(n);
  std::vector<int> inner(std::max(k - 1, 0));
  Args tuple(k);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Element acc = Element::zero(map.codomain());
      std::fill(inner.begin(), inner.end(), 0);
      while (true) {
        for (int s = 0; s < k; ++s) {
          int row = s == 0 ? i : inner[s - 1];
          int col = s == k - 1 ? j : inner[s];
          tuple[s] = parts[s][row][col];
        }
        acc += map(tuple);
        int pos = static_cast<int>(inner.size()) - 1;
        while (pos >= 0 && ++inner[pos] == n) inner[pos--] = 0;
        if (pos < 0) break;
      }
      out[i].push_back(std::move(acc));
    }
  }
  return block_matrix(out);
}

// ---- Kraus / Choi -------------------------------------------------------

void KrausSet::validate() const {
  if (operators.empty()) throw InputError("Kraus set must be nonempty");
  for (const auto& v : operators)
    if (v.rows() != operators[0].rows() || v.cols() != operators[0].cols() || v.size() == 0)
      throw InputError("Kraus operators must share dimensions");
}

Mat KrausSet::unit_image() const {
  validate();
  Mat s = Mat::Zero(codomain_dim(), codomain_dim());
  for (const auto& v : operators) s += v * v.adjoint();
  return s;
}

bool KrausSet::unital(double tol) const {
  Mat s = unit_image();
  return (s - Mat::Identity(s.rows(), s.cols())).norm() <= tol;
}

KrausSet KrausSet::normalized() const {
  Mat s = unit_image();
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (s + s.adjoint()));
  if (es.eigenvalues()(0) <= 1e-12)
    throw NumericalError("Kraus set cannot be made unital: sum V V* is singular");
  Eigen::VectorXd inv = es.eigenvalues().cwiseSqrt().cwiseInverse();
  Mat root_inv = es.eigenvectors() * inv.cast<cd>().asDiagonal() * es.eigenvectors().adjoint();
  KrausSet out;
  for (const auto& v : operators) out.operators.push_back(root_inv * v);
  return out;
}

Element matrix_unit_block(int d, int n) {
  Mat m = Mat::Zero(n * d, n * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i * d + i, j * d + j) = 1.0;
  return Element(m);
}

ChoiMatrix choi_matrix(const MapDescriptor& map) {
  if (!is_linear_single_block(map))
    throw InputError("choi_matrix needs a linear map on a single matrix block");
  int d = map.domain(0).dim(0);
  std::vector<std::vector<Element>> entries(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Mat e = Mat::Zero(d, d);
      e(i, j) = 1.0;
      entries[i].push_back(map(Element(e)));
    }
  ChoiMatrix c{block_matrix(entries), d, map.codomain().trace_dimension()};
  return c;
}

PsdResult is_completely_positive_exact(const ChoiMatrix& choi, const Tolerance& tol) {
  return is_positive(choi.matrix, tol);
}

// ---- Testers ------------------------------------------------------------

Element check_subject(const MapDescriptor& map, const std::string& check, Notion notion,
                      std::span<const Element> w) {
  const int k = map.arity();
  if (check == "positivity") {
    if (notion.kind == Notion::Kind::type1) return amplify_type1(map, notion.n, w);
    return amplify_type2(map, notion.n, w);
  }
  if (check == "choi_inequality") {
    Args star, prod;
    for (const auto& a : w) {
      star.push_back(a.adjoint());
      prod.push_back(a.adjoint() * a);
    }
    return map(prod) - map(star) * map(w);
  }
  if (check == "superadditivity" || check == "monotonicity") {
    if (static_cast<int>(w.size()) != 2 * k) throw InputError("witness arity mismatch");
    Args a(w.begin(), w.begin() + k), b(w.begin() + k, w.end()), diff;
    for (int i = 0; i < k; ++i) diff.push_back(a[i] - b[i]);
    if (check == "monotonicity") return map(a) - map(b);
    return map(a) - map(b) - map(diff);
  }
  throw InputError("unknown check: " + check);
}

PsdResult replay_witness(const MapDescriptor& map, const PositivityReport& report,
                         const Tolerance& tol) {
  if (!report.witness) throw InputError("report has no witness");
  Notion n = report.notion;
  if (n.kind == Notion::Kind::choi_exact) n = Notion::type2(n.n);
  return is_positive(check_subject(map, report.check, n, *report.witness), tol);
}

PositivityReport test_positive(const MapDescriptor& map, Notion notion, const TrialOptions& opts,
                               const std::vector<Args>& probes) {
  if (notion.n < 1) throw InputError("positivity order must be positive");
  const int k = map.arity();
  const int n = notion.n;
  if (notion.kind == Notion::Kind::type1 && !map.homogeneous_domains())
    throw InputError("type1 positivity requires identical domain algebras");

  PositivityReport rep;
  rep.notion = notion;
  rep.seed = opts.seed;

  if (notion.kind == Notion::Kind::choi_exact ||
      (notion.kind == Notion::Kind::type2 && is_linear_single_block(map) &&
       n >= map.domain(0).dim(0))) {
    int d = map.domain(0).dim(0);
    int order = std::max(n, d);
    Args w{matrix_unit_block(d, order)};
    auto r = is_positive(amplify_type2(map, order, w), opts.tol);
    rep.notion = {Notion::Kind::choi_exact, order};
    rep.min_eig = r.min_eig;
    rep.herm_deviation = r.herm_deviation;
    rep.trials = 0;
    if (r.positive) {
      rep.verdict = Verdict::certified_positive;
    } else {
      rep.verdict = Verdict::violated;
      rep.witness = std::move(w);
    }
    return rep;
  }

  auto subject = [&](const Args& a) { return check_subject(map, "positivity", notion, a); };

  for (const auto& p : probes) {
    auto o = judge(subject(p), p, opts.tol);
    if (!o.ok) {
      rep.verdict = Verdict::violated;
      rep.min_eig = o.min_eig;
      rep.herm_deviation = o.herm;
      rep.witness = p;
      rep.witness_trial = -1;
      return rep;
    }
  }

  std::vector<Shape> amp;
  for (const auto& s : map.domain_shapes()) amp.push_back(s.amplified(n));

  if (notion.kind == Notion::Kind::type2) {
    return run_trials(rep, opts, [&](Rng& rng, long) {
      Args a;
      for (const auto& s : amp) a.push_back(rng.psd(s, opts.real_inputs));
      Element out = subject(a);
      return judge(out, std::move(a), opts.tol);
    });
  }
  return run_trials(rep, opts, [&](Rng& rng, long) {
    Args a(k);
    int half = k / 2;
    for (int i = 0; i < half; ++i) {
      a[i] = rng.gaussian(amp[i], opts.real_inputs);
      a[k - 1 - i] = a[i].adjoint();
    }
    if (k % 2 == 1) a[half] = rng.psd(amp[half], opts.real_inputs);
    Element out = subject(a);
    return judge(out, std::move(a), opts.tol);
  });
}

TracialReport test_tracial(const MapDescriptor& map, const TrialOptions& opts) {
  const int k = map.arity();
  TracialReport rep;
  rep.slot_residuals.assign(k, 0.0);
  std::vector<std::vector<double>> res(opts.trials, std::vector<double>(k + 2, 0.0));
  parallel_for(static_cast<std::size_t>(std::max(opts.trials, 0L)), opts.threads, [&](std::size_t t) {
    Rng rng(trial_seed(opts.seed, opts.first_trial + t));
    Args base = random_tuple(map.domain_shapes(), rng);
    Args a = random_tuple(map.domain_shapes(), rng);
    Args b = random_tuple(map.domain_shapes(), rng);
    double scale = 1.0;
    for (int s = 0; s < k; ++s) {
      Args x = base, y = base;
      x[s] = a[s] * b[s];
      y[s] = b[s] * a[s];
      Element fx = map(x), fy = map(y);
      res[t][s] = (fx - fy).norm();
      scale = std::max(scale, output_scale({&fx, &fy}));
    }
    Args x, y;
    for (int s = 0; s < k; ++s) {
      x.push_back(a[s] * b[s]);
      y.push_back(b[s] * a[s]);
    }
    Element fx = map(x), fy = map(y);
    res[t][k] = (fx - fy).norm();
    res[t][k + 1] = std::max(scale, output_scale({&fx, &fy}));
  });
  for (const auto& r : res) {
    for (int s = 0; s < k; ++s) rep.slot_residuals[s] = std::max(rep.slot_residuals[s], r[s]);
    rep.joint_residual = std::max(rep.joint_residual, r[k]);
    rep.scale = std::max(rep.scale, r[k + 1]);
  }
  rep.global_residual = rep.joint_residual;
  for (double r : rep.slot_residuals) rep.global_residual = std::max(rep.global_residual, r);
  rep.tracial = rep.global_residual <= opts.tol.eq * rep.scale;
  return rep;
}

PositivityReport test_choi_inequality(const MapDescriptor& map, InputClass inputs,
                                      const TrialOptions& opts) {
  require_unital(map, opts.tol, "test_choi_inequality");
  PositivityReport rep;
  rep.check = "choi_inequality";
  rep.notion = Notion::type2(inputs == InputClass::normal ? 1 : 2);
  return run_trials(rep, opts, [&](Rng& rng, long t) {
    Args a;
    for (const auto& s : map.domain_shapes()) {
      if (inputs == InputClass::arbitrary) {
        a.push_back(rng.gaussian(s));
      } else if (t % 2 == 0) {
        a.push_back(rng.hermitian(s));
      } else {
        Element u = rng.unitary(s);
        std::vector<Mat> diag;
        for (int d : s.dims()) {
          Vec v(d);
          for (int i = 0; i < d; ++i) v(i) = rng.complex_normal();
          diag.push_back(v.asDiagonal());
        }
        Element dg(s, std::move(diag));
        Element x = u * dg * u.adjoint();
        a.push_back((1.0 / std::max(x.norm(), 1e-300)) * x);
      }
    }
    Element out = check_subject(map, "choi_inequality", rep.notion, a);
    return judge(out, std::move(a), opts.tol);
  });
}

namespace {

PositivityReport ordered_pair_test(const MapDescriptor& map, const TrialOptions& opts,
                                   const std::string& check) {
  PositivityReport rep;
  rep.check = check;
  rep.notion = Notion::type2(1);
  return run_trials(rep, opts, [&](Rng& rng, long) {
    Args a, b;
    for (const auto& s : map.domain_shapes()) {
      Element bb = rng.psd(s);
      b.push_back(bb);
      a.push_back(bb + rng.psd(s));
    }
    Args w = a;
    w.insert(w.end(), b.begin(), b.end());
    Element out = check_subject(map, check, rep.notion, w);
    return judge(out, std::move(w), opts.tol);
  });
}

}  // namespace

PositivityReport test_superadditive(const MapDescriptor& map, const TrialOptions& opts) {
  if (!map.flags().at_least_n_positive(3))
    throw PreconditionError("test_superadditive: map must be claimed 3-positive");
  Element z = map(zero_tuple(map));
  if (z.norm() > opts.tol.psd)
    throw PreconditionError("test_superadditive: map does not vanish at zero");
  return ordered_pair_test(map, opts, "superadditivity");
}

PositivityReport test_monotone(const MapDescriptor& map, const TrialOptions& opts) {
  return ordered_pair_test(map, opts, "monotonicity");
}

double self_adjoint_residual(const MapDescriptor& map, const TrialOptions& opts) {
  std::vector<double> res(std::max(opts.trials, 0L), 0.0);
  parallel_for(res.size(), opts.threads, [&](std::size_t t) {
    Rng rng(trial_seed(opts.seed, opts.first_trial + t));
    Args a = random_tuple(map.domain_shapes(), rng), star;
    for (const auto& x : a) star.push_back(x.adjoint());
    Element fa = map(a), fs = map(star);
    res[t] = (fs - fa.adjoint()).norm() / output_scale({&fa, &fs});
  });
  double m = 0;
  for (double r : res) m = std::max(m, r);
  return m;
}

}  // namespace opmap
