#include "opmap/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <tuple>

#include "opmap/element_io.hpp"
#include "opmap/maps.hpp"

namespace opmap::gallery {

namespace {

struct Plan {
  Plan(MapDescriptor m, Notion n, Verdict v) : map(std::move(m)), notion(n), expected(v) {}

  MapDescriptor map;
  Notion notion;
  Verdict expected;
  std::vector<Args> probes;
  long default_trials = 1000;
  bool real_inputs = false;
  bool complex_population = false;  // also sample complex inputs, reported in details
  json details = json::object();
};

using Builder = std::function<Plan(const json& params)>;

struct Entry {
  CaseRecord record;
  Builder build;
};

int int_param(const json& p, const char* key) {
  const json& v = p.at(key);
  if (!v.is_number()) throw InputError(std::string("parameter ") + key + " must be a number");
  double d = v.get<double>();
  if (d != std::floor(d)) throw InputError(std::string("parameter ") + key + " must be an integer");
  return static_cast<int>(d);
}

double real_param(const json& p, const char* key) {
  const json& v = p.at(key);
  if (!v.is_number()) throw InputError(std::string("parameter ") + key + " must be a number");
  return v.get<double>();
}

void require(bool ok, const std::string& what) {
  if (!ok) throw InputError(what);
}

bool is_integer(double a) { return a == std::floor(a); }

Element ones(int d) { return Element(Mat::Ones(d, d)); }

// Probe tuples for an entrywise power map: slot `slot` carries the probe, the
// others the all-ones matrix, which the Schur product leaves alone.
std::vector<Args> power_probes(int m, int n, int k, int slot) {
  std::vector<Args> out;
  for (const Mat& p : fitzgerald_probes(n * m)) {
    Args a(k, ones(n * m));
    a[slot] = Element(p);
    out.push_back(std::move(a));
  }
  return out;
}

// Entrywise power on M_m, tested for type-2 n-positivity. `exponent` is the
// effective real power (2 alpha for the conjugate variant).
Plan power_plan(const json& p, bool conjugate) {
  int m = int_param(p, "m"), n = int_param(p, "n"), k = int_param(p, "k");
  double alpha = real_param(p, "alpha");
  require(m >= 1 && n >= 1 && k >= 1, "m, n and k must be positive");
  require(alpha > 0 && std::isfinite(alpha), "alpha must be positive");
  std::vector<double> alphas(k, alpha);
  double threshold = n * m - 2;
  double exponent = conjugate ? 2 * alpha : alpha;

  Plan plan{maps::hadamard_power(m, alphas, conjugate), Notion::type2(n), Verdict::exhausted_trials};
  plan.details = {{"threshold", threshold}, {"exponent", exponent}};
  if (alpha >= threshold) {
    plan.expected = Verdict::exhausted_trials;
  } else if (is_integer(exponent) && static_cast<long>(exponent) % 2 == 0) {
    // |x|^(2j) is the Schur product of x^j and its conjugate.
    plan.expected = Verdict::exhausted_trials;
  } else if (!is_integer(exponent) && exponent < threshold) {
    // Real symmetric inputs reduce to the real entrywise power.
    plan.expected = Verdict::violated;
  } else {
    throw InputError("no expected verdict for this exponent below the threshold");
  }
  plan.probes = power_probes(m, n, k, 0);
  plan.real_inputs = !conjugate;
  plan.complex_population = !conjugate;
  plan.default_trials = conjugate ? 2000 : 10000;
  return plan;
}

Args lambda_witness(int k) {
  Args w(k, Element::identity(Shape{2}));
  w.front() = -w.front();
  w.back() = -w.back();
  return w;
}

// C[0,1] sampled at p uniform points, as the commutative algebra C^p inside
// M_2(C^p) = p copies of M_2.
Args c01_tuple(int p) {
  Shape s(std::vector<int>(p, 2));
  std::vector<Mat> a1, one, a4;
  for (int i = 0; i < p; ++i) {
    double x = p == 1 ? 1.0 : static_cast<double>(i) / (p - 1);
    Mat m1(2, 2), m4(2, 2);
    m1 << x, x, 1, 0;
    m4 << x, 1, x, 0;
    a1.push_back(m1);
    a4.push_back(m4);
    one.push_back(Mat::Ones(2, 2));
  }
  return {Element(s, a1), Element(s, one), Element(s, one), Element(s, a4)};
}

const std::vector<Entry>& catalog() {
  static const std::vector<Entry> entries = [] {
    std::vector<Entry> e;

    e.push_back({{"c01_hadamard_type1",
                  "Schur product of four matrices over C[0,1], sampled at p points",
                  "the tuple ([[x,x],[1,0]], J, J, [[x,1],[x,0]]) maps to [[x^2,x],[x,0]], not positive",
                  "type1(1)", Verdict::violated, true, {{"p", 32}}},
                 [](const json& p) {
                   int pts = int_param(p, "p");
                   require(pts >= 2, "p must be at least 2");
                   Shape s(std::vector<int>(pts, 2));
                   Plan plan{maps::schur_product(s, 4), Notion::type1(1), Verdict::violated};
                   plan.probes = {c01_tuple(pts)};
                   return plan;
                 }});

    e.push_back({{"conjugate_power",
                  "Schur product of entrywise |x|^(2 alpha) maps on M_m(C)",
                  "n-positive when alpha >= nm - 2", "type2(n)", Verdict::exhausted_trials, false,
                  {{"m", 2}, {"n", 2}, {"k", 2}, {"alpha", 2.0}}},
                 [](const json& p) { return power_plan(p, true); }});

    e.push_back({{"hadamard_power_threshold",
                  "Schur product of entrywise |x|^alpha maps on M_m(R)",
                  "n-positive iff alpha >= nm - 2, for non-integer alpha", "type2(n)",
                  Verdict::violated, true, {{"m", 3}, {"n", 1}, {"k", 1}, {"alpha", 0.5}}},
                 [](const json& p) { return power_plan(p, false); }});

    e.push_back({{"product_Pi_commutative",
                  "product map on the commutative algebra C^3",
                  "completely positive of type 2 on a commutative domain", "type2(n)",
                  Verdict::exhausted_trials, false, {{"k", 2}, {"n", 3}}},
                 [](const json& p) {
                   int k = int_param(p, "k"), n = int_param(p, "n");
                   require(k >= 1 && n >= 1, "k and n must be positive");
                   return Plan{maps::product(Shape{1, 1, 1}, k), Notion::type2(n),
                               Verdict::exhausted_trials};
                 }});

    e.push_back({{"product_Pi_type1_cp", "product map (A_1, ..., A_k) -> A_1 ... A_k on M_2",
                  "completely positive of type 1", "type1(n)", Verdict::exhausted_trials, false,
                  {{"k", 3}, {"n", 3}}},
                 [](const json& p) {
                   int k = int_param(p, "k"), n = int_param(p, "n");
                   require(k >= 1 && n >= 1, "k and n must be positive");
                   return Plan{maps::product(Shape{2}, k), Notion::type1(n),
                               Verdict::exhausted_trials};
                 }});

    e.push_back({{"product_Pi_type2", "product map on M_2 under type-2 positivity",
                  "not positive of type 2 on a noncommutative algebra", "type2(1)",
                  Verdict::violated, true, {{"k", 2}}},
                 [](const json& p) {
                   int k = int_param(p, "k");
                   require(k >= 2, "k must be at least 2");
                   Plan plan{maps::product(Shape{2}, k), Notion::type2(1), Verdict::violated};
                   Mat e11 = Mat::Zero(2, 2);
                   e11(0, 0) = 1;
                   Args w(k, Element(Mat(Mat::Ones(2, 2) / 2.0)));
                   w[0] = Element(e11);
                   plan.probes = {w};
                   return plan;
                 }});

    e.push_back({{"projection_Lambda", "(A_1, ..., A_k) -> (A_1, ..., A_{k-1}) on M_2, k even",
                  "Lambda(-I, I, ..., I, -I) = (-I, I, ..., I) is not positive", "type1(1)",
                  Verdict::violated, true, {{"k", 4}}},
                 [](const json& p) {
                   int k = int_param(p, "k");
                   require(k >= 2 && k % 2 == 0, "k must be even and at least 2");
                   Plan plan{maps::projection(Shape{2}, k), Notion::type1(1), Verdict::violated};
                   plan.probes = {lambda_witness(k)};
                   return plan;
                 }});

    e.push_back({{"theta_transpose_tensor", "(A, B) -> A^T (x) B^T on M_2",
                  "positive, but Theta_2(E, E) is not positive for E = [E_ij]", "type2(n)",
                  Verdict::violated, true, {{"n", 2}}},
                 [](const json& p) {
                   int n = int_param(p, "n");
                   require(n >= 1, "n must be positive");
                   Plan plan{maps::transpose_tensor(2), Notion::type2(n),
                             n >= 2 ? Verdict::violated : Verdict::exhausted_trials};
                   if (n >= 2) {
                     Element e = matrix_unit_block(2, n);
                     plan.probes = {Args{e, e}};
                   }
                   return plan;
                 }});
    return e;
  }();
  return entries;
}

const Entry& find_entry(const std::string& id) {
  for (const auto& e : catalog())
    if (e.record.id == id) return e;
  throw InputError("unknown case: " + id);
}

json merged_params(const CaseRecord& rec, const json& overrides) {
  json out = rec.parameters;
  if (overrides.is_null()) return out;
  if (!overrides.is_object()) throw InputError("case parameters must be an object");
  for (const auto& [key, value] : overrides.items()) {
    if (!out.contains(key)) throw InputError("case " + rec.id + " has no parameter " + key);
    out[key] = value;
  }
  return out;
}

json population_json(const PositivityReport& r) {
  return {{"verdict", verdict_name(r.verdict)}, {"min_eig", r.min_eig}, {"trials", r.trials}};
}

}  // namespace

std::vector<Mat> fitzgerald_probes(int n) {
  std::vector<Mat> out;
  if (n < 1) return out;
  std::vector<Eigen::VectorXd> xs;
  Eigen::VectorXd a(n), b(n), c(n);
  for (int i = 0; i < n; ++i) {
    double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    a(i) = t;
    b(i) = 2 * t - 1;
    c(i) = i;
  }
  xs = {a, b, c};
  for (const auto& x : xs) {
    for (double eps : {2.0, 1.0, 0.5, 0.25, 0.1, 0.05}) {
      Eigen::MatrixXd m = Eigen::MatrixXd::Ones(n, n) + eps * x * x.transpose();
      Mat z = m.cast<cd>();
      out.push_back(z / Element(z).norm());
    }
  }
  return out;
}

json case_to_json(const CaseRecord& c) {
  return {{"id", c.id},
          {"description", c.description},
          {"claim", c.claim},
          {"notion", c.notion},
          {"expected", verdict_name(c.expected)},
          {"stored_witness", c.has_witness},
          {"parameters", c.parameters}};
}

json result_to_json(const CaseResult& r) {
  return {{"id", r.id},
          {"parameters", r.parameters},
          {"expected", verdict_name(r.expected)},
          {"observed", verdict_name(r.report.verdict)},
          {"matches", r.matches()},
          {"margin", r.report.min_eig},
          {"report", report_to_json(r.report)},
          {"details", r.details}};
}

std::vector<CaseRecord> list_cases() {
  std::vector<CaseRecord> out;
  for (const auto& e : catalog()) out.push_back(e.record);
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.id < y.id; });
  return out;
}

const CaseRecord& find_case(const std::string& id) { return find_entry(id).record; }

CaseResult run_case(const std::string& id, const json& params, const RunOptions& opts) {
  const Entry& e = find_entry(id);
  json p = merged_params(e.record, params);
  Plan plan = e.build(p);

  TrialOptions t;
  t.seed = opts.seed;
  t.trials = opts.trials >= 0 ? opts.trials : plan.default_trials;
  t.threads = opts.threads;
  t.tol = opts.tol;
  t.real_inputs = plan.real_inputs;

  CaseResult r;
  r.id = id;
  r.parameters = p;
  r.expected = plan.expected;
  r.report = test_positive(plan.map, plan.notion, t, plan.probes);
  r.details = plan.details;
  if (plan.complex_population) {
    r.details["real"] = population_json(r.report);
    t.real_inputs = false;
    r.details["complex"] = population_json(test_positive(plan.map, plan.notion, t));
  }
  return r;
}

std::vector<CaseResult> reproduce_all(const RunOptions& opts) {
  std::vector<CaseResult> out;
  for (const auto& c : list_cases()) out.push_back(run_case(c.id, json::object(), opts));
  const std::vector<std::tuple<int, int, double>> brackets = {
      {2, 1, 0.5}, {2, 1, 1.5}, {3, 1, 0.5}, {3, 1, 1.0}, {3, 1, 3.0},
      {2, 2, 1.5}, {2, 2, 2.0}, {2, 2, 2.5}};
  for (auto [m, n, alpha] : brackets)
    out.push_back(run_case("hadamard_power_threshold", {{"m", m}, {"n", n}, {"alpha", alpha}}, opts));
  return out;
}

json summary_table(const std::vector<CaseResult>& results) {
  json rows = json::array();
  bool all = true;
  for (const auto& r : results) {
    rows.push_back({{"case", r.id},
                    {"parameters", r.parameters},
                    {"expected", verdict_name(r.expected)},
                    {"observed", verdict_name(r.report.verdict)},
                    {"margin", r.report.min_eig},
                    {"matches", r.matches()}});
    all = all && r.matches();
  }
  return {{"cases", rows}, {"all_match", all}};
}

}  // namespace opmap::gallery
