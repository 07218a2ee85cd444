#include "opmap/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "opmap/decomposition.hpp"
#include "opmap/element_io.hpp"
#include "opmap/gallery.hpp"
#include "opmap/map_spec.hpp"
#include "opmap/random.hpp"
#include "opmap/uncertainty.hpp"

namespace opmap::cli {

namespace fs = std::filesystem;

namespace {

TrialOptions trial_options(const RunConfig& c) {
  TrialOptions o;
  o.trials = c.trials;
  o.seed = c.seed;
  o.tol = c.tol;
  o.threads = c.threads;
  o.real_inputs = c.real_inputs;
  return o;
}

Notion notion_from(const std::string& kind, int n) {
  if (kind.find('(') != std::string::npos) return Notion::parse(kind);
  if (n < 1) throw InputError("n must be a positive integer");
  if (kind == "type1") return Notion::type1(n);
  if (kind == "type2") return Notion::type2(n);
  if (kind == "choi") return {Notion::Kind::choi_exact, n};
  throw InputError("unknown notion: " + kind);
}

std::vector<Args> spec_probes(const json& spec) {
  if (!spec.contains("witness")) return {};
  const json& w = spec["witness"];
  if (!w.is_array()) throw InputError("witness must be an array of elements");
  Args a;
  for (const auto& e : w) a.push_back(element_from_json(e));
  return {a};
}

CsvRow row_of(const PositivityReport& r) {
  return {r.check + ":" + r.notion.str(), verdict_name(r.verdict), r.min_eig, r.seed, r.trials};
}

// ---- uncertainty bundles ---------------------------------------------------

// An observable is an element object, a bare matrix (single block), or an
// array of elements (one per slot).
Args tuple_from(const json& j) {
  if (j.is_object()) return {element_from_json(j)};
  if (j.is_array() && !j.empty() && j[0].is_object()) {
    Args a;
    for (const auto& e : j) a.push_back(element_from_json(e));
    return a;
  }
  return {Element(matrix_from_json(j))};
}

Element element_from(const json& j) {
  Args a = tuple_from(j);
  if (a.size() != 1) throw InputError("expected a single element");
  return a[0];
}

cd complex_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw InputError("expected a complex number");
}

struct Bundle {
  json spec;
  MapDescriptor map;
  json observables;
  json density;
  std::uint64_t seed;

  // Each default draws from its own stream so that the set of checks requested
  // does not change the others' inputs.
  Rng stream(std::uint64_t k) const { return Rng(trial_seed(seed, k)); }

  Args tuple(const char* key, std::uint64_t k) const {
    if (observables.contains(key)) return tuple_from(observables[key]);
    Rng rng = stream(k);
    Args a;
    for (const auto& s : map.domain_shapes()) a.push_back(rng.hermitian(s));
    return a;
  }

  Element slot_element(const json& obj, const char* key, const Shape& s, std::uint64_t k) const {
    if (obj.contains(key)) return element_from(obj[key]);
    Rng rng = stream(k);
    return rng.hermitian(s);
  }

  Element rho() const {
    if (density.contains("rho")) return element_from(density["rho"]);
    Rng rng = stream(100);
    return rng.density(map.domain(0));
  }

  DensityOperator density_operator(const Tolerance& tol) const {
    std::string norm = density.value("normalization", std::string("trace_one"));
    if (norm == "trace_one") return DensityOperator::trace_one(rho(), tol);
    if (norm == "map_unital") return DensityOperator::map_unital(rho(), map, tol);
    throw InputError("unknown density normalization: " + norm);
  }

  SpectralFunctionPair pair() const {
    json p = density.value("pair", json{{"kind", "wyd"}, {"alpha", 0.5}});
    if (p.value("kind", std::string("wyd")) != "wyd") throw InputError("only the wyd pair is supported");
    return SpectralFunctionPair::wyd(p.value("alpha", 0.5));
  }
};

InequalityReport not_applicable(const std::string& quantity, const std::string& reason) {
  InequalityReport r;
  r.quantity = quantity;
  r.verdict = InequalityVerdict::not_applicable;
  r.margin = 0.0;
  r.witness = nullptr;
  r.details = {{"reason", reason}};
  return r;
}

std::vector<InequalityReport> run_check(const std::string& check, const Bundle& b, const Tolerance& tol) {
  const MapDescriptor& map = b.map;
  try {
    if (check == "vc") {
      Args x = b.tuple("a", 1), y = b.tuple("b", 2);
      try {
        return {vc_report(map, x, y, tol)};
      } catch (const PreconditionError& e) {
        // Evaluated anyway: a failure then exhibits the missing property.
        PsdResult r = is_positive(vc_matrix(map, x, y), tol);
        InequalityReport rep;
        rep.quantity = "vc_matrix";
        rep.margin = r.min_eig;
        rep.verdict = r.positive ? InequalityVerdict::holds : InequalityVerdict::violated;
        json a = json::array(), bj = json::array();
        for (const auto& e : x) a.push_back(element_to_json(e));
        for (const auto& e : y) bj.push_back(element_to_json(e));
        rep.witness = {{"a", a}, {"b", bj}};
        rep.details = {{"herm_deviation", r.herm_deviation}, {"precondition", e.what()}};
        return {rep};
      }
    }
    if (check == "schrodinger") {
      Args x = b.tuple("a", 1), y = b.tuple("b", 2);
      if (x.size() != 1 || y.size() != 1) throw PreconditionError("Schrodinger relation needs one slot");
      return {schrodinger_margin(map, x[0], y[0], tol)};
    }
    if (check == "heisenberg") return heisenberg_suite(map, b.tuple("a", 1), b.tuple("b", 2), tol);
    if (check == "pvc") return {pvc_report(map, b.tuple("a", 1), b.tuple("b", 2), tol)};
    if (check == "composite") {
      json c = b.observables.value("composite", json::object());
      CompositeObservables o;
      o.i = c.value("i", 0);
      o.j = c.value("j", 1);
      if (o.i < 0 || o.j < 0 || o.i >= map.arity() || o.j >= map.arity())
        throw PreconditionError("composite slots out of range");
      o.a = b.slot_element(c, "a", map.domain(o.i), 3);
      o.b = b.slot_element(c, "b", map.domain(o.j), 4);
      o.c = b.slot_element(c, "c", map.domain(o.i), 5);
      o.d = b.slot_element(c, "d", map.domain(o.j), 6);
      return {composite_report(map, o, tol), composite_product_margin(map, o, tol)};
    }
    if (check == "skew") {
      Args x = b.tuple("a", 1), y = b.tuple("b", 2);
      if (x.size() != 1 || y.size() != 1) throw PreconditionError("skew information needs one slot");
      return {skew_report(map, b.density_operator(tol), b.pair(), x[0], y[0], tol)};
    }
    if (check == "varbound") {
      int slot = b.observables.value("slot", 0);
      if (slot < 0 || slot >= map.arity()) throw PreconditionError("varbound slot out of range");
      Element x = b.observables.contains("x") ? element_from(b.observables["x"]) : b.tuple("a", 1).at(slot);
      if (map.arity() == 1) return {variance_upper_bound(map, x, tol)};
      return {variance_upper_bound(map, slot, x, tol)};
    }
    if (check == "tensor_bound") {
      json t = b.observables.value("tensor", json::object());
      TensorObservables o;
      if (t.contains("dim_a") && t.contains("dim_b")) {
        o.dim_a = t["dim_a"].get<int>();
        o.dim_b = t["dim_b"].get<int>();
      } else {
        int d = map.domain(0).dim(0);
        int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(d))));
        if (r * r != d) throw PreconditionError("tensor_bound needs dim_a and dim_b");
        o.dim_a = o.dim_b = r;
      }
      o.a = b.slot_element(t, "a", Shape{o.dim_a}, 7);
      o.c = b.slot_element(t, "c", Shape{o.dim_a}, 8);
      o.b = b.slot_element(t, "b", Shape{o.dim_b}, 9);
      o.d = b.slot_element(t, "d", Shape{o.dim_b}, 10);
      if (t.contains("alpha")) o.alpha = complex_from(t["alpha"]);
      if (t.contains("beta")) o.beta = complex_from(t["beta"]);
      return {tensor_uncertainty_bound(map, o, tol)};
    }
  } catch (const PreconditionError& e) {
    return {not_applicable(check, e.what())};
  }
  throw InputError("unknown check: " + check);
}

const std::vector<std::string> kChecks = {"vc",   "schrodinger", "heisenberg", "pvc",
                                          "composite", "skew", "varbound", "tensor_bound"};

// ---- fuzz checkpoints --------------------------------------------------------

struct FuzzState {
  long round = 0;
  long spent = 0;
  std::vector<long> cursors;
  std::vector<bool> done;
  std::vector<std::optional<PositivityReport>> reports;
};

json identity_of(const json& spec, const std::vector<std::string>& notions, long chunk,
                 const RunConfig& c) {
  return {{"spec", spec},
          {"notions", notions},
          {"seed", c.seed},
          {"chunk", chunk},
          {"tolerance", tolerance_to_json(c.tol)},
          {"real_inputs", c.real_inputs}};
}

json state_to_json(const json& identity, const FuzzState& s) {
  json j = identity;
  j["format"] = "opmap-fuzz-checkpoint/1";
  j["round"] = s.round;
  j["spent"] = s.spent;
  j["cursors"] = s.cursors;
  j["done"] = s.done;
  json reps = json::array();
  for (const auto& r : s.reports) reps.push_back(r ? report_to_json(*r) : json(nullptr));
  j["reports"] = reps;
  return j;
}

FuzzState state_from_json(const json& j, const json& identity) {
  for (const auto& [key, value] : identity.items())
    if (!j.contains(key) || j[key] != value)
      throw InputError("checkpoint was written under a different configuration (" + key + ")");
  FuzzState s;
  s.round = j.at("round").get<long>();
  s.spent = j.at("spent").get<long>();
  s.cursors = j.at("cursors").get<std::vector<long>>();
  s.done = j.at("done").get<std::vector<bool>>();
  for (const auto& r : j.at("reports"))
    s.reports.push_back(r.is_null() ? std::nullopt : std::optional(report_from_json(r)));
  return s;
}

void write_atomic(const std::string& path, const std::string& text) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::trunc);
    if (!f) throw InputError("cannot write " + tmp);
    f << text;
    if (!f.flush()) throw InputError("cannot write " + tmp);
  }
  fs::rename(tmp, path);
}

void merge(PositivityReport& acc, const PositivityReport& r) {
  acc.trials += r.trials;
  acc.herm_deviation = std::max(acc.herm_deviation, r.herm_deviation);
  if (r.verdict == Verdict::violated) {
    acc.verdict = Verdict::violated;
    acc.min_eig = r.min_eig;
    acc.witness = r.witness;
    acc.witness_trial = r.witness_trial;
  } else if (acc.verdict != Verdict::violated) {
    acc.min_eig = std::min(acc.min_eig, r.min_eig);
    if (r.verdict == Verdict::certified_positive) {
      acc.verdict = Verdict::certified_positive;
      acc.notion = r.notion;
    }
  }
}

}  // namespace

RunConfig RunConfig::defaults() {
  RunConfig c;
  if (const char* env = std::getenv("OPMAP_DEFAULT_TOL")) {
    try {
      c.tol.psd = std::stod(env);
    } catch (const std::exception&) {
      throw InputError(std::string("OPMAP_DEFAULT_TOL is not a number: ") + env);
    }
    c.tol.validate();
  }
  return c;
}

std::string to_csv(const std::vector<CsvRow>& rows) {
  std::ostringstream s;
  s.precision(17);
  s << "check,verdict,margin,seed,trials\n";
  for (const auto& r : rows)
    s << r.check << ',' << r.verdict << ',' << r.margin << ',' << r.seed << ',' << r.trials << '\n';
  return s.str();
}

CommandResult cmd_check(const std::string& spec_path, const std::string& notion, int n,
                        const RunConfig& config) {
  json spec = read_json_file(spec_path);
  Notion nt = notion_from(notion, n);
  MapDescriptor map = build_map(spec);
  // A stored witness only applies at the order it was written for.
  std::vector<Args> probes;
  for (auto& a : spec_probes(spec)) {
    bool fits = a.size() == map.domain_shapes().size();
    for (std::size_t s = 0; fits && s < a.size(); ++s)
      fits = a[s].shape() == map.domain(static_cast<int>(s)).amplified(nt.n);
    if (fits && nt.kind != Notion::Kind::choi_exact) probes.push_back(std::move(a));
  }
  PositivityReport r = test_positive(map, nt, trial_options(config), probes);
  CommandResult out;
  out.exit_code = r.violated() ? kViolation : kPass;
  out.output = {{"map", map.spec()}, {"tolerance", tolerance_to_json(config.tol)},
                {"report", report_to_json(r)}};
  out.rows = {row_of(r)};
  return out;
}

CommandResult cmd_decompose(const std::string& spec_path, int degree, const RunConfig& config) {
  MapDescriptor map = load_map(spec_path);
  DecompositionOptions o;
  o.seed = config.seed;
  o.tol = config.tol.psd;
  o.threads = config.threads;
  CommandResult out;
  TracialDecomposition d = [&] {
    if (degree < 0 && map.linearity().is_multilinear()) return decompose_tracial(map, o);
    int D = degree < 0 ? map.linearity().degree : degree;
    return decompose_tracial_nonlinear(map, D, o);
  }();
  out.output = decomposition_to_json(d);
  if (!map.linearity().is_multilinear()) {
    ExtractionOptions eo;
    eo.degree = degree < 0 ? map.linearity().degree : degree;
    eo.seed = config.seed;
    auto table = extract_homogeneous_components(map, eo);
    Element id = Element::identity(map.domain(0));
    json comps = json::array();
    for (const auto& [key, value] : table.evaluate_all(id))
      comps.push_back({{"m", key.first}, {"n", key.second}, {"norm_at_identity", value.norm()}});
    out.output["components"] = comps;
  }
  out.exit_code = d.certified ? kPass : kViolation;
  out.rows = {{"decompose", d.certified ? "certified" : "not_certified", d.residual, d.seed, d.samples}};
  return out;
}

CommandResult cmd_uncertainty(const std::string& bundle_path, const std::vector<std::string>& checks,
                              const RunConfig& config) {
  json j = read_json_file(bundle_path);
  if (!j.is_object() || !j.contains("map")) throw InputError("bundle must be an object with a map");
  Bundle b{j["map"], build_map(j["map"]), j.value("observables", json::object()),
           j.value("density", json::object()), j.value("seed", config.seed)};
  if (b.density.value("compress", false))
    b.map = density_compression(b.map, DensityOperator::map_unital(b.rho(), b.map, config.tol));
  std::vector<std::string> list = checks;
  if (list.empty()) list = j.value("checks", kChecks);
  for (const auto& c : list)
    if (std::find(kChecks.begin(), kChecks.end(), c) == kChecks.end())
      throw InputError("unknown check: " + c);

  CommandResult out;
  out.output = json::array();
  for (const auto& c : list) {
    for (auto& r : run_check(c, b, config.tol)) {
      r.seed = b.seed;
      if (r.verdict == InequalityVerdict::violated) out.exit_code = kViolation;
      out.rows.push_back({r.quantity, inequality_verdict_name(r.verdict), r.margin, r.seed, 0});
      out.output.push_back(inequality_to_json(r));
    }
  }
  return out;
}

CommandResult cmd_gallery_list() {
  CommandResult out;
  out.output = json::array();
  for (const auto& c : gallery::list_cases()) {
    out.output.push_back(gallery::case_to_json(c));
    out.rows.push_back({c.id, verdict_name(c.expected), 0.0, 0, 0});
  }
  return out;
}

namespace {

gallery::RunOptions gallery_options(const RunConfig& c) {
  gallery::RunOptions o;
  o.seed = c.seed;
  o.trials = c.trials_given ? c.trials : -1;
  o.threads = c.threads;
  o.tol = c.tol;
  return o;
}

CsvRow row_of(const gallery::CaseResult& r) {
  return {r.id, verdict_name(r.report.verdict), r.report.min_eig, r.report.seed, r.report.trials};
}

}  // namespace

CommandResult cmd_gallery_run(const std::string& id, const json& params, const RunConfig& config) {
  auto r = gallery::run_case(id, params, gallery_options(config));
  CommandResult out;
  out.output = gallery::result_to_json(r);
  out.exit_code = r.matches() ? kPass : kViolation;
  out.rows = {row_of(r)};
  return out;
}

CommandResult cmd_gallery_all(const RunConfig& config) {
  auto results = gallery::reproduce_all(gallery_options(config));
  CommandResult out;
  out.output = gallery::summary_table(results);
  out.output["seed"] = config.seed;
  out.exit_code = out.output["all_match"].get<bool>() ? kPass : kViolation;
  for (const auto& r : results) out.rows.push_back(row_of(r));
  return out;
}

CommandResult cmd_fuzz(const std::string& spec_path, const std::vector<std::string>& notions,
                       long budget, long chunk, const RunConfig& config) {
  if (notions.empty()) throw InputError("fuzz needs at least one notion");
  if (budget < 0 || chunk < 1) throw InputError("budget must be nonnegative and chunk positive");
  json spec = read_json_file(spec_path);
  MapDescriptor map = build_map(spec);
  std::vector<Notion> ns;
  for (const auto& s : notions) ns.push_back(Notion::parse(s));
  const std::size_t k = ns.size();
  json identity = identity_of(spec, notions, chunk, config);

  FuzzState st;
  if (config.checkpoint && fs::exists(*config.checkpoint)) {
    st = state_from_json(read_json_file(*config.checkpoint), identity);
    if (st.cursors.size() != k || st.done.size() != k || st.reports.size() != k)
      throw InputError("checkpoint does not match the notion list");
  } else {
    st.cursors.assign(k, 0);
    st.done.assign(k, false);
    st.reports.assign(k, std::nullopt);
  }
  auto violated = [&] {
    return std::any_of(st.reports.begin(), st.reports.end(),
                       [](const auto& r) { return r && r->violated(); });
  };
  auto probes = spec_probes(spec);

  while (st.spent < budget && !violated() &&
         std::find(st.done.begin(), st.done.end(), false) != st.done.end()) {
    std::size_t i = static_cast<std::size_t>(st.round % static_cast<long>(k));
    ++st.round;
    if (st.done[i]) continue;
    TrialOptions o = trial_options(config);
    // Each notion draws from its own stream.
    o.seed = config.seed ^ (static_cast<std::uint64_t>(i) << 40);
    o.first_trial = st.cursors[i];
    o.trials = std::min(chunk, budget - st.spent);
    PositivityReport r = test_positive(map, ns[i], o, st.cursors[i] == 0 ? probes : std::vector<Args>{});
    if (!st.reports[i]) {
      PositivityReport acc = r;
      acc.trials = 0;
      acc.min_eig = std::numeric_limits<double>::infinity();
      acc.herm_deviation = 0.0;
      acc.verdict = Verdict::exhausted_trials;
      acc.witness.reset();
      acc.witness_trial = -1;
      st.reports[i] = acc;
    }
    merge(*st.reports[i], r);
    st.cursors[i] += r.trials;
    st.spent += r.trials;
    if (r.verdict == Verdict::certified_positive) st.done[i] = true;
    if (config.checkpoint) write_atomic(*config.checkpoint, state_to_json(identity, st).dump());
  }

  CommandResult out;
  json reps = json::array();
  for (std::size_t i = 0; i < k; ++i) {
    if (!st.reports[i]) {
      reps.push_back({{"notion", ns[i].str()}, {"verdict", "not_started"}, {"trials", 0}});
      out.rows.push_back({"positivity:" + ns[i].str(), "not_started", 0.0, config.seed, 0});
      continue;
    }
    reps.push_back(report_to_json(*st.reports[i]));
    out.rows.push_back(row_of(*st.reports[i]));
  }
  out.exit_code = violated() ? kViolation : kPass;
  out.output = {{"map", spec},
                {"seed", config.seed},
                {"budget", budget},
                {"spent", st.spent},
                {"rounds", st.round},
                {"verdict", violated() ? "violated" : "no_violation"},
                {"reports", reps},
                {"checkpoint", config.checkpoint ? json(*config.checkpoint) : json(nullptr)}};
  return out;
}

void emit(const CommandResult& r, const RunConfig& config, std::ostream& out) {
  std::string text = config.format == Format::csv ? to_csv(r.rows) : r.output.dump(2) + "\n";
  if (config.out) {
    std::ofstream f(*config.out, std::ios::trunc);
    if (!f) throw InputError("cannot write " + *config.out);
    f << text;
  } else {
    out << text;
  }
}

namespace {

json param_value(const std::string& v) {
  try {
    return json::parse(v);
  } catch (const json::parse_error&) {
    return v;
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char ch : s) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (ch != ' ') {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = RunConfig::defaults();
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  CLI::App app{"Positivity, decomposition and uncertainty checks for maps between matrix algebras",
               "opmap"};
  app.fallthrough();
  app.require_subcommand(1);
  std::string seed_text, format = "json";
  std::optional<double> tol;
  std::string out_path, checkpoint;
  app.add_option("--seed", seed_text, "Master seed (decimal or 0x hex; default 0xC5A1)");
  auto* trials_opt = app.add_option("--trials", config.trials, "Randomized trials per check")
                         ->check(CLI::PositiveNumber);
  app.add_option("--tol", tol, "PSD tolerance (default 1e-9, or OPMAP_DEFAULT_TOL)");
  app.add_option("--out", out_path, "Write the report here instead of stdout");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--threads", config.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--checkpoint", checkpoint, "Fuzz checkpoint file");
  app.add_flag("--real", config.real_inputs, "Sample real symmetric inputs");

  std::string path, notion = "type2", checks_text, notions_text = "type2(1)", case_id;
  int n = 1, degree = -1;
  long budget = 100000, chunk = 1000;
  std::vector<std::string> params;

  auto* check = app.add_subcommand("check", "Test n-positivity of a map spec");
  check->add_option("spec", path, "Map spec JSON")->required();
  check->add_option("--notion", notion, "type1, type2 or choi (or e.g. type2(3))");
  check->add_option("--n", n, "Amplification order");

  auto* decompose = app.add_subcommand("decompose", "Tracial decomposition of a map spec");
  decompose->add_option("spec", path, "Map spec JSON")->required();
  decompose->add_option("--degree,-D", degree, "Degree bound for nonlinear maps");

  auto* uncertainty = app.add_subcommand("uncertainty", "Uncertainty inequalities for a bundle");
  uncertainty->add_option("bundle", path, "Bundle JSON")->required();
  uncertainty->add_option("--checks", checks_text, "Comma-separated subset of checks");

  auto* gallery = app.add_subcommand("gallery", "Named examples with expected verdicts");
  gallery->require_subcommand(1);
  auto* glist = gallery->add_subcommand("list", "List cases");
  auto* grun = gallery->add_subcommand("run", "Run one case");
  grun->add_option("id", case_id, "Case id")->required();
  grun->add_option("--param", params, "Parameter override k=v (repeatable)");
  auto* gall = gallery->add_subcommand("all", "Run every case and the threshold brackets");

  auto* fuzz = app.add_subcommand("fuzz", "Round-robin randomized search with checkpoints");
  fuzz->add_option("spec", path, "Map spec JSON")->required();
  fuzz->add_option("--notions", notions_text, "Comma-separated notions, e.g. type2(1),type1(2)");
  fuzz->add_option("--budget", budget, "Total trial budget");
  fuzz->add_option("--chunk", chunk, "Trials per round")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (!seed_text.empty()) {
      std::size_t used = 0;
      config.seed = std::stoull(seed_text, &used, 0);
      if (used != seed_text.size()) throw InputError("invalid seed: " + seed_text);
    }
    config.trials_given = trials_opt->count() > 0;
    if (tol) {
      config.tol.psd = *tol;
      config.tol.validate();
    }
    if (!out_path.empty()) config.out = out_path;
    if (!checkpoint.empty()) config.checkpoint = checkpoint;
    config.format = format == "csv" ? Format::csv : Format::json;

    CommandResult r;
    if (*check) {
      r = cmd_check(path, notion, n, config);
    } else if (*decompose) {
      r = cmd_decompose(path, degree, config);
    } else if (*uncertainty) {
      r = cmd_uncertainty(path, split_list(checks_text), config);
    } else if (*glist) {
      r = cmd_gallery_list();
    } else if (*grun) {
      json p = json::object();
      for (const auto& kv : params) {
        auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw InputError("--param expects k=v, got " + kv);
        p[kv.substr(0, eq)] = param_value(kv.substr(eq + 1));
      }
      r = cmd_gallery_run(case_id, p, config);
    } else if (*gall) {
      r = cmd_gallery_all(config);
    } else if (*fuzz) {
      r = cmd_fuzz(path, split_list(notions_text), budget, chunk, config);
    }
    emit(r, config, out);
    return r.exit_code;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const json::exception& e) {
    err << "error: malformed input: " << e.what() << "\n";
    return kInputError;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kViolation;
  }
}

}  // namespace opmap::cli
