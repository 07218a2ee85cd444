#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "opmap/map_model.hpp"

namespace opmap::gallery {

struct CaseRecord {
  std::string id;
  std::string description;
  std::string claim;     // the statement the case exhibits
  std::string notion;    // default notion, e.g. "type2(2)"
  Verdict expected = Verdict::violated;  // under default parameters
  bool has_witness = false;
  json parameters = json::object();      // defaults
};

struct RunOptions {
  std::uint64_t seed = 0xC5A1;
  long trials = -1;  // -1: the case default
  int threads = 1;
  Tolerance tol{};
};

struct CaseResult {
  std::string id;
  json parameters;
  Verdict expected = Verdict::violated;
  PositivityReport report;
  json details = json::object();

  bool matches() const { return report.verdict == expected; }
};

json case_to_json(const CaseRecord& c);
json result_to_json(const CaseResult& r);

// Sorted by id.
std::vector<CaseRecord> list_cases();
const CaseRecord& find_case(const std::string& id);

// params override the case defaults key by key. Unknown ids and keys raise
// InputError.
CaseResult run_case(const std::string& id, const json& params = json::object(),
                    const RunOptions& opts = {});

// Every case on its defaults, then the Hadamard threshold brackets for
// (m, n) in {(2,1), (3,1), (2,2)}.
std::vector<CaseResult> reproduce_all(const RunOptions& opts = {});
json summary_table(const std::vector<CaseResult>& results);

// Rank-two matrices J + eps x x^T (J all ones) on M_N(R), scaled to unit norm.
std::vector<Mat> fitzgerald_probes(int n);

}  // namespace opmap::gallery
