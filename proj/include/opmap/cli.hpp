#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "opmap/map_model.hpp"

namespace opmap::cli {

enum ExitCode { kPass = 0, kViolation = 1, kInputError = 2 };

enum class Format { json, csv };

struct RunConfig {
  std::uint64_t seed = 0xC5A1;
  long trials = 1000;
  bool trials_given = false;  // gallery cases keep their own budgets otherwise
  Tolerance tol{};
  std::optional<std::string> out;
  Format format = Format::json;
  int threads = 1;
  std::optional<std::string> checkpoint;
  bool real_inputs = false;

  // Defaults, with psd_tol taken from OPMAP_DEFAULT_TOL when set.
  static RunConfig defaults();
};

struct CsvRow {
  std::string check;
  std::string verdict;
  double margin = 0.0;
  std::uint64_t seed = 0;
  long trials = 0;
};

struct CommandResult {
  int exit_code = kPass;
  json output;
  std::vector<CsvRow> rows;
};

std::string to_csv(const std::vector<CsvRow>& rows);

// notion: "type1", "type2" or "choi". The spec may carry a "witness" array of
// elements on the amplified domains; it is replayed before random trials.
CommandResult cmd_check(const std::string& spec_path, const std::string& notion, int n,
                        const RunConfig& config);
// degree < 0: the linear/multilinear decomposition for multilinear maps, the
// map's declared degree bound otherwise.
CommandResult cmd_decompose(const std::string& spec_path, int degree, const RunConfig& config);
// Empty checks: the bundle's own list.
CommandResult cmd_uncertainty(const std::string& bundle_path, const std::vector<std::string>& checks,
                              const RunConfig& config);
CommandResult cmd_gallery_list();
CommandResult cmd_gallery_run(const std::string& id, const json& params, const RunConfig& config);
CommandResult cmd_gallery_all(const RunConfig& config);
// Round-robin over notions in chunks of `chunk` trials until `budget` trials are
// spent or one notion is violated. With a checkpoint path, state is saved after
// every chunk and an existing checkpoint is resumed.
CommandResult cmd_fuzz(const std::string& spec_path, const std::vector<std::string>& notions,
                       long budget, long chunk, const RunConfig& config);

// Writes the result per config.format to config.out, or to `out` when unset.
void emit(const CommandResult& r, const RunConfig& config, std::ostream& out);

// Full command line, including argv[0]. Diagnostics go to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace opmap::cli
