#ifndef PDTN_CLI_HPP
#define PDTN_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "pdtn/dtn.hpp"

namespace pdtn {

/// Stable serializations of a norm report: insertion-ordered keys,
/// 17-significant-digit reals, byte-identical across runs.
std::string norm_report_json(const NormReport& report);
std::string norm_report_csv(const NormReport& report);

/// Entry point shared by the binary and the in-process CLI tests.
/// `args` excludes the program name. Returns the process exit code:
/// 0 success, 1 usage/input/validation error, 2 solver non-convergence.
/// Results go to `out`; errors to `err` as a single JSON line
/// {"error": ..., "detail": ...}.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pdtn

#endif
