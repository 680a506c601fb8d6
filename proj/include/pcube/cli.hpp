#pragma once

// Command-line front end.  run() is the whole program; the binary's main()
// forwards to it so tests can drive the CLI in-process and capture streams.
//
// Exit codes: 0 all asserted checks pass, 1 some check failed, 2 bad config.
// Identical arguments (and seed) produce byte-identical output; timing
// fields only appear under --timings.

#include <iosfwd>
#include <string>
#include <vector>

namespace pcube::cli {

struct CheckerInfo {
    std::string id;          // e.g. "hyper.smoothing"
    std::string module;      // library module the checker lives in
    std::string subcommand;  // the one subcommand that reaches it
};

// Every inequality checker exposed by the CLI, each under exactly one
// subcommand.
const std::vector<CheckerInfo>& checker_registry();

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pcube::cli
