#pragma once

namespace gvm::cli {

// Batch front end. Parses a subcommand plus a JSON config, runs the matching
// library pipeline, writes JSON/CSV (and optional SVG) artifacts into the
// output directory, and prints a one-line summary.
//
// Exit codes: 0 success, 2 usage or domain error, 3 incomplete-market
// verdict, 4 numerical failure.
int run(int argc, const char* const* argv);

}  // namespace gvm::cli
