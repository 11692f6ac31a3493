#pragma once

#include <iosfwd>

namespace rear::app {

// Subcommands: ingest, filter, series, analyze <h1..h5>, report, serve.
// Returns 0 on success, 1 on usage or configuration errors, 2 on data errors.
// Options may also come from a TOML/INI file given by --config or REAR_CONFIG;
// flags override file values.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int cli_main(int argc, const char* const* argv);

}  // namespace rear::app
