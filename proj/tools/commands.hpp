#pragma once

#include <CLI11.hpp>

namespace flowmem::cli {

/// Adds every subcommand to app. Handlers run via app.parse + callbacks.
void register_commands(CLI::App& app);

}  // namespace flowmem::cli
