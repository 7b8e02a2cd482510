#pragma once

namespace kgalign {

/// Command-line entry point. Returns 0 on success, 1 on usage or input
/// validation errors, 2 on runtime failures.
int cli_main(int argc, const char* const* argv);

} // namespace kgalign
