#pragma once

namespace selguide {

/// Entry point behind the `selguide` binary. Subcommands: sample, sweep,
/// bench, tune, validate-config. Returns 0 on success, 1 on config errors
/// (bad flags, malformed config files, invalid values), 2 on runtime errors.
int cli_main(int argc, const char* const* argv);

}  // namespace selguide
