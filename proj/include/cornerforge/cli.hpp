#pragma once

namespace cornerforge {

// Exit codes: 0 success, 1 validation failure, 2 I/O failure.
int run_cli(int argc, const char* const* argv);

} // namespace cornerforge
