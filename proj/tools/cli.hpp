#pragma once

// CLI entry point, separated from main() so tests can drive it directly.
// Exit codes: 0 success, 2 configuration error, 3 runtime failure.
int cli_main(int argc, const char* const* argv);
