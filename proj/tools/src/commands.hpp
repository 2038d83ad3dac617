#pragma once

namespace iacvlab::cli {

/// Parses argv and dispatches to the value / dashboard / vintage /
/// simulate commands. Exit codes: 0 success, 1 analytic warning escalated
/// under --strict, 2 input error (bad usage, unreadable files, schema or
/// config violations).
int run(int argc, char** argv);

} // namespace iacvlab::cli
