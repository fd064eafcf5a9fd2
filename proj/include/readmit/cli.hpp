#pragma once

namespace readmit::cli {

// Exit codes: 0 success, 1 data/validation error, 2 usage error.
int run(int argc, const char* const* argv);

}  // namespace readmit::cli
