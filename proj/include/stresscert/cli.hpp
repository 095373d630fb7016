#pragma once

#include <string>
#include <vector>

namespace stresscert {

// Full command-line surface. argv follows main() conventions (argv[0] is the
// program name). Returns the process exit code:
//   0 success, 1 usage, 2 parse error, 3 no construction order exists,
//   4 singular subset (general-position violation), 5 verification failed,
//   6 dimension mismatch, 7 generator resample budget exhausted,
//   8 order-search budget exhausted.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& argv);

}  // namespace stresscert
