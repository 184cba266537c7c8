#pragma once

#include <ostream>

namespace fedsleep::tools {

/// Oracle suite: gradient checks, E0 against brute force, FedAvg exactness.
/// Prints one line per check; returns the number of failures.
int run_verify(std::ostream& out);

}  // namespace fedsleep::tools
