#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sld::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kIo = 2, kProvider = 3 };

/// Runs one command line (args[0] is the program name). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sld::cli
