#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace jobfit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

// Runs one invocation. `args` excludes the program name. Payloads go to
// --out (plus a "<out>.manifest.json" run manifest) or to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace jobfit::cli
