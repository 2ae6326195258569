#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace isingfin::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "ISINGFIN_OUT_DIR";

/// Entry point behind main(); args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace isingfin::cli
