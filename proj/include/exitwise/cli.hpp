#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace exitwise {

inline constexpr const char* kVersion = "0.1.0";

/// Entry point of the exitwise tool. args excludes the program name.
/// Sample rows go to out unless --out names a file; diagnostics and, by default, the
/// run summary go to err. Returns 0 on success, 2 when a validation suite fails,
/// 1 on usage errors and sampler aborts.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace exitwise
