#pragma once

#include <string>
#include <vector>

namespace tkcli {

/// Runs the command line tool on argv-style arguments (argv[0] excluded).
/// Returns 0 on success, 1 on configuration errors, 2 on numerical failure.
int run(const std::vector<std::string>& args);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& text);

}  // namespace tkcli
