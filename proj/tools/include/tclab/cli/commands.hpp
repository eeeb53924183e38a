#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace tclab::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kNumerical = 3,
    kPartialSweep = 4,
};

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

/// Run directories below `root` (or `root` itself), sorted.
[[nodiscard]] std::vector<std::filesystem::path> find_run_dirs(const std::filesystem::path& root);

}  // namespace tclab::cli
