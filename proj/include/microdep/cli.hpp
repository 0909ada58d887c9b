#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

namespace microdep {

class Vcs;

namespace cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAnalysisError = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitPartialCorpus = 3;

/// Runs one command. `args` excludes the program name; relative paths are
/// resolved against `working_dir`. Data goes to `out`, diagnostics to `err`.
/// `vcs` replaces the git client for corpus commands when given.
int run(std::span<const std::string> args, const std::filesystem::path& working_dir,
        std::ostream& out, std::ostream& err, Vcs* vcs = nullptr);

} // namespace cli
} // namespace microdep
