#pragma once

// Command-line front end. `run` is the whole program; tools/main.cpp only
// forwards argv to it so tests can drive the CLI in-process.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "transverse/locus.hpp"

namespace transverse::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitViolation = 2;
inline constexpr int kExitAuditFailed = 3;

struct InputSpec {
    FieldPtr field;
    int n = 0;
    Form form;
};

/// Header `p=<int> m=<int> n=<int> [modulus=<t-poly>]`, then one polynomial that
/// may span several lines. Blank lines and lines starting with '#' are skipped.
/// Throws ParseError (with line/column), gf::FieldError or PolyError.
InputSpec parse_input(std::string_view text);
InputSpec read_input(const std::string& path);
/// Inverse of parse_input; the modulus is printed only when it is not the default.
std::string format_input(const InputSpec& spec);

/// Monic modulus text such as `t^2+2*t+2`, low degree first.
std::vector<std::uint64_t> parse_modulus(std::string_view text, std::uint64_t p);

struct RunConfig {
    std::string command;
    std::string target;  // count/audit subject
    std::string input;
    std::string out;
    std::string format = "json";
    std::uint64_t seed = 0x5eed0f7a5e5ULL;
    int jobs = 1;
    int max_field_bits = 0;  // 0 keeps the library default
    std::optional<int> r, d, n, t, nmax, dmax, samples;
    std::optional<std::uint64_t> q;
    std::string through;
    bool irreducible = false;
    bool timing = false;
};

/// Runs one command; the report goes to cfg.out or `out`, diagnostics to `err`.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);
/// Parses argv with CLI11 and runs. Exit codes: 0 ok, 1 usage or input error,
/// 2 theorem-violation flag, 3 failed audit verdict.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace transverse::cli
