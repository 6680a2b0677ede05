#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "thetalab/numeric.hpp"

namespace thetalab::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitCheckFailed = 2;

/// Runs one `theta-lab` invocation; args excludes the program name.
/// The JSON report goes to `out` (or --output), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "1.5", "0+1i", "-2.5e-1-0.3i", "2i".
Complex parse_complex(const std::string& text);
/// Comma separated list of parse_complex values.
ComplexVector parse_complex_list(const std::string& text);
std::vector<long long> parse_int_list(const std::string& text);
std::vector<double> parse_real_list(const std::string& text);

nlohmann::json to_json(Complex z);

/// Flags from a JSON object: {"N": 2, "kubo": true} -> --N 2 --kubo.
std::vector<std::string> config_to_args(const nlohmann::json& config);

}  // namespace thetalab::cli
