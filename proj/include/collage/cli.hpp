#pragma once

#include "collage/assembly.hpp"
#include "collage/inverse.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace collage::cli {

enum class Command { forward, diagnose, inverse };
enum class OutputFormat { csv, json };

struct RunConfig {
    Command command = Command::forward;

    // forward / diagnose
    std::vector<int> m_list{9, 25, 81};
    double delta = 1.0 / 15.0;
    std::string delta_text = "1/15";
    int npoints = 6;

    // diagnose
    FormCoefficients coeffs{1.0, 1.0, 0.25};
    std::vector<double> family_c1;
    std::vector<double> family_c2;
    std::vector<double> family_c3;

    // inverse
    std::vector<double> noise_levels{0.0};
    int trials = 1;
    std::uint64_t seed = 0;
    InverseConfig inverse;
    std::string trials_json;

    OutputFormat format = OutputFormat::csv;
    std::string output; ///< empty: standard output
};

/// "1/15", "0.25", "-3" → double. Throws ConfigError.
double parse_real(std::string_view text);

/// Parses argv into a validated configuration. Throws ConfigError on bad
/// input; `--help` is reported through the returned optional being empty
/// after printing usage to `out`.
std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out);

/// Renders the configured command's result as file content.
std::string render(const RunConfig& config);

/// Executes the command and writes its output. Returns the process exit code:
/// 0 success, 2 configuration error, 3 numerical error.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_args + run with exit-code mapping.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace collage::cli
