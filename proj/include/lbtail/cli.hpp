#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lbtail {

// Parsed command-line / config state. Validation is per command: each
// command has an exact set of required and accepted keys and any
// missing/extra key is named in the error.
struct RunConfig {
    std::string command;
    std::optional<std::string> model_x;
    std::optional<std::string> model_y;
    std::optional<std::string> input_path;
    std::optional<std::size_t> k;
    std::optional<std::vector<std::size_t>> k_grid;
    std::optional<double> p_n;
    std::optional<double> rho1;
    std::optional<std::size_t> n;
    std::optional<std::size_t> replicates;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_path;
    bool emit_plot_script = false;
    int threads = 0;  // 0 = all hardware threads, 1 = serial
};

// Parses "10,20,50" or "10:150:5" (inclusive range with step).
std::vector<std::size_t> parse_k_grid(const std::string& text);

// Throws Error("config", ...) naming the missing or unexpected key.
void validate_config(const RunConfig& config);

// Executes the configured command, writing reports to `out` and errors to
// `err`. Returns the process exit status.
int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err);

// Full CLI entry point: argv parsing (CLI11), config file merge, dispatch.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace lbtail
