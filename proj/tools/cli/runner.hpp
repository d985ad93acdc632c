#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "config.hpp"

namespace perfhom::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitValidation = 3,
    kExitSolver = 4,
    kExitVerdictGap = 5,
};

/// Rows of one CSV file; every cell is already formatted.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add(const std::vector<std::string>& row);
};

struct RunOptions {
    std::filesystem::path output_dir = ".";
    std::vector<std::string> emit_fields;
    /// Overrides the summary timestamp (tests use this for reproducible output).
    std::string timestamp;
};

struct RunReport {
    int exit_code = kExitOk;
    std::string message;
    std::vector<std::filesystem::path> written;
};

/// Runs the configured experiment and writes `<prefix>.csv`, `<prefix>.summary.json`,
/// `<prefix>.config.ini` and any requested fields into the output directory.
/// Throws ConfigError, perfhom::error or std::exception on failure.
RunReport run(const Config& config, const RunOptions& options);

/// Maps the exception currently being handled to an exit code.
int exit_code_for_current_exception(std::string& message);

/// Formats a double with 17 significant digits; throws on NaN or infinity.
std::string format_number(double v, const std::string& column);

}  // namespace perfhom::cli
