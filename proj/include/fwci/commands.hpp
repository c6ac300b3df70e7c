#pragma once

// Subcommands of the fwcibench tool. Each writes its artifacts into
// RunConfig::output_dir and echoes the effective configuration into every
// report, so reruns with the same configuration are byte-identical.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include <json.hpp>

#include "fwci/corpus.hpp"

namespace fwci {

struct RunConfig {
    std::filesystem::path input_path;
    std::optional<std::filesystem::path> budget_path;
    std::optional<RecordFormat> format;  // detected from the extension when unset
    double fwci_low_cut = 0.1;
    double fit_lo = 0.0;
    double fit_hi = 8.0;
    int bins_lo = 20;
    int bins_hi = 800;
    int n_fits = 10000;
    std::vector<double> sigma_sq_list{1.0, 1.3, 1.8};
    int reps = 100000;
    std::uint64_t seed = 1;
    std::filesystem::path output_dir = ".";

    // Throws UsageError on inconsistent settings.
    void validate() const;
};

nlohmann::ordered_json to_json(const RunConfig& config);

// Each command returns normally on success and throws UsageError, DataError
// or NumericalError otherwise. Human-readable progress goes to `log`.
void cmd_ingest(const RunConfig& config, std::ostream& log);
void cmd_fit(const RunConfig& config, std::ostream& log);
void cmd_benchmark(const RunConfig& config, std::ostream& log);
void cmd_curve(const RunConfig& config, std::vector<int> n_list, std::ostream& log);

// "3,243"
std::string group_thousands(std::uint64_t value);

}  // namespace fwci
