// fwcibench: FWCI corpus ingestion, lognormal ensemble fitting and
// small-sample award benchmarking.

#include <charconv>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fwci/commands.hpp"
#include "fwci/errors.hpp"

namespace {

// "LO:HI"
template <class T>
std::pair<T, T> parse_pair(const std::string& text, const char* flag) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw fwci::UsageError(std::string(flag) + " expects LO:HI");
    auto parse = [&](std::string_view part) {
        T value{};
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
        if (ec != std::errc{} || ptr != part.data() + part.size() || part.empty()) {
            throw fwci::UsageError(std::string(flag) + " expects LO:HI, got '" + text + "'");
        }
        return value;
    };
    const std::string_view s(text);
    return {parse(s.substr(0, colon)), parse(s.substr(colon + 1))};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FWCI corpus decomposition, lognormal fitting and award benchmarking"};
    app.require_subcommand(1);

    fwci::RunConfig config;
    std::string input, budgets, format = "auto", range = "0:8", bins = "20:800", out = ".";
    std::vector<double> sigma_sq;
    std::vector<int> n_list;

    auto add_common = [&](CLI::App* cmd, bool needs_input) {
        auto* in = cmd->add_option("--input", input, "Publication records (.csv or .jsonl)");
        if (needs_input) in->required();
        cmd->add_option("--budgets", budgets, "Budget table: award_code,budget_eur");
        cmd->add_option("--format", format, "Input format")->check(CLI::IsMember({"auto", "csv", "jsonl"}));
        cmd->add_option("--low-cut", config.fwci_low_cut, "Exclude FWCI below this value from fits")
            ->capture_default_str();
        cmd->add_option("--range", range, "Fit range LO:HI")->capture_default_str();
        cmd->add_option("--bins", bins, "Random bin-count range LO:HI")->capture_default_str();
        cmd->add_option("--fits", config.n_fits, "Ensemble size")->capture_default_str();
        cmd->add_option("--sigma2", sigma_sq, "Baseline sigma^2 values (comma separated)")->delimiter(',');
        cmd->add_option("--reps", config.reps, "Simulated awards per threshold")->capture_default_str();
        cmd->add_option("--seed", config.seed, "Master random seed")->capture_default_str();
        cmd->add_option("--out", out, "Output directory")->capture_default_str();
    };

    auto* ingest = app.add_subcommand("ingest", "Parse, filter and summarise a publication export");
    add_common(ingest, true);
    auto* fit = app.add_subcommand("fit", "Random-bin lognormal ensemble fit");
    add_common(fit, true);
    auto* benchmark = app.add_subcommand("benchmark", "Benchmark award means against simulated medians");
    add_common(benchmark, true);
    auto* curve = app.add_subcommand("curve", "Median-of-means curve for the given paper counts");
    add_common(curve, false);
    curve->add_option("--n", n_list, "Paper counts (comma separated)")->delimiter(',')->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(fwci::ExitCode::usage);
    }

    try {
        config.input_path = input;
        if (!budgets.empty()) config.budget_path = budgets;
        if (format == "csv") config.format = fwci::RecordFormat::delimited;
        if (format == "jsonl") config.format = fwci::RecordFormat::json_lines;
        std::tie(config.fit_lo, config.fit_hi) = parse_pair<double>(range, "--range");
        std::tie(config.bins_lo, config.bins_hi) = parse_pair<int>(bins, "--bins");
        if (!sigma_sq.empty()) config.sigma_sq_list = sigma_sq;
        config.output_dir = out;

        if (ingest->parsed()) fwci::cmd_ingest(config, std::cout);
        if (fit->parsed()) fwci::cmd_fit(config, std::cout);
        if (benchmark->parsed()) fwci::cmd_benchmark(config, std::cout);
        if (curve->parsed()) fwci::cmd_curve(config, n_list, std::cout);
    } catch (const fwci::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return static_cast<int>(fwci::ExitCode::usage);
    } catch (const fwci::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return static_cast<int>(fwci::ExitCode::data);
    } catch (const fwci::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return static_cast<int>(fwci::ExitCode::numerical);
    }
    return static_cast<int>(fwci::ExitCode::success);
}
