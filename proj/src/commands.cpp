#include "fwci/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "fwci/errors.hpp"
#include "fwci/histogram.hpp"
#include "fwci/lognormal.hpp"
#include "fwci/simulate.hpp"
#include "fwci/stats.hpp"

namespace fwci {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr double kLinearBinWidth = 0.1;
constexpr double kLogBinWidth = 0.2;
constexpr double kZeroShift = 0.01;
constexpr int kCurvePoints = 512;

std::string num(double v, int digits = 12) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::string percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * fraction);
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << content;
    if (!out) throw DataError("failed writing " + path.string());
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

template <class T>
std::string json_lines(const std::vector<T>& items) {
    std::string out;
    for (const auto& item : items) out += json(item).dump() + "\n";
    return out;
}

void prepare_output(const RunConfig& config) {
    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec || !fs::is_directory(config.output_dir)) {
        throw DataError("cannot create output directory " + config.output_dir.string());
    }
}

std::ifstream open_input(const fs::path& path, std::string_view what) {
    if (!fs::exists(path)) throw UsageError(std::string(what) + " not found: " + path.string());
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + std::string(what) + " " + path.string());
    return in;
}

struct Corpus {
    ParseResult parsed;
    std::vector<std::string> warnings;
    std::size_t deduplicated = 0;
    std::vector<PublicationRecord> eligible;
    BudgetTable budgets;
    std::vector<Rejection> budget_rejections;
};

Corpus load_corpus(const RunConfig& config, std::ostream& log) {
    if (config.input_path.empty()) throw UsageError("--input is required");
    Corpus c;
    {
        auto in = open_input(config.input_path, "input file");
        const RecordFormat format = config.format.value_or(detect_format(config.input_path.string()));
        c.parsed = parse_records(in, format);
    }
    auto dedup = deduplicate_per_award(c.parsed.records);
    c.deduplicated = c.parsed.records.size() - dedup.records.size();
    c.warnings = std::move(dedup.warnings);
    for (const auto& w : c.warnings) log << "warning: " << w << '\n';

    EligibilityPolicy policy = EligibilityPolicy::original_research();
    policy.low_fwci_threshold = config.fwci_low_cut;
    c.eligible = filter_eligible(dedup.records, policy);

    if (config.budget_path) {
        auto in = open_input(*config.budget_path, "budget file");
        auto budgets = parse_budgets(in);
        c.budgets = std::move(budgets.budgets);
        c.budget_rejections = std::move(budgets.rejections);
    }
    return c;
}

std::vector<double> fwci_values(std::span<const PublicationRecord> records) {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(*r.fwci);
    return out;
}

json optional_number(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

std::string histogram_csv(const Histogram& h, double excluded_below) {
    std::string out = "bin_lo,bin_hi,center,count,excluded\n";
    const double w = h.width();
    for (std::size_t i = 0; i < h.n_bins(); ++i) {
        const double lo = h.lo + static_cast<double>(i) * w;
        out += num(lo) + "," + num(lo + w) + "," + num(h.centers[i]) + "," + std::to_string(h.counts[i]) +
               "," + (h.centers[i] < excluded_below ? "1" : "0") + "\n";
    }
    return out;
}

// Central interval of the observed values, low-FWCI papers included, at the
// same coverage as the model interval.
json empirical_interval(std::vector<double> values, double coverage) {
    std::sort(values.begin(), values.end());
    const double tail = 0.5 * (1.0 - coverage);
    return json{{"coverage", coverage},
                {"lo", linear_percentile(values, tail)},
                {"hi", linear_percentile(values, 1.0 - tail)}};
}

std::vector<BaselineField> baselines_of(const RunConfig& config) {
    std::vector<BaselineField> out;
    for (double s2 : config.sigma_sq_list) out.emplace_back(s2);
    return out;
}

}  // namespace

std::string group_thousands(std::uint64_t value) {
    std::string digits = std::to_string(value);
    std::string out;
    const std::size_t lead = digits.size() % 3;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (i != 0 && (i % 3) == lead % 3) out.push_back(',');
        out.push_back(digits[i]);
    }
    return out;
}

void RunConfig::validate() const {
    if (!(fwci_low_cut >= 0.0) || !std::isfinite(fwci_low_cut)) throw UsageError("--low-cut must be >= 0");
    if (!(fit_lo < fit_hi) || !std::isfinite(fit_lo) || !std::isfinite(fit_hi)) {
        throw UsageError("--range requires LO < HI");
    }
    if (fit_lo < 0.0) throw UsageError("--range must start at or above 0");
    if (bins_lo < 1 || bins_lo > bins_hi) throw UsageError("--bins requires 1 <= LO <= HI");
    if (n_fits < 1) throw UsageError("--fits must be >= 1");
    if (reps < 1) throw UsageError("--reps must be >= 1");
    if (sigma_sq_list.empty()) throw UsageError("--sigma2 needs at least one value");
    for (double s2 : sigma_sq_list) {
        if (!(s2 > 0.0) || !std::isfinite(s2)) throw UsageError("--sigma2 values must be positive");
    }
}

json to_json(const RunConfig& c) {
    json sigma = json::array();
    for (double s2 : c.sigma_sq_list) sigma.push_back(s2);
    json format = nullptr;
    if (c.format) format = *c.format == RecordFormat::json_lines ? "jsonl" : "csv";
    return json{
        {"input_path", c.input_path.string()},
        {"budget_path", c.budget_path ? json(c.budget_path->string()) : json(nullptr)},
        {"format", format},
        {"fwci_low_cut", c.fwci_low_cut},
        {"fit_range", {c.fit_lo, c.fit_hi}},
        {"bins_range", {c.bins_lo, c.bins_hi}},
        {"n_fits", c.n_fits},
        {"sigma_sq_list", sigma},
        {"reps", c.reps},
        {"seed", c.seed},
        {"output_dir", c.output_dir.string()},
    };
}

// ---------------------------------------------------------------------------

void cmd_ingest(const RunConfig& config, std::ostream& log) {
    config.validate();
    Corpus c = load_corpus(config, log);
    prepare_output(config);

    const auto summaries = summarize_awards(c.eligible, c.budgets);
    const auto totals = corpus_totals(summaries);
    const auto split = split_low_fwci(c.eligible, config.fwci_low_cut);
    const double low_fraction =
        c.eligible.empty() ? 0.0 : static_cast<double>(split.low.size()) / static_cast<double>(c.eligible.size());

    write_file(config.output_dir / "eligible.jsonl", json_lines(c.eligible));
    std::vector<Rejection> all_rejections = c.parsed.rejections;
    write_file(config.output_dir / "rejections.jsonl", json_lines(all_rejections));

    std::string awards = "award_code,n_papers,mean_fwci,budget_eur,cost_per_paper\n";
    for (const auto& s : summaries) {
        awards += s.award_code + "," + std::to_string(s.n_papers) + "," +
                  (s.mean_fwci ? num(*s.mean_fwci) : "") + "," + (s.budget ? num(*s.budget, 15) : "") + "," +
                  (s.cost_per_paper ? num(*s.cost_per_paper) : "") + "\n";
    }
    write_file(config.output_dir / "awards.csv", awards);

    json report{
        {"config", to_json(config)},
        {"rows",
         {{"parsed", c.parsed.records.size()},
          {"rejected", c.parsed.rejections.size()},
          {"duplicates_dropped", c.deduplicated},
          {"eligible", c.eligible.size()}}},
        {"awards", totals.n_awards},
        {"publications", totals.n_papers},
        {"low_fwci",
         {{"threshold", config.fwci_low_cut},
          {"low", split.low.size()},
          {"main", split.main.size()},
          {"low_fraction", low_fraction}}},
        {"total_budget_eur", optional_number(totals.total_budget)},
        {"cost_per_paper_eur", optional_number(totals.cost_per_paper)},
        {"budget_rejections", json(c.budget_rejections)},
        {"warnings", c.warnings},
    };
    write_file(config.output_dir / "ingest_report.json", dump(report));

    log << group_thousands(totals.n_awards) << " awards, " << group_thousands(totals.n_papers)
        << " publications\n";
    log << "rejected rows: " << c.parsed.rejections.size() << "\n";
    log << "FWCI < " << num(config.fwci_low_cut) << ": " << group_thousands(split.low.size()) << " ("
        << percent(low_fraction) << "), retained " << group_thousands(split.main.size()) << "\n";
    if (totals.cost_per_paper) {
        log << "cost per paper: EUR " << group_thousands(static_cast<std::uint64_t>(std::llround(*totals.cost_per_paper)))
            << "\n";
    }
}

void cmd_fit(const RunConfig& config, std::ostream& log) {
    config.validate();
    Corpus c = load_corpus(config, log);
    if (c.eligible.empty()) throw NumericalError("no eligible publications with FWCI to fit");
    prepare_output(config);

    const auto split = split_low_fwci(c.eligible, config.fwci_low_cut);
    const std::vector<double> all_values = fwci_values(c.eligible);
    const std::vector<double> main_values = fwci_values(split.main);
    std::vector<double> fit_values;
    for (double v : main_values) {
        if (v > config.fit_lo && v < config.fit_hi) fit_values.push_back(v);
    }
    if (fit_values.empty()) throw NumericalError("no FWCI values inside the fit range");

    EnsembleConfig ec{config.fit_lo, config.fit_hi, config.bins_lo, config.bins_hi, config.n_fits, config.seed};
    FitEnsemble ensemble;
    try {
        ensemble = ensemble_fit(fit_values, ec);
    } catch (const std::invalid_argument& e) {
        throw NumericalError(std::string("sample too small to fit: ") + e.what());
    }
    const LognormalParams central(ensemble.mu.p50, ensemble.sigma.p50);
    const DerivedStats derived = derived_stats(central, 0.95);

    // Linear view: fixed 0.1-wide bins over the fit range, full sample.
    const int linear_bins = std::max(1, static_cast<int>(std::lround((config.fit_hi - config.fit_lo) / kLinearBinWidth)));
    const Histogram linear_all = build_histogram(all_values, config.fit_lo, config.fit_hi, linear_bins);
    const Histogram linear_main = build_histogram(main_values, config.fit_lo, config.fit_hi, linear_bins);
    const double amplitude = best_amplitude(linear_main, central);
    std::string curve_linear = "x,expected_count\n";
    for (int i = 0; i < kCurvePoints; ++i) {
        const double x = config.fit_lo + (i + 0.5) * (config.fit_hi - config.fit_lo) / kCurvePoints;
        curve_linear += num(x) + "," + num(amplitude > 0.0 ? scaled_model(x, amplitude, central) : 0.0) + "\n";
    }

    // Log view: zeros displaced to ln(0.01); bin edges aligned on ln(cut) so
    // every bin is either wholly below or wholly above the cut.
    const std::vector<double> log_all = log_transform(all_values, kZeroShift);
    const double anchor = config.fwci_low_cut > 0.0 ? std::log(config.fwci_low_cut) : 0.0;
    const auto [tmin, tmax] = std::minmax_element(log_all.begin(), log_all.end());
    const double log_lo = anchor + std::floor((*tmin - anchor) / kLogBinWidth) * kLogBinWidth;
    const double log_hi = anchor + (std::floor((*tmax - anchor) / kLogBinWidth) + 1.0) * kLogBinWidth;
    const int log_bins = std::max(1, static_cast<int>(std::lround((log_hi - log_lo) / kLogBinWidth)));
    const Histogram log_hist = build_histogram(log_all, log_lo, log_hi, log_bins);
    FitWindow log_window;
    if (config.fwci_low_cut > 0.0) log_window.min_center = anchor;

    json normal_check = nullptr;
    std::string curve_log = "t,expected_count\n";
    try {
        const LognormalFit nf = fit_normal_log(log_hist, log_window, central);
        normal_check = json(nf);
        normal_check["delta_mu"] = nf.params.mu() - central.mu();
        normal_check["delta_sigma"] = nf.params.sigma() - central.sigma();
        for (int i = 0; i < kCurvePoints; ++i) {
            const double t = log_lo + (i + 0.5) * (log_hi - log_lo) / kCurvePoints;
            const double d = (t - nf.params.mu()) / nf.params.sigma();
            curve_log += num(t) + "," + num(nf.amplitude * std::exp(-0.5 * d * d)) + "\n";
        }
    } catch (const std::invalid_argument& e) {
        log << "warning: ln(FWCI) consistency fit skipped: " << e.what() << '\n';
    }

    json report{
        {"config", to_json(config)},
        {"sample",
         {{"eligible", c.eligible.size()},
          {"low_fwci", split.low.size()},
          {"main", split.main.size()},
          {"in_fit_range", fit_values.size()}}},
        {"ensemble", json(ensemble)},
        {"central_params", json(central)},
        {"derived", json(derived)},
        {"empirical_interval", empirical_interval(all_values, derived.coverage)},
        {"naive_mean_main", arithmetic_mean(main_values)},
        {"naive_mean_all", arithmetic_mean(all_values)},
        {"fitted_mean", derived.mean},
        {"display_fit",
         {{"bin_width", kLinearBinWidth}, {"amplitude", amplitude}, {"histogram", json(linear_main)}}},
        {"log_view",
         {{"bin_width", kLogBinWidth},
          {"zero_shift", kZeroShift},
          {"histogram", json(log_hist)},
          {"normal_fit", normal_check}}},
    };
    write_file(config.output_dir / "fit_report.json", dump(report));
    write_file(config.output_dir / "hist_linear.csv", histogram_csv(linear_all, config.fwci_low_cut));
    write_file(config.output_dir / "curve_linear.csv", curve_linear);
    write_file(config.output_dir / "hist_log.csv",
               histogram_csv(log_hist, config.fwci_low_cut > 0.0 ? anchor : -HUGE_VAL));
    write_file(config.output_dir / "curve_log.csv", curve_log);

    log << "fitted " << group_thousands(fit_values.size()) << " FWCI values in (" << num(config.fit_lo) << ", "
        << num(config.fit_hi) << "), " << ensemble.n_fits - ensemble.n_failed << "/" << ensemble.n_fits
        << " fits converged\n";
    log << "mu    = " << num(ensemble.mu.p50, 6) << " [" << num(ensemble.mu.p2_5, 6) << ", "
        << num(ensemble.mu.p97_5, 6) << "]\n";
    log << "sigma = " << num(ensemble.sigma.p50, 6) << " [" << num(ensemble.sigma.p2_5, 6) << ", "
        << num(ensemble.sigma.p97_5, 6) << "]\n";
    log << "median FWCI " << num(derived.median, 5) << ", fitted mean " << num(derived.mean, 5)
        << ", naive mean " << num(arithmetic_mean(main_values), 5) << "\n";
}

void cmd_benchmark(const RunConfig& config, std::ostream& log) {
    config.validate();
    Corpus c = load_corpus(config, log);
    prepare_output(config);

    const auto summaries = summarize_awards(c.eligible, c.budgets);
    const auto baselines = baselines_of(config);
    if (summaries.empty()) log << "warning: no awards to benchmark\n";

    const auto benchmarks = benchmark_awards(summaries, baselines, config.reps, config.seed);
    const auto aggregate = aggregate_benchmarks(benchmarks);

    std::string table = "award_code,n_papers,observed_mean";
    for (const auto& b : baselines) {
        table += ",threshold_s2_" + num(b.sigma_sq()) + ",verdict_s2_" + num(b.sigma_sq());
    }
    table += "\n";
    json awards = json::array();
    for (const auto& b : benchmarks) {
        table += b.award_code + "," + std::to_string(b.n_papers) + "," + num(b.observed_mean);
        json verdicts = json::array();
        for (const auto& v : b.verdicts) {
            table += "," + num(v.threshold) + "," + std::string(to_string(v.verdict));
            verdicts.push_back({{"sigma_sq", v.sigma_sq},
                                {"threshold", v.threshold},
                                {"verdict", to_string(v.verdict)}});
        }
        table += "\n";
        awards.push_back({{"award_code", b.award_code},
                          {"n_papers", b.n_papers},
                          {"observed_mean", b.observed_mean},
                          {"verdicts", verdicts}});
    }
    write_file(config.output_dir / "benchmark.csv", table);
    write_file(config.output_dir / "benchmark_report.json",
               dump(json{{"config", to_json(config)}, {"aggregate", json(aggregate)}, {"awards", awards}}));

    log << group_thousands(aggregate.n_awards) << " awards, " << aggregate.mean_at_least_one
        << " with mean FWCI >= 1 (" << percent(aggregate.mean_at_least_one_fraction) << ")\n";
    for (const auto& t : aggregate.per_baseline) {
        log << "sigma^2 = " << num(t.sigma_sq) << ": " << t.above << "/" << aggregate.n_awards
            << " above the simulated median (" << percent(t.above_fraction) << "), " << t.further_above
            << " of them with mean < 1\n";
    }
}

void cmd_curve(const RunConfig& config, std::vector<int> n_list, std::ostream& log) {
    config.validate();
    if (n_list.empty()) throw UsageError("--n needs at least one paper count");
    for (int n : n_list) {
        if (n < 1) throw UsageError("paper counts must be >= 1");
    }
    std::sort(n_list.begin(), n_list.end());
    const auto last = std::unique(n_list.begin(), n_list.end());
    if (last != n_list.end()) {
        log << "warning: dropped " << (n_list.end() - last) << " repeated paper count(s)\n";
        n_list.erase(last, n_list.end());
    }
    prepare_output(config);

    const auto baselines = baselines_of(config);
    const auto points = median_curve(n_list, baselines, config.reps, config.seed);

    std::string csv = "sigma_sq,n,median_mean,reps,seed\n";
    for (const auto& p : points) {
        csv += num(p.sigma_sq) + "," + std::to_string(p.n) + "," + num(p.median_mean) + "," +
               std::to_string(p.reps) + "," + std::to_string(p.seed) + "\n";
    }
    write_file(config.output_dir / "median_curve.csv", csv);
    write_file(config.output_dir / "curve_report.json",
               dump(json{{"config", to_json(config)}, {"n_values", n_list}, {"points", json(points)}}));

    for (const auto& p : points) {
        log << "sigma^2 = " << num(p.sigma_sq) << ", n = " << p.n << ": median mean FWCI " << num(p.median_mean, 5)
            << "\n";
    }
}

}  // namespace fwci
