#pragma once

// Publication corpus: record parsing, award-code normalization, eligibility
// filtering and per-award aggregation.
//
// FWCI values are consumed exactly as exported. An empty FWCI cell means the
// database has no value for the paper (absent); a literal 0 is an uncited paper.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace fwci {

enum class PubType {
    article,
    conference_paper,
    letter,
    note,
    review,
    editorial,
    short_survey,
    book_chapter,
    other,
};

std::string_view to_string(PubType type);

// Accepts snake_case names and the export spellings ("Conference Paper",
// "Short Survey", ...), case-insensitively. Unrecognised names map to other.
PubType parse_pub_type(std::string_view text);

struct PublicationRecord {
    std::string award_code;  // canonical YY/IA/XXXX
    int year = 0;
    PubType pub_type = PubType::other;
    std::optional<double> fwci;
    std::optional<std::int64_t> citations;
    std::string title;
    std::string source_id;

    friend bool operator==(const PublicationRecord&, const PublicationRecord&) = default;
};

void to_json(nlohmann::ordered_json& j, const PublicationRecord& r);

// Canonical YY/IA/XXXX form. Strips surrounding whitespace and a leading
// "SFI/" prefix and repairs the "1A" misspelling of the call identifier.
// Anything else that does not match the canonical pattern is rejected.
std::optional<std::string> normalize_award_code(std::string_view raw);

struct Rejection {
    std::size_t row = 0;  // 1-based data row (header excluded)
    std::string reason;
    std::string raw;

    friend bool operator==(const Rejection&, const Rejection&) = default;
};

void to_json(nlohmann::ordered_json& j, const Rejection& r);

enum class RecordFormat {
    delimited,   // comma-separated with header row
    json_lines,  // one JSON object per line, same field names
};

// .jsonl / .ndjson select json_lines, everything else delimited.
RecordFormat detect_format(std::string_view path);

struct ParseResult {
    std::vector<PublicationRecord> records;
    std::vector<Rejection> rejections;
};

// Bad rows are collected as rejections and never abort the parse. Throws
// DataError when the stream is unreadable or the header lacks required columns.
ParseResult parse_records(std::istream& in, RecordFormat format);

struct DedupResult {
    std::vector<PublicationRecord> records;
    std::vector<std::string> warnings;
};

// Drops repeated source_id values inside one award, keeping the first. The
// same paper may legitimately be listed under two different awards.
DedupResult deduplicate_per_award(std::span<const PublicationRecord> records);

struct EligibilityPolicy {
    std::set<PubType> included_types;
    bool require_fwci = true;
    double low_fwci_threshold = 0.1;

    // Original research only: article, conference paper, letter, note.
    static EligibilityPolicy original_research();

    // Throws std::invalid_argument on an empty type set or negative threshold.
    void validate() const;
};

std::vector<PublicationRecord> filter_eligible(std::span<const PublicationRecord> records,
                                               const EligibilityPolicy& policy);

struct LowFwciSplit {
    std::vector<PublicationRecord> low;
    std::vector<PublicationRecord> main;
};

// Every record must carry an FWCI value (std::invalid_argument otherwise).
LowFwciSplit split_low_fwci(std::span<const PublicationRecord> records, double threshold);

struct AwardSummary {
    std::string award_code;
    std::size_t n_papers = 0;
    std::optional<double> mean_fwci;
    std::optional<double> budget;
    std::optional<double> cost_per_paper;
};

using BudgetTable = std::map<std::string, double>;

struct BudgetParseResult {
    BudgetTable budgets;
    std::vector<Rejection> rejections;
};

// Two columns: award_code, budget_eur (header row required).
BudgetParseResult parse_budgets(std::istream& in);

// One summary per distinct award code, sorted by code. Records without an
// FWCI value count as papers but do not enter the mean.
std::vector<AwardSummary> summarize_awards(std::span<const PublicationRecord> records,
                                           const BudgetTable& budgets = {});

struct CorpusTotals {
    std::size_t n_awards = 0;
    std::size_t n_papers = 0;
    std::optional<double> total_budget;
    std::optional<double> cost_per_paper;
};

// Budget total and cost per paper cover awards that have a budget entry.
CorpusTotals corpus_totals(std::span<const AwardSummary> summaries);

}  // namespace fwci
