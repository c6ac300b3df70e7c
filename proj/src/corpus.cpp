#include "fwci/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <iterator>
#include <regex>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <variant>

#include "fwci/errors.hpp"

namespace fwci {

namespace {

std::string_view trim(std::string_view s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    const auto b = std::find_if(s.begin(), s.end(), not_space);
    const auto e = std::find_if(s.rbegin(), s.rend(), not_space).base();
    return b < e ? std::string_view(b, e) : std::string_view{};
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

template <class T>
std::optional<T> parse_number(std::string_view text) {
    text = trim(text);
    T value{};
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) return std::nullopt;
    return value;
}

// ---------------------------------------------------------------------------
// Delimited text (RFC 4180 style: quoted fields, doubled quotes, embedded
// separators and newlines).

struct CsvRow {
    std::vector<std::string> fields;
    std::string raw;
};

class CsvReader {
public:
    explicit CsvReader(std::string text) : text_(std::move(text)) {
        if (text_.starts_with("\xEF\xBB\xBF")) pos_ = 3;
    }

    bool next(CsvRow& row) {
        while (pos_ < text_.size()) {
            const std::size_t start = pos_;
            row.fields.clear();
            std::string field;
            bool quoted = false;
            bool any = false;
            for (; pos_ < text_.size(); ++pos_) {
                const char c = text_[pos_];
                if (quoted) {
                    if (c == '"') {
                        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '"') {
                            field.push_back('"');
                            ++pos_;
                        } else {
                            quoted = false;
                        }
                    } else {
                        field.push_back(c);
                    }
                    continue;
                }
                if (c == '"') {
                    quoted = true;
                    any = true;
                } else if (c == ',') {
                    row.fields.push_back(std::move(field));
                    field.clear();
                    any = true;
                } else if (c == '\n' || c == '\r') {
                    break;
                } else {
                    field.push_back(c);
                    if (!std::isspace(static_cast<unsigned char>(c))) any = true;
                }
            }
            std::size_t stop = pos_;
            if (pos_ < text_.size() && text_[pos_] == '\r') ++pos_;
            if (pos_ < text_.size() && text_[pos_] == '\n') ++pos_;
            if (!any) continue;  // blank line
            row.fields.push_back(std::move(field));
            row.raw = text_.substr(start, stop - start);
            return true;
        }
        return false;
    }

private:
    std::string text_;
    std::size_t pos_ = 0;
};

std::string slurp(std::istream& in) {
    if (!in) throw DataError("input stream is not readable");
    std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (in.bad()) throw DataError("failed reading input stream");
    return text;
}

// ---------------------------------------------------------------------------
// Row validation shared by both input formats.

constexpr std::string_view kFields[] = {"award_code", "year", "pub_type", "fwci",
                                        "citations", "title", "source_id"};
constexpr std::string_view kRequired[] = {"award_code", "year", "pub_type", "fwci"};

using Cells = std::unordered_map<std::string, std::string>;

std::optional<std::string> cell(const Cells& cells, std::string_view name) {
    auto it = cells.find(std::string(name));
    if (it == cells.end()) return std::nullopt;
    return it->second;
}

// Returns a record or the rejection reason.
std::variant<PublicationRecord, std::string> validate_row(const Cells& cells) {
    PublicationRecord r;

    const std::string raw_code = cell(cells, "award_code").value_or("");
    auto code = normalize_award_code(raw_code);
    if (!code) return "unrecognised award code '" + raw_code + "'";
    r.award_code = std::move(*code);

    const std::string year = cell(cells, "year").value_or("");
    auto y = parse_number<int>(year);
    if (!y) return "invalid year '" + year + "'";
    r.year = *y;

    const std::string type(trim(cell(cells, "pub_type").value_or("")));
    if (type.empty()) return std::string("missing publication type");
    r.pub_type = parse_pub_type(type);

    const std::string fwci(trim(cell(cells, "fwci").value_or("")));
    if (!fwci.empty()) {
        auto v = parse_number<double>(fwci);
        if (!v || !std::isfinite(*v)) return "invalid FWCI '" + fwci + "'";
        if (*v < 0.0) return "negative FWCI '" + fwci + "'";
        r.fwci = *v;
    }

    const std::string citations(trim(cell(cells, "citations").value_or("")));
    if (!citations.empty()) {
        auto c = parse_number<std::int64_t>(citations);
        if (!c || *c < 0) return "invalid citation count '" + citations + "'";
        r.citations = *c;
    }

    r.title = cell(cells, "title").value_or("");
    r.source_id = std::string(trim(cell(cells, "source_id").value_or("")));
    return r;
}

void accept_row(ParseResult& out, std::size_t row, const Cells& cells, std::string raw) {
    auto result = validate_row(cells);
    if (auto* rec = std::get_if<PublicationRecord>(&result)) {
        out.records.push_back(std::move(*rec));
    } else {
        out.rejections.push_back({row, std::get<std::string>(std::move(result)), std::move(raw)});
    }
}

ParseResult parse_delimited(std::istream& in) {
    CsvReader reader(slurp(in));
    ParseResult out;
    CsvRow row;
    if (!reader.next(row)) return out;  // empty input: no header, no records

    std::vector<std::string> header;
    for (const auto& f : row.fields) header.push_back(lower(trim(f)));
    for (auto name : kRequired) {
        if (std::find(header.begin(), header.end(), name) == header.end()) {
            throw DataError("input header lacks required column '" + std::string(name) + "'");
        }
    }

    std::size_t row_no = 0;
    while (reader.next(row)) {
        ++row_no;
        if (row.fields.size() != header.size()) {
            out.rejections.push_back({row_no,
                                      "expected " + std::to_string(header.size()) + " fields, found " +
                                          std::to_string(row.fields.size()),
                                      row.raw});
            continue;
        }
        Cells cells;
        for (std::size_t i = 0; i < header.size(); ++i) cells[header[i]] = row.fields[i];
        accept_row(out, row_no, cells, row.raw);
    }
    return out;
}

ParseResult parse_json_lines(std::istream& in) {
    if (!in) throw DataError("input stream is not readable");
    ParseResult out;
    std::string line;
    std::size_t row_no = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        ++row_no;
        nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) {
            out.rejections.push_back({row_no, "not a JSON object", line});
            continue;
        }
        Cells cells;
        for (auto name : kFields) {
            auto it = obj.find(std::string(name));
            if (it == obj.end() || it->is_null()) continue;
            cells[std::string(name)] = it->is_string() ? it->get<std::string>() : it->dump();
        }
        accept_row(out, row_no, cells, line);
    }
    if (in.bad()) throw DataError("failed reading input stream");
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(PubType type) {
    switch (type) {
        case PubType::article: return "article";
        case PubType::conference_paper: return "conference_paper";
        case PubType::letter: return "letter";
        case PubType::note: return "note";
        case PubType::review: return "review";
        case PubType::editorial: return "editorial";
        case PubType::short_survey: return "short_survey";
        case PubType::book_chapter: return "book_chapter";
        case PubType::other: return "other";
    }
    return "other";
}

PubType parse_pub_type(std::string_view text) {
    std::string key = lower(trim(text));
    std::replace(key.begin(), key.end(), ' ', '_');
    std::replace(key.begin(), key.end(), '-', '_');
    static const std::pair<std::string_view, PubType> table[] = {
        {"article", PubType::article},
        {"conference_paper", PubType::conference_paper},
        {"letter", PubType::letter},
        {"note", PubType::note},
        {"review", PubType::review},
        {"editorial", PubType::editorial},
        {"short_survey", PubType::short_survey},
        {"book_chapter", PubType::book_chapter},
    };
    for (const auto& [name, type] : table) {
        if (key == name) return type;
    }
    return PubType::other;
}

std::optional<std::string> normalize_award_code(std::string_view raw) {
    static const std::regex canonical(R"(\d{2}/IA/\d{4})");
    std::string code(trim(raw));
    if (code.starts_with("SFI/")) code.erase(0, 4);
    const auto first = code.find('/');
    if (first != std::string::npos && code.compare(first + 1, 3, "1A/") == 0) {
        code[first + 1] = 'I';
    }
    if (!std::regex_match(code, canonical)) return std::nullopt;
    return code;
}

void to_json(nlohmann::ordered_json& j, const PublicationRecord& r) {
    j = nlohmann::ordered_json{
        {"award_code", r.award_code},
        {"year", r.year},
        {"pub_type", to_string(r.pub_type)},
        {"fwci", nullptr},
        {"citations", nullptr},
        {"title", r.title},
        {"source_id", r.source_id},
    };
    if (r.fwci) j["fwci"] = *r.fwci;
    if (r.citations) j["citations"] = *r.citations;
}

void to_json(nlohmann::ordered_json& j, const Rejection& r) {
    j = nlohmann::ordered_json{{"row", r.row}, {"reason", r.reason}, {"raw", r.raw}};
}

RecordFormat detect_format(std::string_view path) {
    const std::string p = lower(path);
    if (p.ends_with(".jsonl") || p.ends_with(".ndjson")) return RecordFormat::json_lines;
    return RecordFormat::delimited;
}

ParseResult parse_records(std::istream& in, RecordFormat format) {
    return format == RecordFormat::json_lines ? parse_json_lines(in) : parse_delimited(in);
}

DedupResult deduplicate_per_award(std::span<const PublicationRecord> records) {
    DedupResult out;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& r : records) {
        if (!r.source_id.empty() && !seen.emplace(r.award_code, r.source_id).second) {
            out.warnings.push_back("duplicate source_id " + r.source_id + " in award " + r.award_code +
                                   "; keeping the first occurrence");
            continue;
        }
        out.records.push_back(r);
    }
    return out;
}

EligibilityPolicy EligibilityPolicy::original_research() {
    return EligibilityPolicy{
        {PubType::article, PubType::conference_paper, PubType::letter, PubType::note},
        true,
        0.1,
    };
}

void EligibilityPolicy::validate() const {
    if (included_types.empty()) throw std::invalid_argument("eligibility policy includes no publication types");
    if (!(low_fwci_threshold >= 0.0)) throw std::invalid_argument("low FWCI threshold must be non-negative");
}

std::vector<PublicationRecord> filter_eligible(std::span<const PublicationRecord> records,
                                               const EligibilityPolicy& policy) {
    policy.validate();
    std::vector<PublicationRecord> out;
    for (const auto& r : records) {
        if (!policy.included_types.contains(r.pub_type)) continue;
        if (policy.require_fwci && !r.fwci) continue;
        out.push_back(r);
    }
    return out;
}

LowFwciSplit split_low_fwci(std::span<const PublicationRecord> records, double threshold) {
    LowFwciSplit out;
    for (const auto& r : records) {
        if (!r.fwci) throw std::invalid_argument("split_low_fwci needs an FWCI value on every record");
        (*r.fwci < threshold ? out.low : out.main).push_back(r);
    }
    return out;
}

BudgetParseResult parse_budgets(std::istream& in) {
    CsvReader reader(slurp(in));
    BudgetParseResult out;
    CsvRow row;
    if (!reader.next(row)) return out;

    std::vector<std::string> header;
    for (const auto& f : row.fields) header.push_back(lower(trim(f)));
    const auto col = [&](std::string_view name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw DataError("budget header lacks required column '" + std::string(name) + "'");
        }
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t code_col = col("award_code");
    const std::size_t budget_col = col("budget_eur");

    std::size_t row_no = 0;
    while (reader.next(row)) {
        ++row_no;
        if (row.fields.size() != header.size()) {
            out.rejections.push_back({row_no, "wrong number of fields", row.raw});
            continue;
        }
        auto code = normalize_award_code(row.fields[code_col]);
        if (!code) {
            out.rejections.push_back({row_no, "unrecognised award code '" + row.fields[code_col] + "'", row.raw});
            continue;
        }
        auto amount = parse_number<double>(row.fields[budget_col]);
        if (!amount || !std::isfinite(*amount) || *amount < 0.0) {
            out.rejections.push_back({row_no, "invalid budget '" + row.fields[budget_col] + "'", row.raw});
            continue;
        }
        if (!out.budgets.emplace(*code, *amount).second) {
            out.rejections.push_back({row_no, "duplicate budget entry for " + *code, row.raw});
        }
    }
    return out;
}

std::vector<AwardSummary> summarize_awards(std::span<const PublicationRecord> records,
                                           const BudgetTable& budgets) {
    struct Accum {
        std::size_t papers = 0;
        std::size_t with_fwci = 0;
        double fwci_sum = 0.0;
    };
    std::map<std::string, Accum> by_award;
    for (const auto& r : records) {
        auto& a = by_award[r.award_code];
        ++a.papers;
        if (r.fwci) {
            ++a.with_fwci;
            a.fwci_sum += *r.fwci;
        }
    }

    std::vector<AwardSummary> out;
    out.reserve(by_award.size());
    for (const auto& [code, a] : by_award) {
        AwardSummary s;
        s.award_code = code;
        s.n_papers = a.papers;
        if (a.with_fwci > 0) s.mean_fwci = a.fwci_sum / static_cast<double>(a.with_fwci);
        if (auto it = budgets.find(code); it != budgets.end()) {
            s.budget = it->second;
            s.cost_per_paper = it->second / static_cast<double>(a.papers);
        }
        out.push_back(std::move(s));
    }
    return out;
}

CorpusTotals corpus_totals(std::span<const AwardSummary> summaries) {
    CorpusTotals t;
    t.n_awards = summaries.size();
    std::size_t budgeted_papers = 0;
    for (const auto& s : summaries) {
        t.n_papers += s.n_papers;
        if (s.budget) {
            t.total_budget = t.total_budget.value_or(0.0) + *s.budget;
            budgeted_papers += s.n_papers;
        }
    }
    if (t.total_budget && budgeted_papers > 0) {
        t.cost_per_paper = *t.total_budget / static_cast<double>(budgeted_papers);
    }
    return t;
}

}  // namespace fwci
