#include "excellence/corpus.hpp"

#include "detail/text.hpp"
#include "excellence/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace excellence {

using detail::csv_escape;

namespace {

constexpr std::string_view kCsvHeader = "paper_id,year,subject_areas,citations,institutions";
constexpr char kListSeparator = '|';

// Validation failure for a single record; turned into a RecordError by the loader.
struct RecordInvalid {
    std::string reason;
};

std::string label_problem(const std::vector<std::string>& labels, std::string_view what) {
    if (labels.empty()) return "empty " + std::string(what);
    std::set<std::string_view> seen;
    for (const auto& l : labels) {
        if (l.empty()) return "empty label in " + std::string(what);
        if (l.find(kListSeparator) != std::string::npos) return "label '" + l + "' in " + std::string(what) + " contains '|'";
        if (!seen.insert(l).second) return "duplicate label '" + l + "' in " + std::string(what);
    }
    return {};
}

// Returns an empty string when the record is valid.
std::string record_problem(const PaperRecord& p) {
    if (p.paper_id.empty()) return "missing paper_id";
    if (p.citations < 0) return "negative citations";
    if (auto s = label_problem(p.subject_areas, "subject_areas"); !s.empty()) return s;
    if (auto s = label_problem(p.institutions, "institutions"); !s.empty()) return s;
    return {};
}

void canonicalize(PaperRecord& p) {
    std::sort(p.subject_areas.begin(), p.subject_areas.end());
    std::sort(p.institutions.begin(), p.institutions.end());
}

template <class Int>
std::optional<Int> parse_int(std::string_view s) {
    Int value{};
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    if (!s.empty() && s.front() == '+') return std::nullopt;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || s.empty()) return std::nullopt;
    return value;
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    if (s.empty()) return out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(kListSeparator, start);
        out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

// RFC 4180 fields on one physical line: quoted fields may contain commas and "" escapes.
std::optional<std::vector<std::string>> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    bool field_was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            if (!cur.empty() || field_was_quoted) return std::nullopt;
            quoted = true;
            field_was_quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
            field_was_quoted = false;
        } else {
            if (field_was_quoted) return std::nullopt;
            cur.push_back(c);
        }
    }
    if (quoted) return std::nullopt;
    fields.push_back(std::move(cur));
    return fields;
}

std::string join_list(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out.push_back(kListSeparator);
        out += v[i];
    }
    return out;
}

PaperRecord parse_csv_record(std::string_view line, std::string& id_out) {
    auto fields = split_csv_line(line);
    if (!fields) throw RecordInvalid{"unbalanced quotes"};
    if (fields->size() != 5) throw RecordInvalid{"expected 5 fields, found " + std::to_string(fields->size())};
    auto& f = *fields;
    PaperRecord p;
    p.paper_id = f[0];
    id_out = p.paper_id;
    if (p.paper_id.empty()) throw RecordInvalid{"missing paper_id"};
    auto year = parse_int<int>(f[1]);
    if (!year) throw RecordInvalid{f[1].empty() ? "missing year" : "malformed year"};
    p.year = *year;
    p.subject_areas = split_list(f[2]);
    auto cites = parse_int<std::int64_t>(f[3]);
    if (!cites) throw RecordInvalid{f[3].empty() ? "missing citations" : "malformed citations"};
    p.citations = *cites;
    p.institutions = split_list(f[4]);
    return p;
}

std::vector<std::string> json_string_list(const nlohmann::json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_array()) throw RecordInvalid{std::string("field '") + key + "' must be an array of strings"};
    std::vector<std::string> out;
    for (const auto& e : v) {
        if (!e.is_string()) throw RecordInvalid{std::string("field '") + key + "' must be an array of strings"};
        out.push_back(e.get<std::string>());
    }
    return out;
}

PaperRecord parse_jsonl_record(std::string_view line, std::string& id_out) {
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw RecordInvalid{"malformed JSON"};
    if (!j.is_object()) throw RecordInvalid{"record is not a JSON object"};
    for (const char* key : {"paper_id", "year", "subject_areas", "citations", "institutions"}) {
        if (!j.contains(key)) throw RecordInvalid{std::string("missing field '") + key + "'"};
    }
    PaperRecord p;
    if (!j["paper_id"].is_string()) throw RecordInvalid{"paper_id must be a string"};
    p.paper_id = j["paper_id"].get<std::string>();
    id_out = p.paper_id;
    if (p.paper_id.empty()) throw RecordInvalid{"missing paper_id"};
    const auto& year = j["year"];
    if (!year.is_number_integer()) throw RecordInvalid{"malformed year"};
    if (year.get<std::int64_t>() < std::numeric_limits<int>::min() ||
        year.get<std::int64_t>() > std::numeric_limits<int>::max()) {
        throw RecordInvalid{"malformed year"};
    }
    p.year = year.get<int>();
    p.subject_areas = json_string_list(j, "subject_areas");
    const auto& cites = j["citations"];
    if (!cites.is_number_integer()) {
        if (cites.is_number() && cites.get<double>() < 0) throw RecordInvalid{"negative citations"};
        throw RecordInvalid{"malformed citations"};
    }
    if (cites.is_number_unsigned() && cites.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
        throw RecordInvalid{"malformed citations"};
    }
    p.citations = cites.get<std::int64_t>();
    p.institutions = json_string_list(j, "institutions");
    return p;
}

std::string window_text(const YearWindow& w) {
    return "[" + std::to_string(w.min_year) + "," + std::to_string(w.max_year) + "]";
}

}  // namespace

CorpusFormat format_from_path(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    return (ext == ".jsonl" || ext == ".json") ? CorpusFormat::jsonl : CorpusFormat::csv;
}

std::optional<CorpusFormat> parse_format(std::string_view name) {
    if (name == "csv") return CorpusFormat::csv;
    if (name == "jsonl") return CorpusFormat::jsonl;
    return std::nullopt;
}

Corpus::Corpus(std::vector<PaperRecord> papers, YearWindow window, std::string provenance)
    : papers_(std::move(papers)), window_(window), provenance_(std::move(provenance)) {
    if (papers_.empty()) throw DataError("empty corpus: no valid records");
    if (window_.min_year > window_.max_year) throw DataError("invalid year window " + window_text(window_));
    for (auto& p : papers_) {
        if (auto problem = record_problem(p); !problem.empty()) {
            throw DataError("invalid paper '" + p.paper_id + "': " + problem);
        }
        if (!window_.contains(p.year)) {
            throw DataError("paper '" + p.paper_id + "' year " + std::to_string(p.year) + " outside window " + window_text(window_));
        }
        canonicalize(p);
    }
    std::sort(papers_.begin(), papers_.end(),
              [](const PaperRecord& a, const PaperRecord& b) { return a.paper_id < b.paper_id; });
    auto dup = std::adjacent_find(papers_.begin(), papers_.end(),
                                  [](const PaperRecord& a, const PaperRecord& b) { return a.paper_id == b.paper_id; });
    if (dup != papers_.end()) throw DataError("duplicate paper_id '" + dup->paper_id + "'");
}

std::optional<std::size_t> Corpus::find(std::string_view paper_id) const {
    auto it = std::lower_bound(papers_.begin(), papers_.end(), paper_id,
                               [](const PaperRecord& p, std::string_view id) { return p.paper_id < id; });
    if (it == papers_.end() || it->paper_id != paper_id) return std::nullopt;
    return static_cast<std::size_t>(it - papers_.begin());
}

LoadResult load_corpus(std::istream& in, const LoadOptions& options) {
    std::vector<PaperRecord> accepted;
    std::vector<RecordError> rejected;
    std::unordered_map<std::string, std::size_t> first_line_of;

    std::string line;
    std::size_t line_no = 0;
    bool header_seen = options.format != CorpusFormat::csv;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (!header_seen) {
            if (line != kCsvHeader) {
                throw DataError("line 1: expected CSV header '" + std::string(kCsvHeader) + "'");
            }
            header_seen = true;
            continue;
        }
        if (line.find_first_not_of(" \t") == std::string::npos) continue;

        std::string id;
        try {
            PaperRecord p = options.format == CorpusFormat::csv ? parse_csv_record(line, id)
                                                                : parse_jsonl_record(line, id);
            if (auto [it, inserted] = first_line_of.emplace(p.paper_id, line_no); !inserted) {
                throw DataError("duplicate paper_id '" + p.paper_id + "' on lines " + std::to_string(it->second) +
                                " and " + std::to_string(line_no));
            }
            if (auto problem = record_problem(p); !problem.empty()) throw RecordInvalid{problem};
            if (options.window && !options.window->contains(p.year)) {
                throw RecordInvalid{"year " + std::to_string(p.year) + " outside window " + window_text(*options.window)};
            }
            accepted.push_back(std::move(p));
        } catch (const RecordInvalid& e) {
            if (!id.empty()) first_line_of.emplace(id, line_no);
            rejected.push_back({line_no, id, e.reason});
        }
    }
    if (!header_seen) throw DataError("missing CSV header");
    if (accepted.empty()) throw DataError("empty corpus: no valid records");

    YearWindow window;
    if (options.window) {
        window = *options.window;
    } else {
        auto [lo, hi] = std::minmax_element(accepted.begin(), accepted.end(),
                                            [](const PaperRecord& a, const PaperRecord& b) { return a.year < b.year; });
        window = {lo->year, hi->year};
    }
    std::size_t n = accepted.size();
    return LoadResult{Corpus(std::move(accepted), window, options.provenance), n, std::move(rejected)};
}

LoadResult load_corpus(const std::filesystem::path& path, CorpusFormat format, std::optional<YearWindow> window) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open corpus file '" + path.string() + "'");
    return load_corpus(in, LoadOptions{format, window, path.filename().string()});
}

void write_corpus(std::ostream& out, const Corpus& corpus, CorpusFormat format) {
    if (format == CorpusFormat::csv) {
        out << kCsvHeader << '\n';
        for (const auto& p : corpus.papers()) {
            out << csv_escape(p.paper_id) << ',' << p.year << ',' << csv_escape(join_list(p.subject_areas)) << ','
                << p.citations << ',' << csv_escape(join_list(p.institutions)) << '\n';
        }
        return;
    }
    for (const auto& p : corpus.papers()) {
        nlohmann::ordered_json j;
        j["paper_id"] = p.paper_id;
        j["year"] = p.year;
        j["subject_areas"] = p.subject_areas;
        j["citations"] = p.citations;
        j["institutions"] = p.institutions;
        out << j.dump() << '\n';
    }
}

CorpusSummary corpus_summary(const Corpus& corpus) {
    CorpusSummary s;
    std::set<std::string_view> institutions;
    std::set<std::string_view> areas;
    for (const auto& p : corpus.papers()) {
        ++s.papers;
        ++s.papers_per_year[p.year];
        s.citation_total += static_cast<std::uint64_t>(p.citations);
        institutions.insert(p.institutions.begin(), p.institutions.end());
        areas.insert(p.subject_areas.begin(), p.subject_areas.end());
    }
    s.institutions = institutions.size();
    s.subject_areas = areas.size();
    return s;
}

}  // namespace excellence
