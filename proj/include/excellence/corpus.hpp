#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace excellence {

/// One publication. The two list fields are kept sorted and duplicate-free.
struct PaperRecord {
    std::string paper_id;
    int year = 0;
    std::vector<std::string> subject_areas;
    std::int64_t citations = 0;
    std::vector<std::string> institutions;

    friend bool operator==(const PaperRecord&, const PaperRecord&) = default;
};

/// Inclusive publication window.
struct YearWindow {
    int min_year = 0;
    int max_year = 0;

    [[nodiscard]] bool contains(int year) const noexcept { return year >= min_year && year <= max_year; }
    friend bool operator==(const YearWindow&, const YearWindow&) = default;
};

enum class CorpusFormat { csv, jsonl };

/// Picks the format from a file extension (".jsonl"/".json" -> jsonl, anything else -> csv).
[[nodiscard]] CorpusFormat format_from_path(const std::filesystem::path& path);
[[nodiscard]] std::optional<CorpusFormat> parse_format(std::string_view name);

/**
 * Immutable, validated publication set.
 *
 * Papers are held in ascending paper_id order regardless of input order, so two
 * loads of the same rows in different order compare equal and every downstream
 * computation sees the same sequence.
 */
class Corpus {
public:
    /// Validates every PaperRecord invariant and the window; throws DataError on violation.
    Corpus(std::vector<PaperRecord> papers, YearWindow window, std::string provenance);

    [[nodiscard]] const std::vector<PaperRecord>& papers() const noexcept { return papers_; }
    [[nodiscard]] std::size_t size() const noexcept { return papers_.size(); }
    [[nodiscard]] const YearWindow& year_window() const noexcept { return window_; }
    [[nodiscard]] const std::string& provenance() const noexcept { return provenance_; }

    /// Index of a paper in papers(), or nullopt.
    [[nodiscard]] std::optional<std::size_t> find(std::string_view paper_id) const;

    /// Equality of paper sets and window; provenance is descriptive and ignored.
    friend bool operator==(const Corpus& a, const Corpus& b) {
        return a.window_ == b.window_ && a.papers_ == b.papers_;
    }

private:
    std::vector<PaperRecord> papers_;
    YearWindow window_;
    std::string provenance_;
};

/// A rejected input record.
struct RecordError {
    std::size_t line = 0;  // 1-based physical line in the input
    std::string paper_id;  // empty when the id itself could not be read
    std::string reason;
};

struct LoadResult {
    Corpus corpus;
    std::size_t accepted = 0;
    std::vector<RecordError> rejected;
};

struct LoadOptions {
    CorpusFormat format = CorpusFormat::csv;
    // When unset, every year is accepted and the window is the span of accepted years.
    std::optional<YearWindow> window;
    std::string provenance;
};

/// Throws DataError when the file is missing, the header is wrong, a paper_id
/// repeats, or no record survives validation. Bad rows are collected in `rejected`.
[[nodiscard]] LoadResult load_corpus(const std::filesystem::path& path, CorpusFormat format,
                                     std::optional<YearWindow> window = std::nullopt);
[[nodiscard]] LoadResult load_corpus(std::istream& in, const LoadOptions& options);

/// Serializes in the same schema load_corpus reads; output is deterministic.
void write_corpus(std::ostream& out, const Corpus& corpus, CorpusFormat format);

struct CorpusSummary {
    std::size_t papers = 0;
    std::size_t institutions = 0;
    std::size_t subject_areas = 0;
    std::map<int, std::size_t> papers_per_year;
    std::uint64_t citation_total = 0;

    friend bool operator==(const CorpusSummary&, const CorpusSummary&) = default;
};

[[nodiscard]] CorpusSummary corpus_summary(const Corpus& corpus);

}  // namespace excellence
