#pragma once

#include "excellence/indicator.hpp"

#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace excellence {

enum class ReportFormat { table, tsv, json };
[[nodiscard]] std::optional<ReportFormat> parse_report_format(std::string_view name);

// Columns for all three formats:
//   rank, institution_id, output, top10_count, excellence_pct, verdict_vs_10pct, z_vs_10pct
// TSV rows for ineligible institutions follow the ranked rows with rank "-" and
// verdict "ineligible". The TSV carries no metadata so that identical tables are
// byte-identical regardless of input file names.
void write_report_tsv(std::ostream& out, const RankingReport& report);
void write_report_json(std::ostream& out, const RankingReport& report);
void write_report_table(std::ostream& out, const RankingReport& report);
void write_report(std::ostream& out, const RankingReport& report, ReportFormat format);

/**
 * Reads an institution table (tab-separated, header row) for use without a corpus.
 *
 * Required columns: institution_id, output, excellence_pct. When a
 * top10_count column is present the share is taken as top10_count / output,
 * otherwise from the (possibly rounded) percentage. A report written by
 * write_report_tsv is accepted; the extra columns are ignored. Eligibility is
 * set from `min_output`. Throws DataError on malformed input.
 */
[[nodiscard]] std::vector<InstitutionStats> read_stats_table(std::istream& in, std::size_t min_output);

}  // namespace excellence
