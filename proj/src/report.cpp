#include "excellence/report.hpp"

#include "detail/text.hpp"
#include "excellence/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace excellence {

std::optional<ReportFormat> parse_report_format(std::string_view name) {
    if (name == "table") return ReportFormat::table;
    if (name == "tsv") return ReportFormat::tsv;
    if (name == "json") return ReportFormat::json;
    return std::nullopt;
}

namespace {

constexpr std::array<std::string_view, 7> kColumns{"rank",           "institution_id",   "output",    "top10_count",
                                                   "excellence_pct", "verdict_vs_10pct", "z_vs_10pct"};

std::vector<std::vector<std::string>> report_rows(const RankingReport& report) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : report.ranked) {
        rows.push_back({std::to_string(r.rank), r.stats.institution_id, std::to_string(r.stats.output_n),
                        std::to_string(r.stats.top_t), display_pct(r.stats.top_t, r.stats.output_n),
                        std::string(to_string(r.verdict)), r.z_vs_expected ? detail::fixed(*r.z_vs_expected, 6) : "NA"});
    }
    for (const auto& s : report.appendix) {
        rows.push_back({"-", s.institution_id, std::to_string(s.output_n), std::to_string(s.top_t),
                        display_pct(s.top_t, s.output_n), "ineligible", "NA"});
    }
    return rows;
}

std::string_view order_name(RankOrder o) { return o == RankOrder::excellence ? "excellence" : "output"; }

nlohmann::ordered_json stats_json(const InstitutionStats& s) {
    nlohmann::ordered_json j;
    j["institution_id"] = s.institution_id;
    j["output"] = s.output_n;
    j["top10_count"] = s.top_t;
    j["excellence_pct"] = std::stod(display_pct(s.top_t, s.output_n));
    return j;
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find('\t', start);
        out.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

void write_report_tsv(std::ostream& out, const RankingReport& report) {
    for (std::size_t i = 0; i < kColumns.size(); ++i) out << (i ? "\t" : "") << kColumns[i];
    out << '\n';
    for (const auto& row : report_rows(report)) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "\t" : "") << row[i];
        out << '\n';
    }
}

void write_report_json(std::ostream& out, const RankingReport& report) {
    const auto& m = report.metadata;
    nlohmann::ordered_json j;
    j["metadata"] = {{"window", {m.window.min_year, m.window.max_year}},
                     {"provenance", m.provenance},
                     {"min_output", m.min_output},
                     {"per_year_eligibility", m.per_year_eligibility},
                     {"order", order_name(m.order)},
                     {"alpha", m.alpha},
                     {"correction", m.correction},
                     {"alpha_effective", m.alpha_effective},
                     {"warnings", m.warnings}};
    auto ranked = nlohmann::ordered_json::array();
    for (const auto& r : report.ranked) {
        nlohmann::ordered_json row;
        row["rank"] = r.rank;
        const auto fields = stats_json(r.stats);
        for (const auto& [k, v] : fields.items()) row[k] = v;
        row["verdict_vs_10pct"] = to_string(r.verdict);
        row["z_vs_10pct"] = r.z_vs_expected ? nlohmann::ordered_json(*r.z_vs_expected) : nlohmann::ordered_json();
        ranked.push_back(std::move(row));
    }
    auto appendix = nlohmann::ordered_json::array();
    for (const auto& s : report.appendix) appendix.push_back(stats_json(s));
    j["ranked"] = std::move(ranked);
    j["appendix"] = std::move(appendix);
    out << j.dump(2) << '\n';
}

void write_report_table(std::ostream& out, const RankingReport& report) {
    auto rows = report_rows(report);
    std::vector<std::size_t> width(kColumns.size());
    for (std::size_t i = 0; i < kColumns.size(); ++i) width[i] = kColumns[i].size();
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    }
    auto emit = [&](auto&& cell_at) {
        for (std::size_t i = 0; i < kColumns.size(); ++i) {
            std::string_view cell = cell_at(i);
            // text columns left-aligned, numbers right-aligned
            const bool left = i == 1 || i == 5;
            std::string pad(width[i] - cell.size(), ' ');
            out << (i ? "  " : "") << (left ? std::string(cell) + pad : pad + std::string(cell));
        }
        out << '\n';
    };
    emit([&](std::size_t i) { return kColumns[i]; });
    const std::size_t ranked = report.ranked.size();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (r == ranked) out << "\nNot ranked (output below " << report.metadata.min_output << "):\n";
        emit([&](std::size_t i) { return std::string_view(rows[r][i]); });
    }
    if (ranked == 0) out << "(no eligible institutions)\n";
}

void write_report(std::ostream& out, const RankingReport& report, ReportFormat format) {
    switch (format) {
        case ReportFormat::table: write_report_table(out, report); break;
        case ReportFormat::tsv: write_report_tsv(out, report); break;
        case ReportFormat::json: write_report_json(out, report); break;
    }
}

std::vector<InstitutionStats> read_stats_table(std::istream& in, std::size_t min_output) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("stats table is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = split_tabs(line);
    auto column = [&](std::string_view name) -> std::optional<std::size_t> {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) return std::nullopt;
        return static_cast<std::size_t>(it - header.begin());
    };
    auto id_col = column("institution_id");
    auto out_col = column("output");
    auto pct_col = column("excellence_pct");
    auto top_col = column("top10_count");
    if (!id_col || !out_col || !pct_col) {
        throw DataError("stats table header must contain institution_id, output and excellence_pct");
    }

    std::vector<InstitutionStats> stats;
    std::set<std::string> seen;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_tabs(line);
        auto fail = [&](const std::string& why) {
            return DataError("stats table line " + std::to_string(line_no) + ": " + why);
        };
        if (cells.size() != header.size()) throw fail("expected " + std::to_string(header.size()) + " columns");

        InstitutionStats s;
        s.institution_id = cells[*id_col];
        if (s.institution_id.empty()) throw fail("missing institution_id");
        if (!seen.insert(s.institution_id).second) throw fail("duplicate institution '" + s.institution_id + "'");

        const auto& out_cell = cells[*out_col];
        auto [p1, e1] = std::from_chars(out_cell.data(), out_cell.data() + out_cell.size(), s.output_n);
        if (e1 != std::errc{} || p1 != out_cell.data() + out_cell.size() || s.output_n == 0) {
            throw fail("output must be a positive integer");
        }

        if (top_col && !cells[*top_col].empty()) {
            const auto& t_cell = cells[*top_col];
            auto [p2, e2] = std::from_chars(t_cell.data(), t_cell.data() + t_cell.size(), s.top_t);
            if (e2 != std::errc{} || p2 != t_cell.data() + t_cell.size() || s.top_t > s.output_n) {
                throw fail("top10_count must be an integer between 0 and output");
            }
            s.excellence_pct = 100.0 * static_cast<double>(s.top_t) / static_cast<double>(s.output_n);
        } else {
            const auto& pct_cell = cells[*pct_col];
            double pct = 0.0;
            auto [p3, e3] = std::from_chars(pct_cell.data(), pct_cell.data() + pct_cell.size(), pct);
            if (e3 != std::errc{} || p3 != pct_cell.data() + pct_cell.size() || !(pct >= 0.0 && pct <= 100.0)) {
                throw fail("excellence_pct must be a number in [0, 100]");
            }
            s.excellence_pct = pct;
            s.top_t = static_cast<std::size_t>(std::llround(pct / 100.0 * static_cast<double>(s.output_n)));
        }
        s.eligible = s.output_n >= min_output;
        stats.push_back(std::move(s));
    }
    std::sort(stats.begin(), stats.end(),
              [](const InstitutionStats& a, const InstitutionStats& b) { return a.institution_id < b.institution_id; });
    return stats;
}

}  // namespace excellence
