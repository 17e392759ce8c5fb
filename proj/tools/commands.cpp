#include "commands.hpp"

#include "excellence/corpus.hpp"
#include "excellence/errors.hpp"
#include "excellence/indicator.hpp"
#include "excellence/report.hpp"
#include "excellence/sigtest.hpp"
#include "excellence/stratify.hpp"
#include "excellence/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>

namespace excellence::cli {

namespace {

// Thrown for flag combinations CLI11 cannot express; maps to kExitUsage.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

constexpr std::size_t kMaxWarnings = 20;

struct CorpusOptions {
    std::string path;
    std::string input_format;
    std::optional<int> from_year;
    std::optional<int> to_year;
};

void add_corpus_options(CLI::App* cmd, CorpusOptions& o) {
    cmd->add_option("--input-format", o.input_format, "Corpus format (default: from file extension)")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    cmd->add_option("--from", o.from_year, "First publication year of the window (inclusive)");
    cmd->add_option("--to", o.to_year, "Last publication year of the window (inclusive)");
}

void warn_all(std::ostream& err, const std::vector<std::string>& warnings) {
    for (std::size_t i = 0; i < warnings.size() && i < kMaxWarnings; ++i) err << "warning: " << warnings[i] << '\n';
    if (warnings.size() > kMaxWarnings) {
        err << "warning: ... and " << (warnings.size() - kMaxWarnings) << " more\n";
    }
}

LoadResult load(const CorpusOptions& o, std::ostream& err) {
    CorpusFormat format = o.input_format.empty() ? format_from_path(o.path) : *parse_format(o.input_format);
    std::optional<YearWindow> window;
    if (o.from_year || o.to_year) {
        window = YearWindow{o.from_year.value_or(INT_MIN), o.to_year.value_or(INT_MAX)};
        if (window->min_year > window->max_year) throw UsageError("--from must not exceed --to");
    }
    auto result = load_corpus(o.path, format, window);
    std::vector<std::string> notes;
    for (const auto& r : result.rejected) {
        notes.push_back("line " + std::to_string(r.line) + (r.paper_id.empty() ? "" : " (" + r.paper_id + ")") +
                        ": rejected, " + r.reason);
    }
    warn_all(err, notes);
    if (!result.rejected.empty()) {
        err << "loaded " << result.accepted << " records, rejected " << result.rejected.size() << '\n';
    }
    return result;
}

// Writes to --output when given, else to the command's output stream.
template <class Fn>
void emit(const std::string& path, std::ostream& out, Fn&& write) {
    if (path.empty()) {
        write(out);
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw DataError("cannot open output file '" + path + "'");
    write(file);
}

std::string fmt(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

nlohmann::ordered_json result_json(const ProportionTestResult& r) {
    return {{"n1", r.input.n1},
            {"p1", r.input.p1},
            {"t1", r.input.t1()},
            {"n2", r.input.n2},
            {"p2", r.input.p2},
            {"t2", r.input.t2()},
            {"z", r.z},
            {"pooled_p", r.pooled_p},
            {"critical_05", r.critical_05},
            {"critical_01", r.critical_01},
            {"alpha_effective", r.alpha_effective},
            {"significant_05", r.significant_05},
            {"significant_01", r.significant_01},
            {"direction", r.direction}};
}

std::string level_name(double alpha) {
    std::string s = fmt(alpha * 100.0, 4);
    s.erase(s.find_last_not_of('0') + 1);
    if (s.back() == '.') s.pop_back();
    return s + "%";
}

std::string pair_verdict(const ProportionTestResult& r, double alpha) {
    if (!r.significant_05) return "not significant at " + level_name(alpha);
    std::string s = "significant at " + level_name(alpha);
    if (r.significant_01) s += " and at 1%";
    return s + (r.direction > 0 ? " (first higher)" : " (second higher)");
}

std::string expectation_verdict(const ExpectationResult& e, double alpha) {
    switch (e.verdict) {
        case Verdict::above: return "significant above expectation at " + level_name(alpha);
        case Verdict::below: return "significant below expectation at " + level_name(alpha);
        default: return "not significantly different from expectation at " + level_name(alpha);
    }
}

void render_test(std::ostream& out, const ProportionTestResult& r, const std::string& label1, const std::string& label2,
                 const std::string& verdict, double alpha) {
    out << label1 << ": n=" << r.input.n1 << "  p=" << fmt(100.0 * r.input.p1, 1) << "%  t=" << fmt(r.input.t1(), 3)
        << '\n';
    out << label2 << ": n=" << r.input.n2 << "  p=" << fmt(100.0 * r.input.p2, 1) << "%  t=" << fmt(r.input.t2(), 3)
        << '\n';
    out << "pooled p = " << fmt(r.pooled_p, 6) << '\n';
    out << "z = " << fmt(r.z, 3) << '\n';
    out << level_name(alpha) << " level: critical " << fmt(r.critical_05, 3) << ", "
        << (r.significant_05 ? "significant" : "not significant") << '\n';
    out << "1% level: critical " << fmt(r.critical_01, 3) << ", "
        << (r.significant_01 ? "significant" : "not significant") << '\n';
    if (r.alpha_effective != alpha) out << "alpha_effective = " << fmt(r.alpha_effective, 8) << '\n';
    out << "verdict: " << verdict << '\n';
}

Correction correction_of(const std::string& name) { return *parse_correction(name); }

// ---------------------------------------------------------------- rank

struct RankArgs {
    CorpusOptions corpus;
    std::size_t min_output = 100;
    bool per_year = false;
    double alpha = 0.05;
    std::string correction = "none";
    std::string order = "excellence";
    std::string format = "table";
    std::string output;
    unsigned threads = 1;
};

int cmd_rank(const RankArgs& a, std::ostream& out, std::ostream& err) {
    auto loaded = load(a.corpus, err);
    const Corpus& corpus = loaded.corpus;
    const auto strata = build_strata(corpus, a.threads);
    const auto flags = flag_papers(corpus, strata);
    auto stats = aggregate(corpus, flags, EligibilityRule{a.min_output, a.per_year});

    auto report = rank(std::move(stats), a.order == "output" ? RankOrder::output : RankOrder::excellence);
    attach_expectation_tests(report, ComparisonOptions{a.alpha, correction_of(a.correction), kExpectedShare});
    report.metadata.window = corpus.year_window();
    report.metadata.provenance = corpus.provenance();
    report.metadata.min_output = a.min_output;
    report.metadata.per_year_eligibility = a.per_year;
    report.metadata.warnings = stratum_warnings(strata);
    if (report.ranked.empty()) {
        report.metadata.warnings.push_back("no institution reaches the minimum output of " +
                                           std::to_string(a.min_output) + " papers; ranked list is empty");
    }
    warn_all(err, report.metadata.warnings);

    emit(a.output, out, [&](std::ostream& o) { write_report(o, report, *parse_report_format(a.format)); });
    return kExitOk;
}

// ---------------------------------------------------------------- compare

struct CompareArgs {
    std::string inst_a;
    std::string inst_b;
    CorpusOptions corpus;
    std::string stats_path;
    std::size_t min_output = 100;
    double alpha = 0.05;
    std::string correction = "none";
    std::string format = "table";
    std::string output;
    bool all = false;
};

std::vector<InstitutionStats> compare_stats(const CompareArgs& a, std::ostream& err) {
    if (!a.stats_path.empty()) {
        std::ifstream in(a.stats_path, std::ios::binary);
        if (!in) throw DataError("cannot open stats file '" + a.stats_path + "'");
        return read_stats_table(in, a.min_output);
    }
    auto loaded = load(a.corpus, err);
    const auto strata = build_strata(loaded.corpus);
    warn_all(err, stratum_warnings(strata));
    return aggregate(loaded.corpus, flag_papers(loaded.corpus, strata), EligibilityRule{a.min_output, false});
}

const InstitutionStats& find_eligible(const std::vector<InstitutionStats>& stats, const std::string& id,
                                      std::size_t min_output) {
    auto it = std::find_if(stats.begin(), stats.end(), [&](const InstitutionStats& s) { return s.institution_id == id; });
    if (it == stats.end()) throw DataError("unknown institution '" + id + "'");
    if (!it->eligible) {
        throw DataError("institution '" + id + "' is not eligible: output " + std::to_string(it->output_n) +
                        " is below the minimum of " + std::to_string(min_output));
    }
    return *it;
}

int cmd_compare(const CompareArgs& a, std::ostream& out, std::ostream& err) {
    const auto stats = compare_stats(a, err);
    const Correction correction = correction_of(a.correction);

    if (a.all) {
        auto set = compare_all(stats, ComparisonOptions{a.alpha, correction, kExpectedShare});
        if (set.pairwise.empty()) err << "warning: fewer than two eligible institutions; no pairwise tests\n";
        emit(a.output, out, [&](std::ostream& o) { write_pairwise_csv(o, set); });
        return kExitOk;
    }
    if (a.inst_a.empty() || a.inst_b.empty()) throw UsageError("compare needs two institution ids (or --all)");

    const auto& s1 = find_eligible(stats, a.inst_a, a.min_output);
    const auto& s2 = find_eligible(stats, a.inst_b, a.min_output);
    const auto r = two_proportion_z(ProportionInput{s1.output_n, s1.proportion(), s2.output_n, s2.proportion()},
                                    TestLevels{a.alpha, 1, correction});
    emit(a.output, out, [&](std::ostream& o) {
        if (a.format == "json") {
            auto j = result_json(r);
            j["inst_a"] = a.inst_a;
            j["inst_b"] = a.inst_b;
            j["verdict"] = pair_verdict(r, a.alpha);
            o << j.dump(2) << '\n';
        } else {
            render_test(o, r, a.inst_a, a.inst_b, pair_verdict(r, a.alpha), a.alpha);
        }
    });
    return kExitOk;
}

// ---------------------------------------------------------------- calc

struct CalcArgs {
    std::optional<double> n1;
    std::optional<double> p1;
    std::optional<double> n2;
    std::optional<double> p2;
    bool expected = false;
    double expected_pct = 10.0;
    double alpha = 0.05;
    std::string format = "table";
};

std::size_t checked_count(double v, const char* name) {
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e15) {
        throw UsageError(std::string(name) + " must be a positive integer");
    }
    return static_cast<std::size_t>(v);
}

double checked_pct(double v, const char* name) {
    if (!(v >= 0.0 && v <= 100.0)) throw UsageError(std::string(name) + " must be a percentage in [0, 100]");
    return v;
}

int cmd_calc(const CalcArgs& a, std::ostream& out) {
    const std::size_t n1 = checked_count(*a.n1, "n1");
    const double pct1 = checked_pct(*a.p1, "p1");
    const TestLevels levels{a.alpha, 1, Correction::none};

    if (a.expected) {
        if (a.n2 || a.p2) throw UsageError("--expected takes only n1 and p1");
        const double expected = checked_pct(a.expected_pct, "--expected-pct");
        if (expected <= 0.0 || expected >= 100.0) throw UsageError("--expected-pct must lie strictly between 0 and 100");
        const auto e = observed_vs_expected(n1, pct1 / 100.0, expected / 100.0, levels);
        const auto verdict = expectation_verdict(e, a.alpha);
        if (a.format == "json") {
            auto j = result_json(e.test);
            j["mode"] = "expected";
            j["verdict"] = std::string(to_string(e.verdict));
            j["verdict_text"] = verdict;
            out << j.dump(2) << '\n';
        } else {
            render_test(out, e.test, "observed", "expected", verdict, a.alpha);
        }
        return kExitOk;
    }
    if (!a.n2 || !a.p2) throw UsageError("calc needs n1 p1 n2 p2, or n1 p1 with --expected");
    const auto input = ProportionInput::from_percentages(n1, pct1, checked_count(*a.n2, "n2"), checked_pct(*a.p2, "p2"));
    const auto r = two_proportion_z(input, levels);
    if (a.format == "json") {
        auto j = result_json(r);
        j["mode"] = "pairwise";
        j["verdict_text"] = pair_verdict(r, a.alpha);
        out << j.dump(2) << '\n';
    } else {
        render_test(out, r, "institution 1", "institution 2", pair_verdict(r, a.alpha), a.alpha);
    }
    return kExitOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    SynthConfig config;
    std::size_t trials = 1000;
    std::string model = "lognormal";
    double mu = 1.0;
    double sigma = 1.2;
    double nb_r = 1.0;
    double nb_p = 0.1;
    unsigned threads = 1;
    std::string trace;
    std::string output;
};

int cmd_simulate(SimulateArgs a, std::ostream& out) {
    if (a.trials == 0) throw UsageError("--trials must be at least 1");
    if (a.model == "lognormal") {
        a.config.citation_model = LogNormalModel{a.mu, a.sigma};
    } else {
        a.config.citation_model = NegBinomialModel{a.nb_r, a.nb_p};
    }
    try {
        validate(a.config);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    std::vector<TrialTrace> trace;
    const auto result = run_null_experiment(a.config, a.trials, a.threads, a.trace.empty() ? nullptr : &trace);
    if (!a.trace.empty()) {
        std::ofstream file(a.trace, std::ios::binary);
        if (!file) throw DataError("cannot open trace file '" + a.trace + "'");
        write_trace_csv(file, trace);
    }
    emit(a.output, out, [&](std::ostream& o) { write_experiment_json(o, a.config, result); });
    return kExitOk;
}

// ---------------------------------------------------------------- flags-export

struct FlagsArgs {
    CorpusOptions corpus;
    std::string output;
    std::string strata_output;
};

int cmd_flags_export(const FlagsArgs& a, std::ostream& out, std::ostream& err) {
    auto loaded = load(a.corpus, err);
    const auto strata = build_strata(loaded.corpus);
    warn_all(err, stratum_warnings(strata));
    const auto flags = flag_papers(loaded.corpus, strata);
    emit(a.output, out, [&](std::ostream& o) { write_flag_table(o, flags); });
    if (!a.strata_output.empty()) {
        std::ofstream file(a.strata_output, std::ios::binary);
        if (!file) throw DataError("cannot open output file '" + a.strata_output + "'");
        write_strata_diagnostics(file, strata);
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Excellence Indicator: top-10% shares per institution and z-tests for proportions", "excellence"};
    app.require_subcommand(1);

    const std::vector<std::string> corrections{"none", "bonferroni"};

    RankArgs rank_args;
    auto* rank_cmd = app.add_subcommand("rank", "Rank institutions by Excellence Indicator");
    rank_cmd->add_option("corpus", rank_args.corpus.path, "Corpus file (CSV or JSONL)")->required();
    add_corpus_options(rank_cmd, rank_args.corpus);
    rank_cmd->add_option("--min-output", rank_args.min_output, "Minimum output for ranking")->capture_default_str();
    rank_cmd->add_flag("--per-year", rank_args.per_year, "Apply --min-output to every year instead of the window");
    rank_cmd->add_option("--alpha", rank_args.alpha, "Family significance level")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    rank_cmd->add_option("--correction", rank_args.correction, "Family-wise correction")
        ->check(CLI::IsMember(corrections))
        ->capture_default_str();
    rank_cmd->add_option("--order-by", rank_args.order, "Ranking key")
        ->check(CLI::IsMember({"excellence", "output"}))
        ->capture_default_str();
    rank_cmd->add_option("--format", rank_args.format, "Output format")
        ->check(CLI::IsMember({"table", "tsv", "json"}))
        ->capture_default_str();
    rank_cmd->add_option("-o,--output", rank_args.output, "Write the report to a file");
    rank_cmd->add_option("--threads", rank_args.threads, "Worker threads for stratification")
        ->check(CLI::Range(1u, 256u))
        ->capture_default_str();

    CompareArgs cmp;
    auto* cmp_cmd = app.add_subcommand("compare", "Test two institutions' Excellence Indicators against each other");
    cmp_cmd->add_option("inst_a", cmp.inst_a, "First institution id");
    cmp_cmd->add_option("inst_b", cmp.inst_b, "Second institution id");
    auto* corpus_opt = cmp_cmd->add_option("--corpus", cmp.corpus.path, "Corpus file");
    auto* stats_opt = cmp_cmd->add_option("--stats", cmp.stats_path, "Institution table (TSV) instead of a corpus");
    corpus_opt->excludes(stats_opt);
    add_corpus_options(cmp_cmd, cmp.corpus);
    cmp_cmd->add_option("--min-output", cmp.min_output, "Minimum output for eligibility")->capture_default_str();
    cmp_cmd->add_option("--alpha", cmp.alpha, "Family significance level")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmp_cmd->add_option("--correction", cmp.correction, "Family-wise correction (used with --all)")
        ->check(CLI::IsMember(corrections))
        ->capture_default_str();
    cmp_cmd->add_option("--format", cmp.format, "Output format")
        ->check(CLI::IsMember({"table", "json"}))
        ->capture_default_str();
    cmp_cmd->add_flag("--all", cmp.all, "All eligible pairs as CSV");
    cmp_cmd->add_option("-o,--output", cmp.output, "Write the result to a file");

    CalcArgs calc;
    auto* calc_cmd = app.add_subcommand("calc", "Two-proportion calculator on printed outputs and percentages");
    calc_cmd->add_option("n1", calc.n1, "Output of institution 1")->required();
    calc_cmd->add_option("p1", calc.p1, "Excellence Indicator of institution 1 (percent)")->required();
    calc_cmd->add_option("n2", calc.n2, "Output of institution 2");
    calc_cmd->add_option("p2", calc.p2, "Excellence Indicator of institution 2 (percent)");
    calc_cmd->add_flag("--expected", calc.expected, "Test n1/p1 against the expected share");
    calc_cmd->add_option("--expected-pct", calc.expected_pct, "Expected share in percent")->capture_default_str();
    calc_cmd->add_option("--alpha", calc.alpha, "Significance level")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    calc_cmd->add_option("--format", calc.format, "Output format")
        ->check(CLI::IsMember({"table", "json"}))
        ->capture_default_str();

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo check of the 10% expectation and Type-I error");
    sim_cmd->add_option("--seed", sim.config.seed, "Random seed")->capture_default_str();
    sim_cmd->add_option("--trials", sim.trials, "Number of trials")->capture_default_str();
    sim_cmd->add_option("--institutions", sim.config.n_institutions, "Institutions per corpus")->capture_default_str();
    sim_cmd->add_option("--papers-per-institution", sim.config.papers_per_institution, "Papers per institution")
        ->capture_default_str();
    sim_cmd->add_option("--fields", sim.config.fields_count, "Number of subject areas")->capture_default_str();
    sim_cmd->add_option("--from", sim.config.first_year, "First year")->capture_default_str();
    sim_cmd->add_option("--to", sim.config.last_year, "Last year")->capture_default_str();
    sim_cmd->add_option("--model", sim.model, "Citation model")
        ->check(CLI::IsMember({"lognormal", "negbin"}))
        ->capture_default_str();
    sim_cmd->add_option("--mu", sim.mu, "Lognormal mu")->capture_default_str();
    sim_cmd->add_option("--sigma", sim.sigma, "Lognormal sigma")->capture_default_str();
    sim_cmd->add_option("--nb-r", sim.nb_r, "Negative binomial r")->capture_default_str();
    sim_cmd->add_option("--nb-p", sim.nb_p, "Negative binomial p")->capture_default_str();
    sim_cmd->add_option("--threads", sim.threads, "Worker threads")->check(CLI::Range(1u, 256u))->capture_default_str();
    sim_cmd->add_option("--trace", sim.trace, "Per-trial CSV trace file");
    sim_cmd->add_option("-o,--output", sim.output, "Write the JSON summary to a file");

    FlagsArgs flags_args;
    auto* flags_cmd = app.add_subcommand("flags-export", "Export per-paper excellence flags");
    flags_cmd->add_option("corpus", flags_args.corpus.path, "Corpus file")->required();
    add_corpus_options(flags_cmd, flags_args.corpus);
    flags_cmd->add_option("-o,--output", flags_args.output, "Flag table CSV (default: standard output)");
    flags_cmd->add_option("--strata", flags_args.strata_output, "Per-stratum diagnostics CSV");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*rank_cmd) return cmd_rank(rank_args, out, err);
        if (*cmp_cmd) {
            if (cmp.corpus.path.empty() && cmp.stats_path.empty()) throw UsageError("compare needs --corpus or --stats");
            return cmd_compare(cmp, out, err);
        }
        if (*calc_cmd) return cmd_calc(calc, out);
        if (*sim_cmd) return cmd_simulate(sim, out);
        if (*flags_cmd) return cmd_flags_export(flags_args, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\nRun with --help for usage.\n";
        return kExitUsage;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\nRun with --help for usage.\n";
        return kExitUsage;
    } catch (const NoVariabilityError& e) {
        err << "error: " << e.what() << '\n';
        return kExitComputation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitComputation;
    }
    return kExitUsage;
}

}  // namespace excellence::cli
