#include "excellence/synth.hpp"

#include "excellence/indicator.hpp"
#include "excellence/sigtest.hpp"
#include "excellence/stratify.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>

namespace excellence {

double SynthRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double SynthRng::uniform_open() {
    double u;
    do {
        u = uniform();
    } while (u == 0.0);
    return u;
}

std::uint64_t SynthRng::below(std::uint64_t bound) {
    // Lemire-style rejection keeps the draw unbiased
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % bound;
}

double SynthRng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_open()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_normal_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

double SynthRng::gamma(double shape) {
    if (shape < 1.0) {
        return gamma(shape + 1.0) * std::pow(uniform_open(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_open();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

std::uint64_t SynthRng::poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 10.0) {
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double prod = uniform_open();
        while (prod > limit) {
            ++k;
            prod *= uniform_open();
        }
        return k;
    }
    // PTRS transformed rejection (Hoermann 1993)
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    while (true) {
        const double u = uniform() - 0.5;
        const double v = uniform_open();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <= -mean + k * loglam - std::lgamma(k + 1.0)) {
            return static_cast<std::uint64_t>(k);
        }
    }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

void validate(const SynthConfig& config) {
    if (config.n_institutions < 1) throw std::invalid_argument("n_institutions must be at least 1");
    if (config.papers_per_institution < 1) throw std::invalid_argument("papers_per_institution must be at least 1");
    if (config.fields_count < 1) throw std::invalid_argument("fields_count must be at least 1");
    if (config.first_year > config.last_year) throw std::invalid_argument("first_year must not exceed last_year");
    if (const auto* ln = std::get_if<LogNormalModel>(&config.citation_model)) {
        if (!std::isfinite(ln->mu)) throw std::invalid_argument("lognormal mu must be finite");
        if (!(std::isfinite(ln->sigma) && ln->sigma > 0.0)) throw std::invalid_argument("lognormal sigma must be positive");
    } else {
        const auto& nb = std::get<NegBinomialModel>(config.citation_model);
        if (!(std::isfinite(nb.r) && nb.r > 0.0)) throw std::invalid_argument("negative binomial r must be positive");
        if (!(nb.p > 0.0 && nb.p < 1.0)) throw std::invalid_argument("negative binomial p must lie in (0, 1)");
    }
}

namespace {

std::string padded(char prefix, std::size_t value, std::size_t count) {
    const std::size_t width = std::to_string(count).size();
    std::string digits = std::to_string(value);
    return std::string(1, prefix) + std::string(width - std::min(width, digits.size()), '0') + digits;
}

std::int64_t draw_citations(SynthRng& rng, const CitationModel& model) {
    constexpr double cap = 1e15;
    if (const auto* ln = std::get_if<LogNormalModel>(&model)) {
        const double x = std::exp(ln->mu + ln->sigma * rng.normal());
        return static_cast<std::int64_t>(std::floor(std::min(x, cap)));
    }
    const auto& nb = std::get<NegBinomialModel>(model);
    const double lambda = rng.gamma(nb.r) * (1.0 - nb.p) / nb.p;
    return static_cast<std::int64_t>(rng.poisson(std::min(lambda, cap)));
}

}  // namespace

Corpus generate(const SynthConfig& config) {
    validate(config);
    SynthRng rng(config.seed);
    const std::size_t total = config.n_institutions * config.papers_per_institution;
    const auto years = static_cast<std::uint64_t>(config.last_year - config.first_year) + 1;

    std::vector<std::size_t> owner(total);
    for (std::size_t i = 0; i < total; ++i) owner[i] = i / config.papers_per_institution;
    for (std::size_t i = total; i > 1; --i) std::swap(owner[i - 1], owner[rng.below(i)]);

    std::vector<PaperRecord> papers;
    papers.reserve(total);
    for (std::size_t i = 0; i < total; ++i) {
        PaperRecord p;
        p.paper_id = padded('S', i + 1, total);
        p.subject_areas = {padded('F', rng.below(config.fields_count) + 1, config.fields_count)};
        p.year = config.first_year + static_cast<int>(rng.below(years));
        p.citations = draw_citations(rng, config.citation_model);
        p.institutions = {padded('I', owner[i] + 1, config.n_institutions)};
        papers.push_back(std::move(p));
    }
    return Corpus(std::move(papers), YearWindow{config.first_year, config.last_year},
                  "synthetic seed=" + std::to_string(config.seed));
}

namespace {

TrialTrace run_trial(const SynthConfig& base, std::size_t trial) {
    SynthConfig cfg = base;
    cfg.seed = derive_seed(base.seed, trial);
    const Corpus corpus = generate(cfg);
    const auto strata = build_strata(corpus);
    const auto flags = flag_papers(corpus, strata);
    const auto stats = aggregate(corpus, flags, EligibilityRule{1, false});

    TrialTrace t;
    t.trial = trial;
    t.seed = cfg.seed;
    t.papers = corpus.size();
    t.institutions = stats.size();
    for (const auto& s : strata) {
        t.memberships += s.size;
        t.core_total += s.core_size;
        t.flagged_total += s.flagged_count;
    }
    for (const auto& s : stats) {
        t.top_total += s.top_t;
        t.output_total += s.output_n;
        const auto r = observed_vs_expected(s.output_n, s.proportion());
        t.rejections_05 += r.test.significant_05 ? 1 : 0;
        t.rejections_01 += r.test.significant_01 ? 1 : 0;
    }
    return t;
}

}  // namespace

NullExperimentResult run_null_experiment(const SynthConfig& config, std::size_t trials, unsigned threads,
                                         std::vector<TrialTrace>* trace) {
    if (trials == 0) throw std::invalid_argument("trials must be at least 1");
    validate(config);

    std::vector<TrialTrace> traces(trials);
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::min<std::size_t>(trials, 256))));
    if (threads == 1) {
        for (std::size_t i = 0; i < trials; ++i) traces[i] = run_trial(config, i);
    } else {
        std::vector<std::jthread> workers;
        for (unsigned w = 0; w < threads; ++w) {
            workers.emplace_back([&, w] {
                for (std::size_t i = w; i < trials; i += threads) traces[i] = run_trial(config, i);
            });
        }
    }

    std::size_t tests = 0, rej05 = 0, rej01 = 0, top = 0, output = 0, members = 0, core = 0, flagged = 0;
    for (const auto& t : traces) {
        tests += t.institutions;
        rej05 += t.rejections_05;
        rej01 += t.rejections_01;
        top += t.top_total;
        output += t.output_total;
        members += t.memberships;
        core += t.core_total;
        flagged += t.flagged_total;
    }
    NullExperimentResult r;
    r.trials = trials;
    r.institution_tests = tests;
    r.mean_excellence_share = static_cast<double>(top) / static_cast<double>(output);
    r.mean_flagged_share = static_cast<double>(flagged) / static_cast<double>(members);
    r.type1_rate_05 = static_cast<double>(rej05) / static_cast<double>(tests);
    r.type1_rate_01 = static_cast<double>(rej01) / static_cast<double>(tests);
    r.tie_inflation = static_cast<double>(flagged - core) / static_cast<double>(members);
    if (trace) *trace = std::move(traces);
    return r;
}

void write_experiment_json(std::ostream& out, const SynthConfig& config, const NullExperimentResult& result) {
    nlohmann::ordered_json model;
    if (const auto* ln = std::get_if<LogNormalModel>(&config.citation_model)) {
        model = {{"type", "lognormal"}, {"mu", ln->mu}, {"sigma", ln->sigma}};
    } else {
        const auto& nb = std::get<NegBinomialModel>(config.citation_model);
        model = {{"type", "negbin"}, {"r", nb.r}, {"p", nb.p}};
    }
    nlohmann::ordered_json j;
    j["config"] = {{"n_institutions", config.n_institutions},
                   {"papers_per_institution", config.papers_per_institution},
                   {"fields_count", config.fields_count},
                   {"years", {config.first_year, config.last_year}},
                   {"citation_model", model},
                   {"seed", config.seed}};
    j["result"] = {{"trials", result.trials},
                   {"institution_tests", result.institution_tests},
                   {"mean_excellence_share", result.mean_excellence_share},
                   {"mean_flagged_share", result.mean_flagged_share},
                   {"type1_rate_05", result.type1_rate_05},
                   {"type1_rate_01", result.type1_rate_01},
                   {"tie_inflation", result.tie_inflation}};
    out << j.dump(2) << '\n';
}

void write_trace_csv(std::ostream& out, const std::vector<TrialTrace>& trace) {
    out << "trial,seed,papers,institutions,memberships,core_total,flagged_total,top_total,output_total,rejections_05,"
           "rejections_01\n";
    for (const auto& t : trace) {
        out << t.trial << ',' << t.seed << ',' << t.papers << ',' << t.institutions << ',' << t.memberships << ','
            << t.core_total << ',' << t.flagged_total << ',' << t.top_total << ',' << t.output_total << ','
            << t.rejections_05 << ',' << t.rejections_01 << '\n';
    }
}

}  // namespace excellence
