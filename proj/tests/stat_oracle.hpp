#pragma once

// Monte-Carlo oracle for the sampling distribution of the surplus estimate.
//
// Each replicate draws per-(year, predicate) matched counts from
// Binomial(N_year, E_year) around the analytic match frequencies and runs
// the *real* estimator on them, so the resulting mean/sd carry every
// nonlinearity of the pipeline - the max-over-window baseline selection,
// the compounding loop, and the rounding to whole documents. A naive
// per-cell error propagation misses the selection bias of the max and
// understates the spread; these numbers are the honest yardstick the
// acceptance gate compares estimator output against.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "markerscan/counts.hpp"
#include "markerscan/lexicon.hpp"
#include "markerscan/rng.hpp"
#include "markerscan/synth.hpp"
#include "markerscan/trends.hpp"

namespace statmc {

struct McSummary {
    std::vector<std::string> predicates;
    std::vector<double> mean;      // MC mean of surplus_pct per predicate
    std::vector<double> sd;        // MC standard deviation of surplus_pct
    std::vector<double> analytic;  // estimator applied to the exact frequencies
    int replicates = 0;

    std::size_t index_of(const std::string& predicate) const {
        for (std::size_t i = 0; i < predicates.size(); ++i)
            if (predicates[i] == predicate) return i;
        throw std::out_of_range("no MC summary for predicate '" + predicate + "'");
    }
};

inline double gaussian(markerscan::Rng& rng) {
    // Box-Muller on open-interval uniforms (offset keeps log() finite).
    double u1 = (static_cast<double>(rng.next() >> 11) + 0.5) * 0x1.0p-53;
    double u2 = (static_cast<double>(rng.next() >> 11) + 0.5) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

// Binomial(n, p) via the normal approximation; all acceptance uses have
// n*p in the hundreds or more, where the approximation error is far below
// the tolerances derived from these draws.
inline int64_t binomial_approx(markerscan::Rng& rng, int64_t n, double p) {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return n;
    double np = static_cast<double>(n) * p;
    double sigma = std::sqrt(np * (1.0 - p));
    double x = std::floor(np + gaussian(rng) * sigma + 0.5);
    if (x < 0.0) return 0;
    if (x > static_cast<double>(n)) return n;
    return static_cast<int64_t>(x);
}

// Counts table holding round(E * total) for every configured year; with
// `total` large (1e15) this turns the integer estimator into an arbitrarily
// fine frequency-level evaluation of the same arithmetic.
inline markerscan::CountsTable expectation_table(const markerscan::SynthConfig& cfg,
                                                 const markerscan::Expectation& ex,
                                                 const std::vector<std::string>& predicates,
                                                 int64_t total) {
    markerscan::CountsTable table;
    table.predicates = predicates;
    for (const auto& [year, n] : cfg.years) {
        (void)n;
        auto& row = table.row(year);
        row.total = total;
        for (std::size_t i = 0; i < predicates.size(); ++i) {
            double e = ex.at(year, predicates[i]);
            row.matched[i] = static_cast<int64_t>(std::floor(e * static_cast<double>(total) + 0.5));
        }
    }
    return table;
}

inline McSummary mc_surplus(const markerscan::SynthConfig& cfg,
                            const markerscan::AnalysisSuite& suite,
                            const markerscan::BaselineConfig& bcfg, int replicates,
                            uint64_t seed) {
    using namespace markerscan;

    McSummary out;
    for (const auto& p : suite.predicates) out.predicates.push_back(p.name);
    out.replicates = replicates;

    Expectation ex = expected_frequency(cfg, suite);

    // Analytic center: the estimator evaluated on the exact frequencies.
    CountsTable exact = expectation_table(cfg, ex, out.predicates, int64_t{1000000000000000});
    for (const SurplusRow& row : surplus_report(exact, bcfg)) out.analytic.push_back(row.surplus_pct);

    std::size_t npred = out.predicates.size();
    std::vector<double> mean(npred, 0.0), m2(npred, 0.0);

    CountsTable table;
    table.predicates = out.predicates;
    for (const auto& [year, n] : cfg.years) table.row(year).total = n;

    Rng rng(mix64(seed ^ 0x5374617453696dull));  // "StatSim"
    for (int rep = 1; rep <= replicates; ++rep) {
        for (const auto& [year, n] : cfg.years) {
            auto& row = table.row(year);
            for (std::size_t i = 0; i < npred; ++i)
                row.matched[i] = binomial_approx(rng, n, ex.at(year, out.predicates[i]));
        }
        std::vector<SurplusRow> rows = surplus_report(table, bcfg);
        for (std::size_t i = 0; i < npred; ++i) {
            double delta = rows[i].surplus_pct - mean[i];
            mean[i] += delta / static_cast<double>(rep);
            m2[i] += delta * (rows[i].surplus_pct - mean[i]);
        }
    }
    out.mean = mean;
    out.sd.resize(npred);
    for (std::size_t i = 0; i < npred; ++i)
        out.sd[i] = std::sqrt(m2[i] / static_cast<double>(replicates - 1));
    return out;
}

}  // namespace statmc
