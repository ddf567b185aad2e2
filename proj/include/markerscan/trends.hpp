#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "markerscan/counts.hpp"
#include "markerscan/lexicon.hpp"

namespace markerscan {

// Matched/total counts of one predicate over years, with derived
// frequencies. Years with zero totals are rejected when read.
struct YearlySeries {
    struct Cell {
        int64_t matched = 0;
        int64_t total = 0;
    };

    std::string predicate;
    std::map<int, Cell> cells;

    bool has(int year) const { return cells.count(year) != 0; }
    int64_t matched(int year) const;
    int64_t total(int year) const;
    // matched/total; throws CoverageError when the year is missing or has
    // zero total.
    double frequency(int year) const;
};

YearlySeries series_for(const CountsTable& counts, std::string_view predicate);

struct BaselineConfig {
    int window_first = 2017;  // first year-on-year delta of the baseline window
    int window_last = 2022;   // last delta year
    int anchor = 2022;        // frequency the projection grows from
    int horizon = 2024;       // projection target year

    // window_first <= window_last <= anchor < horizon; throws ConfigError.
    void validate() const;
};

// f(y)/f(y-1) - 1. Throws CoverageError when either year is missing or the
// prior frequency is zero.
double rel_change(const YearlySeries& series, int year);

// Maximum rel_change over the window years; may be negative for series
// that decline every year.
double baseline_max_change(const YearlySeries& series, const BaselineConfig& cfg);

struct Projection {
    double frequency = 0.0;  // f(anchor) * (1+b)^(horizon-anchor)
    int64_t count = 0;       // round-half-up(frequency * total(horizon))
};

Projection notional_projection(const YearlySeries& series, const BaselineConfig& cfg);

struct SurplusRow {
    std::string predicate;
    double max_change = 0.0;  // baseline rate b (fraction, not percent)
    int64_t notional = 0;
    int64_t actual = 0;
    int64_t surplus = 0;      // actual - notional, exact
    double surplus_pct = 0.0;  // surplus / total(horizon), fraction
};

// One row per predicate in table order. Requires every predicate to cover
// years [window_first-1, window_last], the anchor, and the horizon; throws
// CoverageError naming the missing (year, predicate) cells.
std::vector<SurplusRow> surplus_report(const CountsTable& counts, const BaselineConfig& cfg);

struct BandThresholds {
    double activity = 0.025;   // both deltas below this -> control
    double horizon_b = 0.15;   // horizon delta above this -> at least B
    double prior_c = 0.15;     // horizon-1 delta above this -> at least C
    double horizon_d = 0.50;   // horizon delta above this -> D
};

// Classifies one series by its (horizon-1, horizon) relative changes.
// Boundary values resolve to the lower band.
Band classify_band(const YearlySeries& series, const BaselineConfig& cfg,
                   const BandThresholds& thresholds = {});

struct BandRow {
    std::string predicate;
    double delta_prior = 0.0;    // rel_change at horizon-1
    double delta_horizon = 0.0;  // rel_change at horizon
    Band band = Band::Control;
};

std::vector<BandRow> band_report(const CountsTable& counts, const BaselineConfig& cfg,
                                 const BandThresholds& thresholds = {});

struct FieldRow {
    std::string subject;
    double ratio = 0.0;  // f(horizon) / mean f over [window_first-1, window_last]
    bool defined = true;  // false when the baseline mean is zero
    int64_t horizon_total = 0;
};

// Growth ratio of one predicate per subject, sorted by descending
// horizon-year total (ties by subject name).
std::vector<FieldRow> field_breakdown(const std::map<std::string, CountsTable>& by_subject,
                                      const std::string& predicate, const BaselineConfig& cfg);

// Emitters. Rates are printed as percentages with one decimal; the CSV and
// Markdown forms carry identical values.
std::string surplus_csv(const std::vector<SurplusRow>& rows);
std::string surplus_markdown(const std::vector<SurplusRow>& rows);
std::string bands_csv(const std::vector<BandRow>& rows);
std::string bands_markdown(const std::vector<BandRow>& rows);
std::string field_csv(const std::vector<FieldRow>& rows);
std::string field_markdown(const std::vector<FieldRow>& rows);

}  // namespace markerscan
