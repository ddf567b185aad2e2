#include "markerscan/trends.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "markerscan/errors.hpp"

namespace markerscan {

namespace {

std::string year_str(int y) { return std::to_string(y); }

std::string fixed1(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    return buf;
}

std::string pct1(double fraction) { return fixed1(fraction * 100.0); }

}  // namespace

int64_t YearlySeries::matched(int year) const {
    auto it = cells.find(year);
    if (it == cells.end())
        throw CoverageError("predicate '" + predicate + "': missing year " + year_str(year));
    return it->second.matched;
}

int64_t YearlySeries::total(int year) const {
    auto it = cells.find(year);
    if (it == cells.end())
        throw CoverageError("predicate '" + predicate + "': missing year " + year_str(year));
    return it->second.total;
}

double YearlySeries::frequency(int year) const {
    auto it = cells.find(year);
    if (it == cells.end())
        throw CoverageError("predicate '" + predicate + "': missing year " + year_str(year));
    if (it->second.total <= 0)
        throw CoverageError("predicate '" + predicate + "': zero total in year " + year_str(year));
    return static_cast<double>(it->second.matched) / static_cast<double>(it->second.total);
}

YearlySeries series_for(const CountsTable& counts, std::string_view predicate) {
    int idx = counts.predicate_index(predicate);
    if (idx < 0) throw ValidationError("unknown predicate '" + std::string(predicate) + "'");
    YearlySeries s;
    s.predicate = std::string(predicate);
    for (const auto& [year, row] : counts.years)
        s.cells[year] = {row.matched[static_cast<std::size_t>(idx)], row.total};
    return s;
}

void BaselineConfig::validate() const {
    if (!(window_first <= window_last && window_last <= anchor && anchor < horizon))
        throw ConfigError("baseline years must satisfy window_first <= window_last <= anchor < horizon (got " +
                          year_str(window_first) + ", " + year_str(window_last) + ", " +
                          year_str(anchor) + ", " + year_str(horizon) + ")");
}

double rel_change(const YearlySeries& series, int year) {
    double prev = series.frequency(year - 1);
    double cur = series.frequency(year);
    if (prev == 0.0)
        throw CoverageError("predicate '" + series.predicate + "': change at " + year_str(year) +
                            " undefined (zero frequency in " + year_str(year - 1) + ")");
    return cur / prev - 1.0;
}

double baseline_max_change(const YearlySeries& series, const BaselineConfig& cfg) {
    cfg.validate();
    double best = -std::numeric_limits<double>::infinity();
    for (int y = cfg.window_first; y <= cfg.window_last; ++y) {
        double d = rel_change(series, y);
        if (d > best) best = d;
    }
    return best;
}

Projection notional_projection(const YearlySeries& series, const BaselineConfig& cfg) {
    double b = baseline_max_change(series, cfg);
    double base = 1.0 + b;
    double growth = 1.0;
    for (int i = 0; i < cfg.horizon - cfg.anchor; ++i) growth *= base;
    Projection p;
    p.frequency = series.frequency(cfg.anchor) * growth;
    p.count = static_cast<int64_t>(
        std::floor(p.frequency * static_cast<double>(series.total(cfg.horizon)) + 0.5));
    return p;
}

namespace {

enum class Needs { Surplus, Bands };

void check_coverage(const CountsTable& counts, const BaselineConfig& cfg, Needs needs) {
    std::vector<int> required;
    auto add = [&](int y) {
        for (int r : required)
            if (r == y) return;
        required.push_back(y);
    };
    if (needs == Needs::Surplus) {
        for (int y = cfg.window_first - 1; y <= cfg.window_last; ++y) required.push_back(y);
        add(cfg.anchor);
    } else {
        add(cfg.horizon - 2);
        add(cfg.horizon - 1);
    }
    add(cfg.horizon);

    std::string missing;
    int listed = 0;
    for (int y : required) {
        const CountsTable::Row* row = counts.find_row(y);
        const char* why = nullptr;
        if (!row)
            why = "missing";
        else if (row->total <= 0)
            why = "zero total";
        if (!why) continue;
        for (const auto& p : counts.predicates) {
            if (listed == 8) {
                missing += ", ...";
                ++listed;
            }
            if (listed > 8) continue;
            if (!missing.empty()) missing += ", ";
            missing += "(" + year_str(y) + ", " + p + ") " + why;
            ++listed;
        }
    }
    if (!missing.empty()) throw CoverageError("counts do not cover the analysis years: " + missing);
}

}  // namespace

std::vector<SurplusRow> surplus_report(const CountsTable& counts, const BaselineConfig& cfg) {
    cfg.validate();
    check_coverage(counts, cfg, Needs::Surplus);
    std::vector<SurplusRow> rows;
    for (const auto& name : counts.predicates) {
        YearlySeries series = series_for(counts, name);
        SurplusRow row;
        row.predicate = name;
        row.max_change = baseline_max_change(series, cfg);
        Projection proj = notional_projection(series, cfg);
        row.notional = proj.count;
        row.actual = series.matched(cfg.horizon);
        row.surplus = row.actual - row.notional;
        row.surplus_pct =
            static_cast<double>(row.surplus) / static_cast<double>(series.total(cfg.horizon));
        rows.push_back(std::move(row));
    }
    return rows;
}

Band classify_band(const YearlySeries& series, const BaselineConfig& cfg,
                   const BandThresholds& thresholds) {
    cfg.validate();
    double prior = rel_change(series, cfg.horizon - 1);
    double horizon = rel_change(series, cfg.horizon);
    if (prior < thresholds.activity && horizon < thresholds.activity) return Band::Control;
    if (horizon > thresholds.horizon_d) return Band::D;
    if (prior > thresholds.prior_c) return Band::C;
    if (horizon > thresholds.horizon_b) return Band::B;
    return Band::A;
}

std::vector<BandRow> band_report(const CountsTable& counts, const BaselineConfig& cfg,
                                 const BandThresholds& thresholds) {
    cfg.validate();
    check_coverage(counts, cfg, Needs::Bands);
    std::vector<BandRow> rows;
    for (const auto& name : counts.predicates) {
        YearlySeries series = series_for(counts, name);
        BandRow row;
        row.predicate = name;
        row.delta_prior = rel_change(series, cfg.horizon - 1);
        row.delta_horizon = rel_change(series, cfg.horizon);
        row.band = classify_band(series, cfg, thresholds);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<FieldRow> field_breakdown(const std::map<std::string, CountsTable>& by_subject,
                                      const std::string& predicate, const BaselineConfig& cfg) {
    cfg.validate();
    std::vector<FieldRow> rows;
    for (const auto& [subject, counts] : by_subject) {
        FieldRow row;
        row.subject = subject;
        try {
            YearlySeries series = series_for(counts, predicate);
            row.horizon_total = series.total(cfg.horizon);
            double sum = 0.0;
            int n = 0;
            for (int y = cfg.window_first - 1; y <= cfg.window_last; ++y) {
                sum += series.frequency(y);
                ++n;
            }
            double mean = sum / static_cast<double>(n);
            if (mean == 0.0) {
                row.defined = false;
                row.ratio = std::numeric_limits<double>::quiet_NaN();
            } else {
                row.ratio = series.frequency(cfg.horizon) / mean;
            }
        } catch (const CoverageError&) {
            // subject lacks part of the window; reported as undefined
            row.defined = false;
            row.ratio = std::numeric_limits<double>::quiet_NaN();
            row.horizon_total = counts.total_at(cfg.horizon);
        }
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const FieldRow& a, const FieldRow& b) {
        if (a.horizon_total != b.horizon_total) return a.horizon_total > b.horizon_total;
        return a.subject < b.subject;
    });
    return rows;
}

std::string surplus_csv(const std::vector<SurplusRow>& rows) {
    std::string out = "predicate,max_change_pct,notional,actual,surplus,surplus_pct\n";
    for (const auto& r : rows) {
        out += r.predicate;
        out += ',' + pct1(r.max_change);
        out += ',' + std::to_string(r.notional);
        out += ',' + std::to_string(r.actual);
        out += ',' + std::to_string(r.surplus);
        out += ',' + pct1(r.surplus_pct);
        out += '\n';
    }
    return out;
}

std::string surplus_markdown(const std::vector<SurplusRow>& rows) {
    std::string out =
        "| predicate | max_change_pct | notional | actual | surplus | surplus_pct |\n"
        "| --- | ---: | ---: | ---: | ---: | ---: |\n";
    for (const auto& r : rows) {
        out += "| " + r.predicate + " | " + pct1(r.max_change) + " | " + std::to_string(r.notional) +
               " | " + std::to_string(r.actual) + " | " + std::to_string(r.surplus) + " | " +
               pct1(r.surplus_pct) + " |\n";
    }
    return out;
}

std::string bands_csv(const std::vector<BandRow>& rows) {
    std::string out = "predicate,delta_prior_pct,delta_horizon_pct,band\n";
    for (const auto& r : rows) {
        out += r.predicate + ',' + pct1(r.delta_prior) + ',' + pct1(r.delta_horizon) + ',' +
               band_name(r.band) + '\n';
    }
    return out;
}

std::string bands_markdown(const std::vector<BandRow>& rows) {
    std::string out =
        "| predicate | delta_prior_pct | delta_horizon_pct | band |\n"
        "| --- | ---: | ---: | --- |\n";
    for (const auto& r : rows) {
        out += "| " + r.predicate + " | " + pct1(r.delta_prior) + " | " + pct1(r.delta_horizon) +
               " | " + band_name(r.band) + " |\n";
    }
    return out;
}

namespace {

std::string ratio_str(const FieldRow& r) { return r.defined ? fixed1(r.ratio) : "nan"; }

}  // namespace

std::string field_csv(const std::vector<FieldRow>& rows) {
    std::string out = "subject,ratio,horizon_total\n";
    for (const auto& r : rows)
        out += r.subject + ',' + ratio_str(r) + ',' + std::to_string(r.horizon_total) + '\n';
    return out;
}

std::string field_markdown(const std::vector<FieldRow>& rows) {
    std::string out =
        "| subject | ratio | horizon_total |\n"
        "| --- | ---: | ---: |\n";
    for (const auto& r : rows)
        out += "| " + r.subject + " | " + ratio_str(r) + " | " + std::to_string(r.horizon_total) +
               " |\n";
    return out;
}

}  // namespace markerscan
