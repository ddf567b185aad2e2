#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "markerscan/corpus.hpp"
#include "markerscan/counts.hpp"
#include "markerscan/errors.hpp"
#include "markerscan/lexicon.hpp"
#include "markerscan/manifest.hpp"
#include "markerscan/matcher.hpp"
#include "markerscan/synth.hpp"
#include "markerscan/trends.hpp"
#include "markerscan/version.hpp"

namespace {

using namespace markerscan;

struct CommonOpts {
    std::string suite_path;
    std::string scope = "fulltext";
    std::string types = "article";
    int window_first = 2017;
    int window_last = 2022;
    int anchor = 2022;
    int horizon = 2024;
    int jobs = 1;
    std::string format = "csv";
    std::string out_path;
    bool skip_malformed = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_baseline) {
    cmd->add_option("--suite", o.suite_path, "suite config file (default: builtin suite)");
    cmd->add_option("--scope", o.scope, "fulltext|titleabstract (default fulltext)");
    cmd->add_option("--types", o.types,
                    "comma-separated document types to scan (default article)");
    if (with_baseline) {
        cmd->add_option("--window-first", o.window_first, "first baseline delta year");
        cmd->add_option("--window-last", o.window_last, "last baseline delta year");
        cmd->add_option("--anchor", o.anchor, "projection anchor year");
        cmd->add_option("--horizon", o.horizon, "projection horizon year");
    }
    cmd->add_option("--jobs", o.jobs, "worker threads; 0 = all cores (default 1)");
    cmd->add_option("--format", o.format, "csv|md (default csv)");
    cmd->add_option("--out", o.out_path, "write output here instead of stdout");
    cmd->add_flag("--skip-malformed", o.skip_malformed,
                  "skip malformed corpus records instead of failing");
}

AnalysisSuite resolve_suite(const CommonOpts& o) {
    return o.suite_path.empty() ? builtin_suite() : load_suite_file(o.suite_path);
}

SectionScope resolve_scope(const CommonOpts& o) {
    if (o.scope == "fulltext") return SectionScope::FullText;
    if (o.scope == "titleabstract") return SectionScope::TitleAbstract;
    throw ConfigError("unknown scope '" + o.scope + "' (use fulltext or titleabstract)");
}

std::set<DocType> resolve_types(const CommonOpts& o) {
    std::set<DocType> types;
    std::string item;
    std::istringstream in(o.types);
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        if (item != "article" && item != "preprint" && item != "review" && item != "other")
            throw ConfigError("unknown document type '" + item + "'");
        types.insert(doc_type_from_string(item));
    }
    if (types.empty()) throw ConfigError("no document types selected");
    return types;
}

BaselineConfig resolve_baseline(const CommonOpts& o) {
    BaselineConfig cfg;
    cfg.window_first = o.window_first;
    cfg.window_last = o.window_last;
    cfg.anchor = o.anchor;
    cfg.horizon = o.horizon;
    cfg.validate();
    return cfg;
}

std::string resolve_format(const CommonOpts& o) {
    if (o.format != "csv" && o.format != "md")
        throw ConfigError("unknown format '" + o.format + "' (use csv or md)");
    return o.format;
}

ScanOptions resolve_scan_options(const CommonOpts& o) {
    ScanOptions opts;
    opts.scope = resolve_scope(o);
    opts.types = resolve_types(o);
    opts.on_malformed = o.skip_malformed ? MalformedPolicy::Skip : MalformedPolicy::Fail;
    opts.jobs = o.jobs;
    return opts;
}

void fill_common_config(RunManifest& m, const CommonOpts& o, const AnalysisSuite& suite,
                        bool with_baseline) {
    m.tool_version = kVersion;
    m.config["suite"] = o.suite_path.empty() ? "builtin" : o.suite_path;
    m.config["suite_digest"] = hex64(fnv1a64(to_config_text(suite)));
    m.config["scope"] = o.scope;
    m.config["types"] = o.types;
    m.config["jobs"] = std::to_string(o.jobs);
    m.config["on_malformed"] = o.skip_malformed ? "skip" : "fail";
    if (with_baseline) {
        m.config["window_first"] = std::to_string(o.window_first);
        m.config["window_last"] = std::to_string(o.window_last);
        m.config["anchor"] = std::to_string(o.anchor);
        m.config["horizon"] = std::to_string(o.horizon);
        m.config["format"] = o.format;
    }
}

// Writes `content` to o.out_path (with a manifest sidecar) or to stdout.
void deliver(const CommonOpts& o, RunManifest& manifest, const std::string& content) {
    if (o.out_path.empty()) {
        std::fwrite(content.data(), 1, content.size(), stdout);
        if (std::fflush(stdout) != 0) throw IoError("write failure on stdout");
        return;
    }
    std::ofstream out(o.out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create output file: " + o.out_path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failure on output file: " + o.out_path);
    manifest.outputs[o.out_path] = hex64(fnv1a64(content));
    manifest.write(manifest_path_for(o.out_path));
}

int run_scan(const std::string& corpus_path, const CommonOpts& o) {
    AnalysisSuite suite = resolve_suite(o);
    MatchEngine engine(suite);
    ScanResult scan = scan_corpus_file(corpus_path, engine, resolve_scan_options(o));

    RunManifest manifest;
    manifest.command = "scan";
    fill_common_config(manifest, o, suite, false);
    manifest.config["skipped_records"] = std::to_string(scan.skipped);
    if (!o.out_path.empty()) manifest.inputs[corpus_path] = hex64(fnv1a64_file(corpus_path));
    deliver(o, manifest, counts_csv(scan.counts));
    return 0;
}

std::string render_report(const CountsTable& counts, const BaselineConfig& baseline,
                          const std::string& format, bool with_bands) {
    std::vector<SurplusRow> rows = surplus_report(counts, baseline);
    std::string out = format == "md" ? surplus_markdown(rows) : surplus_csv(rows);
    if (with_bands) {
        std::vector<BandRow> bands = band_report(counts, baseline);
        out += '\n';
        out += format == "md" ? bands_markdown(bands) : bands_csv(bands);
    }
    return out;
}

int run_report(const std::string& counts_path, const CommonOpts& o, bool with_bands) {
    BaselineConfig baseline = resolve_baseline(o);
    std::string format = resolve_format(o);
    CountsTable counts;
    if (counts_path == "-") {
        counts = read_counts_csv(std::cin);
    } else {
        counts = read_counts_csv_file(counts_path);
    }

    RunManifest manifest;
    manifest.command = "report";
    manifest.tool_version = kVersion;
    manifest.config["window_first"] = std::to_string(o.window_first);
    manifest.config["window_last"] = std::to_string(o.window_last);
    manifest.config["anchor"] = std::to_string(o.anchor);
    manifest.config["horizon"] = std::to_string(o.horizon);
    manifest.config["format"] = o.format;
    manifest.config["bands"] = with_bands ? "true" : "false";
    if (!o.out_path.empty() && counts_path != "-")
        manifest.inputs[counts_path] = hex64(fnv1a64_file(counts_path));
    deliver(o, manifest, render_report(counts, baseline, format, with_bands));
    return 0;
}

int run_estimate(const std::string& corpus_path, const CommonOpts& o, bool with_bands,
                 bool by_subject, const std::string& subject_predicate,
                 const std::string& subject_mode) {
    AnalysisSuite suite = resolve_suite(o);
    BaselineConfig baseline = resolve_baseline(o);
    std::string format = resolve_format(o);
    MatchEngine engine(suite);
    ScanOptions opts = resolve_scan_options(o);
    if (by_subject) {
        if (subject_mode == "first")
            opts.subjects = SubjectMode::First;
        else if (subject_mode == "all")
            opts.subjects = SubjectMode::All;
        else
            throw ConfigError("unknown subject mode '" + subject_mode + "' (use first or all)");
    }
    ScanResult scan = scan_corpus_file(corpus_path, engine, opts);

    std::string content = render_report(scan.counts, baseline, format, with_bands);
    std::string predicate = subject_predicate;
    if (by_subject) {
        if (predicate.empty()) {
            predicate = suite.find_predicate("2xCD") != nullptr
                            ? "2xCD"
                            : suite.predicates.back().name;
        }
        std::vector<FieldRow> fields = field_breakdown(scan.by_subject, predicate, baseline);
        content += '\n';
        content += format == "md" ? field_markdown(fields) : field_csv(fields);
    }

    RunManifest manifest;
    manifest.command = "estimate";
    fill_common_config(manifest, o, suite, true);
    manifest.config["bands"] = with_bands ? "true" : "false";
    manifest.config["by_subject"] = by_subject ? "true" : "false";
    if (by_subject) {
        manifest.config["subject_predicate"] = predicate;
        manifest.config["subject_mode"] = subject_mode;
    }
    manifest.config["skipped_records"] = std::to_string(scan.skipped);
    if (!o.out_path.empty()) manifest.inputs[corpus_path] = hex64(fnv1a64_file(corpus_path));
    deliver(o, manifest, content);
    return 0;
}

int run_synth(const std::string& config_path, const std::string& corpus_out, const CommonOpts& o,
              bool seed_given, uint64_t seed) {
    AnalysisSuite suite = resolve_suite(o);
    SynthConfig cfg = load_synth_config_file(config_path);
    if (seed_given) cfg.seed = seed;
    SynthGenerator gen(cfg, suite);
    gen.write_corpus(corpus_out);

    // expected-frequency table for the chosen suite
    Expectation ex = expected_frequency(gen.config(), suite);
    std::string table = "year";
    for (const auto& p : suite.predicates) table += ',' + p.name;
    table += '\n';
    for (const auto& [year, n] : gen.config().years) {
        table += std::to_string(year);
        for (const auto& p : suite.predicates) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.6f", ex.at(year, p.name));
            table += ',';
            table += buf;
        }
        table += '\n';
    }

    RunManifest manifest;
    manifest.command = "synth";
    manifest.tool_version = kVersion;
    manifest.config["suite"] = o.suite_path.empty() ? "builtin" : o.suite_path;
    manifest.config["suite_digest"] = hex64(fnv1a64(to_config_text(suite)));
    manifest.config["seed"] = std::to_string(gen.config().seed);
    manifest.inputs[config_path] = hex64(fnv1a64_file(config_path));
    manifest.outputs[corpus_out] = hex64(fnv1a64_file(corpus_out));
    manifest.write(manifest_path_for(corpus_out));

    RunManifest table_manifest = manifest;  // --out receives the expectation table
    table_manifest.outputs.clear();
    deliver(o, table_manifest, table);
    return 0;
}

int run_density(const std::string& corpus_path, const CommonOpts& o, int min_distinct) {
    AnalysisSuite suite = resolve_suite(o);
    MatchEngine engine(suite);
    std::vector<DensityRow> rows =
        density_scan_file(corpus_path, engine, resolve_scan_options(o), min_distinct);
    std::sort(rows.begin(), rows.end(), [](const DensityRow& a, const DensityRow& b) {
        if (a.distinct != b.distinct) return a.distinct > b.distinct;
        return a.id < b.id;
    });

    std::string content = "id,year,distinct,occurrences,terms\n";
    for (const auto& r : rows) {
        content += r.id + ',' + std::to_string(r.year) + ',' + std::to_string(r.distinct) + ',' +
                   std::to_string(r.occurrences) + ',';
        for (std::size_t i = 0; i < r.term_counts.size(); ++i) {
            if (i) content += ' ';
            content += r.term_counts[i].first + ':' + std::to_string(r.term_counts[i].second);
        }
        content += '\n';
    }

    RunManifest manifest;
    manifest.command = "density";
    fill_common_config(manifest, o, suite, false);
    manifest.config["min_distinct"] = std::to_string(min_distinct);
    if (!o.out_path.empty()) manifest.inputs[corpus_path] = hex64(fnv1a64_file(corpus_path));
    deliver(o, manifest, content);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"corpus-scale marker-word trend analyzer"};
    app.require_subcommand(1);

    std::string corpus_path, counts_path = "-", synth_config, synth_out;
    CommonOpts scan_o, report_o, estimate_o, synth_o, density_o;
    bool report_bands = false, estimate_bands = false, by_subject = false;
    std::string subject_predicate, subject_mode = "first";
    uint64_t seed = 0;
    bool seed_given = false;
    int min_distinct = 1;

    CLI::App* scan = app.add_subcommand("scan", "count matching documents per year");
    scan->add_option("corpus", corpus_path, "corpus file (JSON lines)")->required();
    add_common(scan, scan_o, false);

    CLI::App* report = app.add_subcommand("report", "surplus estimates from a counts table");
    report->add_option("counts", counts_path, "counts CSV ('-' = stdin, default)");
    add_common(report, report_o, true);
    report->add_flag("--bands", report_bands, "also emit band classifications");

    CLI::App* estimate = app.add_subcommand("estimate", "scan and report in one pass");
    estimate->add_option("corpus", corpus_path, "corpus file (JSON lines)")->required();
    add_common(estimate, estimate_o, true);
    estimate->add_flag("--bands", estimate_bands, "also emit band classifications");
    estimate->add_flag("--by-subject", by_subject, "also emit the per-subject breakdown");
    estimate->add_option("--subject-predicate", subject_predicate,
                         "predicate for the breakdown (default 2xCD, else last)");
    estimate->add_option("--subject-mode", subject_mode,
                         "attribute documents to their first subject or all (default first)");

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic corpus");
    synth->add_option("config", synth_config, "synth config file")->required();
    synth->add_option("corpus-out", synth_out, "corpus file to write")->required();
    add_common(synth, synth_o, false);
    CLI::Option* seed_opt = synth->add_option("--seed", seed, "override the config seed");

    CLI::App* density = app.add_subcommand("density", "per-document marker density report");
    density->add_option("corpus", corpus_path, "corpus file (JSON lines)")->required();
    add_common(density, density_o, false);
    density->add_option("--min-distinct", min_distinct,
                        "list documents with at least this many distinct terms (default 1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }

    try {
        if (scan->parsed()) return run_scan(corpus_path, scan_o);
        if (report->parsed()) return run_report(counts_path, report_o, report_bands);
        if (estimate->parsed())
            return run_estimate(corpus_path, estimate_o, estimate_bands, by_subject,
                                subject_predicate, subject_mode);
        if (synth->parsed()) {
            seed_given = seed_opt->count() > 0;
            return run_synth(synth_config, synth_out, synth_o, seed_given, seed);
        }
        if (density->parsed()) return run_density(corpus_path, density_o, min_distinct);
        std::cerr << "error: no command\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const CoverageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
