#include "markerscan/matcher.hpp"

#include <algorithm>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "markerscan/errors.hpp"
#include "markerscan/tokenizer.hpp"

namespace markerscan {

namespace {

int default_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

int thread_id() {
#ifdef _OPENMP
    return omp_get_thread_num();
#else
    return 0;
#endif
}

}  // namespace

MatchEngine::MatchEngine(AnalysisSuite suite) : suite_(std::move(suite)) {
    validate_suite(suite_);

    std::unordered_map<std::string, int32_t> term_id;
    for (const auto& g : suite_.groups) {
        for (const auto& t : g.terms) {
            auto [it, fresh] = term_id.try_emplace(t.canonical, static_cast<int32_t>(terms_.size()));
            if (fresh) terms_.push_back(t.canonical);
            for (const auto& v : t.variants) {
                token_to_term_.emplace(v, it->second);  // collisions rejected by validate_suite
                lead_byte_[static_cast<unsigned char>(v.front())] = true;
            }
        }
    }

    for (const auto& p : suite_.predicates) {
        predicate_names_.push_back(p.name);
        Plan plan;
        plan.min_distinct = p.mode == PredicateMode::Any ? 1 : p.k;
        for (const auto& canonical : suite_.predicate_terms(p))
            plan.term_ids.push_back(term_id.at(canonical));
        plans_.push_back(std::move(plan));
    }
}

MatchEngine::Scratch MatchEngine::make_scratch() const {
    Scratch s;
    s.term_counts.assign(terms_.size(), 0);
    s.touched.reserve(terms_.size());
    s.matched.assign(plans_.size(), 0);
    s.token_buf.reserve(64);
    return s;
}

void MatchEngine::reset(Scratch& s) const {
    for (int32_t id : s.touched) s.term_counts[static_cast<std::size_t>(id)] = 0;
    s.touched.clear();
}

void MatchEngine::accumulate(std::string_view text, Scratch& s) const {
    for_each_token(text, s.token_buf, [&](std::string_view tok) {
        if (!lead_byte_[static_cast<unsigned char>(tok.front())]) return;
        auto it = token_to_term_.find(tok);
        if (it == token_to_term_.end()) return;
        if (s.term_counts[static_cast<std::size_t>(it->second)]++ == 0)
            s.touched.push_back(it->second);
    });
}

void MatchEngine::evaluate(Scratch& s) const {
    for (std::size_t p = 0; p < plans_.size(); ++p) {
        const Plan& plan = plans_[p];
        int distinct = 0;
        for (int32_t id : plan.term_ids)
            distinct += s.term_counts[static_cast<std::size_t>(id)] != 0;
        s.matched[p] = distinct >= plan.min_distinct;
    }
}

void MatchEngine::run(const Document& doc, SectionScope scope, Scratch& s) const {
    reset(s);
    accumulate(doc.title, s);
    accumulate(doc.abstract, s);
    if (scope == SectionScope::FullText) accumulate(doc.body, s);
    evaluate(s);
}

MatchResult MatchEngine::match_document(const Document& doc, SectionScope scope) const {
    Scratch s = make_scratch();
    run(doc, scope, s);
    MatchResult result;
    for (int32_t id : s.touched)
        result.per_term_counts[terms_[static_cast<std::size_t>(id)]] =
            s.term_counts[static_cast<std::size_t>(id)];
    for (std::size_t p = 0; p < plans_.size(); ++p)
        if (s.matched[p]) result.matched_predicates.push_back(predicate_names_[p]);
    return result;
}

namespace {

void add_document(CountsTable& table, int year, const std::vector<uint8_t>& matched) {
    CountsTable::Row& row = table.row(year);
    ++row.total;
    for (std::size_t p = 0; p < matched.size(); ++p) row.matched[p] += matched[p];
}

}  // namespace

CountsTable scan_documents(std::span<const Document> docs, const MatchEngine& engine,
                           SectionScope scope) {
    CountsTable table;
    table.predicates = engine.predicate_names();
    MatchEngine::Scratch s = engine.make_scratch();
    for (const Document& doc : docs) {
        engine.run(doc, scope, s);
        add_document(table, doc.year, s.matched);
    }
    return table;
}

CountsTable scan_documents_parallel(std::span<const Document> docs, const MatchEngine& engine,
                                    SectionScope scope, int jobs) {
    int threads = jobs > 0 ? jobs : default_threads();
    if (threads <= 1 || docs.size() < 2) return scan_documents(docs, engine, scope);

    std::vector<CountsTable> parts(static_cast<std::size_t>(threads));
    for (auto& part : parts) part.predicates = engine.predicate_names();
#ifdef _OPENMP
#pragma omp parallel num_threads(threads)
    {
        CountsTable& part = parts[static_cast<std::size_t>(thread_id())];
        MatchEngine::Scratch s = engine.make_scratch();
#pragma omp for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(docs.size()); ++i) {
            engine.run(docs[static_cast<std::size_t>(i)], scope, s);
            add_document(part, docs[static_cast<std::size_t>(i)].year, s.matched);
        }
    }
#else
    parts[0] = scan_documents(docs, engine, scope);
#endif
    CountsTable table;
    table.predicates = engine.predicate_names();
    for (const auto& part : parts) table.merge(part);
    return table;
}

namespace {

// Per-record outputs of the parallel phase of scan_corpus_file; indexed by
// position within the batch so the sequential accounting pass sees records
// in file order.
struct BatchSlots {
    std::vector<std::string> ids;
    std::vector<int32_t> years;
    std::vector<uint8_t> type_ok;
    std::vector<std::exception_ptr> errors;
    std::vector<uint64_t> bits;
    std::vector<std::vector<std::string>> subjects;

    void resize(std::size_t n, std::size_t words, bool keep_subjects) {
        ids.assign(n, {});
        years.assign(n, 0);
        type_ok.assign(n, 0);
        errors.assign(n, nullptr);
        bits.assign(n * words, 0);
        if (keep_subjects) subjects.assign(n, {});
    }
};

}  // namespace

ScanResult scan_corpus_file(const std::string& path, const MatchEngine& engine,
                            const ScanOptions& options) {
    ScanResult result;
    result.counts.predicates = engine.predicate_names();

    const std::size_t npred = engine.predicate_count();
    const std::size_t words = (npred + 63) / 64;
    const bool keep_subjects = options.subjects != SubjectMode::None;
    const int threads = options.jobs > 0 ? options.jobs : default_threads();

    LineReader reader(path);
    std::vector<std::string> lines;
    BatchSlots slots;
    std::vector<MatchEngine::Scratch> scratch;
    scratch.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) scratch.push_back(engine.make_scratch());

    std::unordered_set<std::string> seen_ids;

    constexpr std::size_t kBatchLines = 4096;
    while (reader.next_batch(lines, kBatchLines)) {
        const std::size_t n = lines.size();
        const int64_t first_line = reader.line_number() - static_cast<int64_t>(n) + 1;
        slots.resize(n, words, keep_subjects);

        auto process = [&](std::size_t i, MatchEngine::Scratch& s) {
            try {
                Document doc = parse_record(lines[i], first_line + static_cast<int64_t>(i));
                slots.ids[i] = std::move(doc.id);
                slots.years[i] = doc.year;
                if (options.types.contains(doc.type)) {
                    slots.type_ok[i] = 1;
                    engine.run(doc, options.scope, s);
                    uint64_t* w = &slots.bits[i * words];
                    for (std::size_t p = 0; p < npred; ++p)
                        if (s.matched[p]) w[p / 64] |= uint64_t{1} << (p % 64);
                    if (keep_subjects) slots.subjects[i] = std::move(doc.subjects);
                }
            } catch (const ParseError&) {
                slots.errors[i] = std::current_exception();
            } catch (const ValidationError&) {
                slots.errors[i] = std::current_exception();
            }
        };

#ifdef _OPENMP
        if (threads > 1) {
#pragma omp parallel num_threads(threads)
            {
                MatchEngine::Scratch& s = scratch[static_cast<std::size_t>(thread_id())];
#pragma omp for schedule(dynamic, 32)
                for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
                    process(static_cast<std::size_t>(i), s);
            }
        } else
#endif
        {
            for (std::size_t i = 0; i < n; ++i) process(i, scratch[0]);
        }

        // Sequential accounting in file order: errors surface at the lowest
        // line number and duplicate detection is scheduling-independent.
        for (std::size_t i = 0; i < n; ++i) {
            if (slots.errors[i]) {
                if (options.on_malformed == MalformedPolicy::Fail)
                    std::rethrow_exception(slots.errors[i]);
                ++result.skipped;
                continue;
            }
            if (!seen_ids.insert(slots.ids[i]).second) {
                if (options.on_malformed == MalformedPolicy::Fail)
                    throw ValidationError("line " + std::to_string(first_line + static_cast<int64_t>(i)) +
                                          ": duplicate id '" + slots.ids[i] + "'");
                ++result.skipped;
                continue;
            }
            if (!slots.type_ok[i]) continue;

            const uint64_t* w = &slots.bits[i * words];
            const int year = slots.years[i];
            CountsTable::Row& row = result.counts.row(year);
            ++row.total;
            for (std::size_t p = 0; p < npred; ++p)
                row.matched[p] += (w[p / 64] >> (p % 64)) & 1;
            ++result.documents;

            if (keep_subjects && !slots.subjects[i].empty()) {
                std::size_t limit =
                    options.subjects == SubjectMode::First ? 1 : slots.subjects[i].size();
                for (std::size_t k = 0; k < limit; ++k) {
                    const std::string& key = slots.subjects[i][k];
                    CountsTable& sub = result.by_subject[key];
                    if (sub.predicates.empty()) sub.predicates = engine.predicate_names();
                    CountsTable::Row& srow = sub.row(year);
                    ++srow.total;
                    for (std::size_t p = 0; p < npred; ++p)
                        srow.matched[p] += (w[p / 64] >> (p % 64)) & 1;
                }
            }
        }
    }
    return result;
}

namespace {

DensityRow make_density_row(const MatchEngine& engine, const Document& doc,
                            MatchEngine::Scratch& s) {
    DensityRow row;
    row.id = doc.id;
    row.year = doc.year;
    row.distinct = static_cast<int>(s.touched.size());
    std::sort(s.touched.begin(), s.touched.end());
    for (int32_t id : s.touched) {
        uint32_t c = s.term_counts[static_cast<std::size_t>(id)];
        row.occurrences += c;
        row.term_counts.emplace_back(engine.terms()[static_cast<std::size_t>(id)], c);
    }
    return row;
}

}  // namespace

std::vector<DensityRow> density_report(std::span<const Document> docs, const MatchEngine& engine,
                                       SectionScope scope) {
    std::vector<DensityRow> rows;
    MatchEngine::Scratch s = engine.make_scratch();
    for (const Document& doc : docs) {
        engine.run(doc, scope, s);
        if (!s.touched.empty()) rows.push_back(make_density_row(engine, doc, s));
    }
    return rows;
}

std::vector<DensityRow> density_scan_file(const std::string& path, const MatchEngine& engine,
                                          const ScanOptions& options, int min_distinct) {
    if (min_distinct < 1) throw ConfigError("min_distinct must be >= 1");
    CorpusOptions copts;
    copts.types = options.types;
    copts.on_malformed = options.on_malformed;
    CorpusReader reader(path, copts);
    std::vector<DensityRow> rows;
    MatchEngine::Scratch s = engine.make_scratch();
    while (auto doc = reader.next()) {
        engine.run(*doc, options.scope, s);
        if (static_cast<int>(s.touched.size()) >= min_distinct)
            rows.push_back(make_density_row(engine, *doc, s));
    }
    return rows;
}

}  // namespace markerscan
