#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "markerscan/corpus.hpp"
#include "markerscan/counts.hpp"
#include "markerscan/lexicon.hpp"

namespace markerscan {

struct MatchResult {
    std::map<std::string, uint32_t> per_term_counts;  // canonical -> occurrences, nonzero only
    std::vector<std::string> matched_predicates;      // suite order
};

// Compiled form of a suite: one hash probe per token resolves it to a term
// id; predicates are distinct-count thresholds over term-id lists.
class MatchEngine {
public:
    explicit MatchEngine(AnalysisSuite suite);

    const AnalysisSuite& suite() const { return suite_; }
    // Distinct canonical terms in suite group order.
    const std::vector<std::string>& terms() const { return terms_; }
    const std::vector<std::string>& predicate_names() const { return predicate_names_; }
    std::size_t predicate_count() const { return plans_.size(); }

    // Per-thread working state; reused across documents.
    struct Scratch {
        std::vector<uint32_t> term_counts;  // indexed by term id
        std::vector<int32_t> touched;       // term ids with nonzero counts
        std::vector<uint8_t> matched;       // per predicate, 0/1
        std::string token_buf;
    };
    Scratch make_scratch() const;

    // Clears scratch, tokenizes the scoped sections, and evaluates all
    // predicates. Results stay readable in scratch until the next run.
    void run(const Document& doc, SectionScope scope, Scratch& s) const;

    // Building blocks of run(), exposed for fused pipelines: feed text
    // incrementally, then evaluate predicates over the accumulated counts.
    void reset(Scratch& s) const;
    void accumulate(std::string_view text, Scratch& s) const;
    void evaluate(Scratch& s) const;

    MatchResult match_document(const Document& doc, SectionScope scope) const;

private:
    struct TokenHash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept {
            return std::hash<std::string_view>{}(s);
        }
    };
    struct Plan {
        int min_distinct = 1;
        std::vector<int32_t> term_ids;
    };

    AnalysisSuite suite_;
    std::vector<std::string> terms_;
    std::vector<std::string> predicate_names_;
    std::vector<Plan> plans_;
    std::unordered_map<std::string, int32_t, TokenHash, std::equal_to<>> token_to_term_;
    std::array<bool, 256> lead_byte_{};  // bytes a variant can start with
};

// Serial reference scan over in-memory documents.
CountsTable scan_documents(std::span<const Document> docs, const MatchEngine& engine,
                           SectionScope scope);

// OpenMP scan; byte-identical to the serial scan for any jobs value.
// jobs <= 0 uses the runtime default thread count.
CountsTable scan_documents_parallel(std::span<const Document> docs, const MatchEngine& engine,
                                    SectionScope scope, int jobs);

enum class SubjectMode { None, First, All };

struct ScanOptions {
    SectionScope scope = SectionScope::FullText;
    std::set<DocType> types = {DocType::Article};
    MalformedPolicy on_malformed = MalformedPolicy::Fail;
    int jobs = 1;
    SubjectMode subjects = SubjectMode::None;
};

struct ScanResult {
    CountsTable counts;
    std::map<std::string, CountsTable> by_subject;  // filled when subjects != None
    int64_t documents = 0;                          // documents counted after filtering
    int64_t skipped = 0;                            // malformed / duplicate records skipped
};

// Streams a corpus file through the engine. Parsing and matching run in
// parallel per batch; records are accounted in file order, so error
// reporting, duplicate detection, and the resulting table are identical
// for every jobs value.
ScanResult scan_corpus_file(const std::string& path, const MatchEngine& engine,
                            const ScanOptions& options);

struct DensityRow {
    std::string id;
    int year = 0;
    int distinct = 0;
    int64_t occurrences = 0;
    std::vector<std::pair<std::string, uint32_t>> term_counts;  // suite term order
};

// One row per document with at least one marker occurrence, in input order.
std::vector<DensityRow> density_report(std::span<const Document> docs, const MatchEngine& engine,
                                       SectionScope scope);

// Streaming variant over a corpus file, keeping rows with >= min_distinct
// distinct terms (min_distinct >= 1).
std::vector<DensityRow> density_scan_file(const std::string& path, const MatchEngine& engine,
                                          const ScanOptions& options, int min_distinct);

}  // namespace markerscan
