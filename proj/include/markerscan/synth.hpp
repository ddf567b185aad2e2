#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "markerscan/corpus.hpp"
#include "markerscan/lexicon.hpp"

namespace markerscan {

struct SubjectWeight {
    std::string code;
    int weight = 1;
};

// Knobs of the corpus generator; see parse_synth_config for the file keys.
struct SynthConfig {
    std::vector<std::pair<int, int64_t>> years;  // (year, document count), ascending
    int64_t vocab_size = 5000;                   // filler vocabulary size
    int len_min = 150;                           // content tokens (abstract + body)
    int len_max = 400;
    int abs_min = 150;  // abstract share of the content, capped at the length
    int abs_max = 400;
    int title_tokens = 8;
    double occurrence_factor = 0.0;   // lambda scale for repeated term occurrences
    double marked_occurrence = 1.0;   // lambda for repeats of inserted marked terms
    std::map<std::string, double> base_probs;   // canonical -> inclusion probability
    std::map<std::string, double> group_probs;  // group name -> probability for all its terms
    std::map<std::string, double> drift;        // canonical -> per-year growth
    double drift_all = 0.0;                     // growth for terms without an entry
    std::map<int, double> injection;            // year -> marked fraction epsilon
    int marked_choose = 2;
    std::vector<std::string> marked_groups = {"C", "D"};  // pool = union of these groups
    std::vector<std::string> marked_terms;                // explicit pool, overrides groups
    std::vector<SubjectWeight> subjects;
    std::vector<std::string> inject_subjects;  // marking restricted to these; empty = all
    DocType doc_type = DocType::Article;
    uint64_t seed = 1;
};

// Parses the flat key/value config format (one `key value...` per line,
// `#` comments). Throws ConfigError with a line number.
SynthConfig parse_synth_config(const std::string& text);
SynthConfig load_synth_config_file(const std::string& path);

// Expected fulltext match frequency per (year, predicate).
struct Expectation {
    std::map<std::pair<int, std::string>, double> cells;
    double at(int year, const std::string& predicate) const;
};

// Deterministic corpus generator. Every document is a pure function of
// (config, year, index), so generation parallelizes and the output stream
// is identical regardless of how it is produced.
class SynthGenerator {
public:
    SynthGenerator(SynthConfig cfg, const AnalysisSuite& suite);  // validates, throws ConfigError

    const SynthConfig& config() const { return cfg_; }
    const std::vector<std::string>& marked_pool() const { return pool_; }

    int64_t docs_in(int year) const;

    Document make_document(int year, int64_t index) const;
    // Same, reusing the document's buffers across calls.
    void make_document_into(int year, int64_t index, Document& doc) const;

    // Writes all configured years in (year, index) order as a corpus file.
    void write_corpus(const std::string& path) const;

    // p_w(year) after drift.
    double term_prob(const std::string& canonical, int year) const;
    // Configured epsilon scaled by the injected subjects' weight share.
    double epsilon_overall(int year) const;
    bool is_marked(int year, int64_t index) const;
    // Subject assigned to the document at this index ("" when none).
    const std::string& subject_of(int64_t index) const;

private:
    struct TermSpec {
        std::string canonical;
        double base_prob = 0.0;
        double growth = 0.0;
    };
    struct CyclePos {
        int subject = -1;      // index into cfg_.subjects
        int64_t offset = 0;    // within-subject index offset at this cycle position
        bool injectable = true;
    };

    double prob_at(const TermSpec& t, int year) const;

    SynthConfig cfg_;
    AnalysisSuite suite_;
    int first_year_ = 0;
    std::vector<TermSpec> terms_;       // suite order, base_prob > 0 only
    std::vector<std::string> pool_;     // marked-rule canonicals
    std::vector<CyclePos> cycle_;       // subject schedule, one full cycle
    int64_t cycle_weight_ = 0;          // total weight of a cycle
    double injected_share_ = 1.0;       // weight share of injectable subjects
    std::vector<std::string> marker_names_;  // insertable marker spellings
    std::vector<int32_t> pool_marker_;       // pool index -> marker_names_ index
    int filler_width_ = 1;
    std::vector<std::string> filler_cache_;  // filler id -> token, small vocabularies
};

// Analytic match-frequency oracle for generate(): exhaustive enumeration
// over background inclusions and marked-set draws.
Expectation expected_frequency(const SynthConfig& cfg, const AnalysisSuite& suite);

}  // namespace markerscan
