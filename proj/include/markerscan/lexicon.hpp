#pragma once

#include <string>
#include <vector>

namespace markerscan {

// One marker word. `variants` are the token spellings that count as this
// term; they always include `canonical`.
struct MarkerTerm {
    std::string canonical;
    std::vector<std::string> variants;

    bool operator==(const MarkerTerm&) const = default;
};

enum class Band { Control, A, B, C, D, Custom };

const char* band_name(Band b);

struct MarkerGroup {
    std::string name;
    Band band = Band::Custom;
    std::vector<MarkerTerm> terms;

    bool operator==(const MarkerGroup&) const = default;
};

enum class PredicateMode { Any, AtLeastK };

// A document-level match rule over the union of the referenced groups:
// Any = at least one term present, AtLeastK = at least k distinct
// canonical terms present.
struct Predicate {
    std::string name;
    std::vector<std::string> groups;
    PredicateMode mode = PredicateMode::Any;
    int k = 0;  // meaningful for AtLeastK only

    bool operator==(const Predicate&) const = default;
};

struct AnalysisSuite {
    std::string name;
    std::vector<MarkerGroup> groups;
    std::vector<Predicate> predicates;

    bool operator==(const AnalysisSuite&) const = default;

    const MarkerGroup* find_group(const std::string& name) const;
    const Predicate* find_predicate(const std::string& name) const;
    // Distinct canonical terms of the union of a predicate's groups,
    // in group order.
    std::vector<std::string> predicate_terms(const Predicate& p) const;
};

// The default analysis suite: colour-control group plus marker bands A-D
// and the twelve standard predicates (Any per group, at-least-two per
// group, and at-least-two over the B+C and C+D unions).
AnalysisSuite builtin_suite();

// Parses the line-based suite config grammar (see README). Terms are
// case-folded on load. Throws ConfigError with a line number on syntax
// errors, unknown group references, or infeasible k.
AnalysisSuite load_suite(const std::string& config_text);

// Loads a suite from a file path.
AnalysisSuite load_suite_file(const std::string& path);

// Serializes a suite back to config text; load_suite(to_config_text(s))
// reproduces s exactly.
std::string to_config_text(const AnalysisSuite& suite);

// Structural validation shared by builtin_suite and load_suite.
void validate_suite(const AnalysisSuite& suite);

}  // namespace markerscan
