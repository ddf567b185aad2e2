#pragma once
// Deliberately slow reference implementations used as test oracles. They
// share no code with the engine under test: plain tokenize(), linear
// search over every variant string, std::set for distinctness.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "markerscan/corpus.hpp"
#include "markerscan/counts.hpp"
#include "markerscan/lexicon.hpp"
#include "markerscan/tokenizer.hpp"

namespace oracle {

inline std::map<std::string, uint32_t> count_terms(const markerscan::AnalysisSuite& suite,
                                                   const markerscan::Document& doc,
                                                   markerscan::SectionScope scope) {
    std::vector<std::string> tokens;
    auto add = [&](const std::string& text) {
        for (auto& t : markerscan::tokenize(text)) {
            tokens.push_back(t);
        }
    };
    add(doc.title);
    add(doc.abstract);
    if (scope == markerscan::SectionScope::FullText) {
        add(doc.body);
    }

    std::map<std::string, uint32_t> counts;
    for (const auto& tok : tokens) {
        for (const auto& g : suite.groups) {
            for (const auto& term : g.terms) {
                for (const auto& v : term.variants) {
                    if (tok == v) {
                        counts[term.canonical]++;
                    }
                }
            }
        }
    }
    return counts;
}

inline std::vector<std::string> matched_predicates(
    const markerscan::AnalysisSuite& suite, const std::map<std::string, uint32_t>& counts) {
    std::vector<std::string> out;
    for (const auto& p : suite.predicates) {
        std::set<std::string> distinct;
        for (const auto& gname : p.groups) {
            const auto* g = suite.find_group(gname);
            for (const auto& term : g->terms) {
                if (counts.count(term.canonical)) {
                    distinct.insert(term.canonical);
                }
            }
        }
        std::size_t needed = p.mode == markerscan::PredicateMode::Any
                                 ? 1
                                 : static_cast<std::size_t>(p.k);
        if (distinct.size() >= needed) {
            out.push_back(p.name);
        }
    }
    return out;
}

// Full counts table from first principles, one document at a time.
inline markerscan::CountsTable scan(const markerscan::AnalysisSuite& suite,
                                    const std::vector<markerscan::Document>& docs,
                                    markerscan::SectionScope scope) {
    markerscan::CountsTable table;
    for (const auto& p : suite.predicates) {
        table.predicates.push_back(p.name);
    }
    for (const auto& doc : docs) {
        auto& row = table.row(doc.year);
        row.total++;
        auto counts = count_terms(suite, doc, scope);
        auto matched = matched_predicates(suite, counts);
        for (const auto& name : matched) {
            row.matched[static_cast<std::size_t>(table.predicate_index(name))]++;
        }
    }
    return table;
}

}  // namespace oracle
