#include "markerscan/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "markerscan/errors.hpp"
#include "markerscan/tokenizer.hpp"

namespace markerscan {

namespace {

bool is_identifier(std::string_view s) {
    if (s.empty()) {
        return false;
    }
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
               c == '_';
    });
}

std::string fold_term(std::string_view word) {
    std::string folded;
    std::string buf;
    std::size_t pieces = 0;
    for_each_token(word, buf, [&](std::string_view tok) {
        ++pieces;
        folded.assign(tok);
    });
    if (pieces != 1) {
        folded.clear();  // signals an invalid term to the caller
    }
    return folded;
}

MarkerTerm make_term(std::string canonical, std::vector<std::string> extra_variants = {}) {
    MarkerTerm t;
    t.canonical = std::move(canonical);
    t.variants.push_back(t.canonical);
    for (auto& v : extra_variants) {
        if (v != t.canonical) {
            t.variants.push_back(std::move(v));
        }
    }
    return t;
}

MarkerGroup make_group(std::string name, Band band, std::vector<std::string> words) {
    MarkerGroup g;
    g.name = std::move(name);
    g.band = band;
    for (auto& w : words) {
        g.terms.push_back(make_term(std::move(w)));
    }
    return g;
}

Predicate any_of(std::string name, std::vector<std::string> groups) {
    return Predicate{std::move(name), std::move(groups), PredicateMode::Any, 0};
}

Predicate at_least(std::string name, int k, std::vector<std::string> groups) {
    return Predicate{std::move(name), std::move(groups), PredicateMode::AtLeastK, k};
}

}  // namespace

const char* band_name(Band b) {
    switch (b) {
        case Band::Control: return "control";
        case Band::A: return "A";
        case Band::B: return "B";
        case Band::C: return "C";
        case Band::D: return "D";
        case Band::Custom: return "custom";
    }
    return "custom";
}

static Band parse_band(const std::string& s, int line) {
    if (s == "control") return Band::Control;
    if (s == "A") return Band::A;
    if (s == "B") return Band::B;
    if (s == "C") return Band::C;
    if (s == "D") return Band::D;
    if (s == "custom") return Band::Custom;
    throw ConfigError("line " + std::to_string(line) + ": unknown band '" + s + "'");
}

const MarkerGroup* AnalysisSuite::find_group(const std::string& gname) const {
    for (const auto& g : groups) {
        if (g.name == gname) {
            return &g;
        }
    }
    return nullptr;
}

const Predicate* AnalysisSuite::find_predicate(const std::string& pname) const {
    for (const auto& p : predicates) {
        if (p.name == pname) {
            return &p;
        }
    }
    return nullptr;
}

std::vector<std::string> AnalysisSuite::predicate_terms(const Predicate& p) const {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (const auto& gname : p.groups) {
        const MarkerGroup* g = find_group(gname);
        if (g == nullptr) {
            throw ConfigError("predicate '" + p.name + "' references unknown group '" + gname +
                              "'");
        }
        for (const auto& t : g->terms) {
            if (seen.insert(t.canonical).second) {
                out.push_back(t.canonical);
            }
        }
    }
    return out;
}

AnalysisSuite builtin_suite() {
    AnalysisSuite s;
    s.name = "builtin";
    s.groups = {
        make_group("control", Band::Control, {"red", "blue", "yellow"}),
        make_group("A", Band::A, {"potential", "significant", "these"}),
        make_group("B", Band::B, {"capabilities", "comprehensive", "effectively", "enhance"}),
        make_group("C", Band::C, {"additionally", "crucial", "valuable"}),
        make_group("D", Band::D,
                   {"invaluable", "methodically", "noteworthy", "pivotal", "strategically"}),
    };
    s.predicates = {
        any_of("control", {"control"}),
        any_of("A", {"A"}),
        any_of("B", {"B"}),
        any_of("C", {"C"}),
        any_of("D", {"D"}),
        at_least("2xcontrol", 2, {"control"}),
        at_least("2xA", 2, {"A"}),
        at_least("2xB", 2, {"B"}),
        at_least("2xC", 2, {"C"}),
        at_least("2xD", 2, {"D"}),
        at_least("2xBC", 2, {"B", "C"}),
        at_least("2xCD", 2, {"C", "D"}),
    };
    validate_suite(s);
    return s;
}

void validate_suite(const AnalysisSuite& suite) {
    std::unordered_set<std::string> group_names;
    std::unordered_map<std::string, std::string> variant_owner;
    for (const auto& g : suite.groups) {
        if (!is_identifier(g.name)) {
            throw ConfigError("group name '" + g.name + "' is not an ASCII identifier");
        }
        if (!group_names.insert(g.name).second) {
            throw ConfigError("duplicate group name '" + g.name + "'");
        }
        if (g.terms.empty()) {
            throw ConfigError("group '" + g.name + "' has no terms");
        }
        std::unordered_set<std::string> canon;
        for (const auto& t : g.terms) {
            if (!canon.insert(t.canonical).second) {
                throw ConfigError("group '" + g.name + "' repeats term '" + t.canonical + "'");
            }
            if (t.variants.empty()) {
                throw ConfigError("term '" + t.canonical + "' has no variants");
            }
            std::unordered_set<std::string> vs;
            for (const auto& v : t.variants) {
                if (!is_canonical_token(v)) {
                    throw ConfigError("term variant '" + v +
                                      "' is not a single case-folded letter token");
                }
                if (!vs.insert(v).second) {
                    throw ConfigError("term '" + t.canonical + "' repeats variant '" + v + "'");
                }
                auto [owner, fresh] = variant_owner.try_emplace(v, t.canonical);
                if (!fresh && owner->second != t.canonical) {
                    throw ConfigError("variant '" + v + "' belongs to both '" + owner->second +
                                      "' and '" + t.canonical + "'");
                }
            }
            if (std::find(t.variants.begin(), t.variants.end(), t.canonical) ==
                t.variants.end()) {
                throw ConfigError("term '" + t.canonical + "' lacks its canonical variant");
            }
        }
    }
    std::unordered_set<std::string> pred_names;
    for (const auto& p : suite.predicates) {
        if (!is_identifier(p.name)) {
            throw ConfigError("predicate name '" + p.name + "' is not an ASCII identifier");
        }
        if (!pred_names.insert(p.name).second) {
            throw ConfigError("duplicate predicate name '" + p.name + "'");
        }
        if (p.groups.empty()) {
            throw ConfigError("predicate '" + p.name + "' references no groups");
        }
        auto terms = suite.predicate_terms(p);  // also checks group references
        if (p.mode == PredicateMode::AtLeastK) {
            if (p.k < 2) {
                throw ConfigError("predicate '" + p.name + "' needs k >= 2");
            }
            if (static_cast<std::size_t>(p.k) > terms.size()) {
                throw ConfigError("predicate '" + p.name + "': k=" + std::to_string(p.k) +
                                  " exceeds the " + std::to_string(terms.size()) +
                                  " distinct terms of its groups");
            }
        }
    }
}

namespace {

struct LineScanner {
    std::string_view text;
    std::size_t pos = 0;

    void skip_space() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) {
            ++pos;
        }
    }
    bool at_end() {
        skip_space();
        return pos >= text.size();
    }
    bool consume(char c) {
        skip_space();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    std::string word() {
        skip_space();
        std::size_t start = pos;
        while (pos < text.size() && text[pos] != ' ' && text[pos] != '\t' && text[pos] != ':' &&
               text[pos] != ',' && text[pos] != '(' && text[pos] != ')' && text[pos] != '|' &&
               text[pos] != '+' && text[pos] != '=') {
            ++pos;
        }
        return std::string(text.substr(start, pos - start));
    }
};

std::vector<std::string> split_group_refs(LineScanner& sc, int line) {
    std::vector<std::string> refs;
    while (true) {
        std::string g = sc.word();
        if (g.empty()) {
            throw ConfigError("line " + std::to_string(line) + ": expected a group name");
        }
        refs.push_back(std::move(g));
        if (!sc.consume('+')) {
            break;
        }
    }
    if (!sc.at_end()) {
        throw ConfigError("line " + std::to_string(line) + ": trailing text after group list");
    }
    return refs;
}

MarkerTerm parse_term(LineScanner& sc, int line) {
    std::string word = sc.word();
    if (word.empty()) {
        throw ConfigError("line " + std::to_string(line) + ": expected a term");
    }
    std::string canonical = fold_term(word);
    if (canonical.empty()) {
        throw ConfigError("line " + std::to_string(line) + ": term '" + word +
                          "' is not a single letter token");
    }
    MarkerTerm t = make_term(canonical);
    if (sc.consume('(')) {
        while (true) {
            std::string v = sc.word();
            if (v.empty()) {
                throw ConfigError("line " + std::to_string(line) + ": empty variant in '" +
                                  word + "'");
            }
            std::string folded = fold_term(v);
            if (folded.empty()) {
                throw ConfigError("line " + std::to_string(line) + ": variant '" + v +
                                  "' is not a single letter token");
            }
            if (std::find(t.variants.begin(), t.variants.end(), folded) == t.variants.end()) {
                t.variants.push_back(std::move(folded));
            }
            if (sc.consume(')')) {
                break;
            }
            if (!sc.consume('|')) {
                throw ConfigError("line " + std::to_string(line) +
                                  ": expected '|' or ')' in variant list");
            }
        }
    }
    return t;
}

}  // namespace

AnalysisSuite load_suite(const std::string& config_text) {
    AnalysisSuite suite;
    suite.name = "custom";
    std::istringstream in(config_text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view sv(raw);
        if (auto hash = sv.find('#'); hash != std::string_view::npos) {
            sv = sv.substr(0, hash);
        }
        LineScanner sc{sv};
        if (sc.at_end()) {
            continue;
        }
        std::string keyword = sc.word();
        if (keyword == "suite") {
            std::string n = sc.word();
            if (n.empty() || !sc.at_end()) {
                throw ConfigError("line " + std::to_string(line) + ": expected 'suite <name>'");
            }
            suite.name = n;
        } else if (keyword == "group") {
            MarkerGroup g;
            g.name = sc.word();
            if (g.name.empty()) {
                throw ConfigError("line " + std::to_string(line) + ": group needs a name");
            }
            sc.skip_space();
            if (sc.pos < sc.text.size() && sc.text[sc.pos] == 'b') {
                std::string key = sc.word();
                if (key != "band" || !sc.consume('=')) {
                    throw ConfigError("line " + std::to_string(line) +
                                      ": expected 'band=<label>'");
                }
                g.band = parse_band(sc.word(), line);
            }
            if (!sc.consume(':')) {
                throw ConfigError("line " + std::to_string(line) + ": expected ':' after group");
            }
            while (true) {
                g.terms.push_back(parse_term(sc, line));
                if (!sc.consume(',')) {
                    break;
                }
            }
            if (!sc.at_end()) {
                throw ConfigError("line " + std::to_string(line) +
                                  ": trailing text after term list");
            }
            suite.groups.push_back(std::move(g));
        } else if (keyword == "predicate") {
            Predicate p;
            p.name = sc.word();
            if (p.name.empty()) {
                throw ConfigError("line " + std::to_string(line) + ": predicate needs a name");
            }
            if (!sc.consume(':')) {
                throw ConfigError("line " + std::to_string(line) +
                                  ": expected ':' after predicate name");
            }
            std::string mode = sc.word();
            if (mode == "any") {
                p.mode = PredicateMode::Any;
            } else if (mode == "atleast") {
                p.mode = PredicateMode::AtLeastK;
                std::string kword = sc.word();
                try {
                    std::size_t used = 0;
                    p.k = std::stoi(kword, &used);
                    if (used != kword.size()) {
                        throw std::invalid_argument(kword);
                    }
                } catch (const std::exception&) {
                    throw ConfigError("line " + std::to_string(line) + ": bad count '" + kword +
                                      "'");
                }
            } else {
                throw ConfigError("line " + std::to_string(line) +
                                  ": expected 'any of' or 'atleast <k> of'");
            }
            if (sc.word() != "of") {
                throw ConfigError("line " + std::to_string(line) + ": expected 'of'");
            }
            p.groups = split_group_refs(sc, line);
            suite.predicates.push_back(std::move(p));
        } else {
            throw ConfigError("line " + std::to_string(line) + ": unknown directive '" +
                              keyword + "'");
        }
    }
    validate_suite(suite);
    return suite;
}

AnalysisSuite load_suite_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open suite file: " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return load_suite(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string to_config_text(const AnalysisSuite& suite) {
    std::ostringstream out;
    out << "suite " << suite.name << "\n";
    for (const auto& g : suite.groups) {
        out << "group " << g.name << " band=" << band_name(g.band) << " : ";
        for (std::size_t i = 0; i < g.terms.size(); ++i) {
            if (i > 0) {
                out << ", ";
            }
            const auto& t = g.terms[i];
            out << t.canonical;
            if (t.variants.size() > 1) {
                out << '(';
                for (std::size_t v = 0; v < t.variants.size(); ++v) {
                    if (v > 0) {
                        out << '|';
                    }
                    out << t.variants[v];
                }
                out << ')';
            }
        }
        out << "\n";
    }
    for (const auto& p : suite.predicates) {
        out << "predicate " << p.name << " : ";
        if (p.mode == PredicateMode::Any) {
            out << "any of ";
        } else {
            out << "atleast " << p.k << " of ";
        }
        for (std::size_t i = 0; i < p.groups.size(); ++i) {
            if (i > 0) {
                out << '+';
            }
            out << p.groups[i];
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace markerscan
