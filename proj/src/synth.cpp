#include "markerscan/synth.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "markerscan/errors.hpp"
#include "markerscan/rng.hpp"

namespace markerscan {

namespace {

[[noreturn]] void cfg_fail(std::size_t line, const std::string& msg) {
    throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

double parse_double_tok(const std::string& tok, std::size_t line) {
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || tok.empty()) cfg_fail(line, "bad number '" + tok + "'");
    return v;
}

int64_t parse_i64_tok(const std::string& tok, std::size_t line) {
    int64_t v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size())
        cfg_fail(line, "bad integer '" + tok + "'");
    return v;
}

uint64_t parse_u64_tok(const std::string& tok, std::size_t line) {
    uint64_t v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size())
        cfg_fail(line, "bad unsigned integer '" + tok + "'");
    return v;
}

int parse_int_tok(const std::string& tok, std::size_t line) {
    int64_t v = parse_i64_tok(tok, line);
    int n = static_cast<int>(v);
    if (v != n) cfg_fail(line, "integer out of range '" + tok + "'");
    return n;
}

double powi(double base, int exponent) {
    double acc = 1.0;
    for (int i = 0; i < exponent; ++i) acc *= base;
    return acc;
}

}  // namespace

SynthConfig parse_synth_config(const std::string& text) {
    SynthConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::set<std::string> seen;
    auto once = [&](const std::string& key) {
        if (!seen.insert(key).second) cfg_fail(line_no, "duplicate key '" + key + "'");
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(std::move(t));
        if (tok.empty()) continue;
        const std::string& key = tok[0];
        auto need = [&](std::size_t n) {
            if (tok.size() != n + 1)
                cfg_fail(line_no, "'" + key + "' takes " + std::to_string(n) + " value(s)");
        };
        auto need_at_least = [&](std::size_t n) {
            if (tok.size() < n + 1)
                cfg_fail(line_no, "'" + key + "' needs at least " + std::to_string(n) + " value(s)");
        };

        if (key == "seed") {
            need(1), once(key);
            cfg.seed = parse_u64_tok(tok[1], line_no);
        } else if (key == "type") {
            need(1), once(key);
            if (tok[1] != "article" && tok[1] != "preprint" && tok[1] != "review" &&
                tok[1] != "other")
                cfg_fail(line_no, "unknown document type '" + tok[1] + "'");
            cfg.doc_type = doc_type_from_string(tok[1]);
        } else if (key == "vocab") {
            need(1), once(key);
            cfg.vocab_size = parse_i64_tok(tok[1], line_no);
        } else if (key == "length") {
            need(2), once(key);
            cfg.len_min = parse_int_tok(tok[1], line_no);
            cfg.len_max = parse_int_tok(tok[2], line_no);
        } else if (key == "abstract") {
            need(2), once(key);
            cfg.abs_min = parse_int_tok(tok[1], line_no);
            cfg.abs_max = parse_int_tok(tok[2], line_no);
        } else if (key == "title") {
            need(1), once(key);
            cfg.title_tokens = parse_int_tok(tok[1], line_no);
        } else if (key == "occurrence") {
            need(1), once(key);
            cfg.occurrence_factor = parse_double_tok(tok[1], line_no);
        } else if (key == "marked_occurrence") {
            need(1), once(key);
            cfg.marked_occurrence = parse_double_tok(tok[1], line_no);
        } else if (key == "year") {
            need(2);
            int y = parse_int_tok(tok[1], line_no);
            for (const auto& [prev, _] : cfg.years)
                if (prev == y) cfg_fail(line_no, "duplicate year " + tok[1]);
            cfg.years.emplace_back(y, parse_i64_tok(tok[2], line_no));
        } else if (key == "inject") {
            need(2);
            int y = parse_int_tok(tok[1], line_no);
            if (cfg.injection.count(y)) cfg_fail(line_no, "duplicate inject year " + tok[1]);
            cfg.injection[y] = parse_double_tok(tok[2], line_no);
        } else if (key == "prob") {
            need(2);
            if (cfg.base_probs.count(tok[1])) cfg_fail(line_no, "duplicate prob for '" + tok[1] + "'");
            cfg.base_probs[tok[1]] = parse_double_tok(tok[2], line_no);
        } else if (key == "prob_group") {
            need(2);
            if (cfg.group_probs.count(tok[1]))
                cfg_fail(line_no, "duplicate prob_group for '" + tok[1] + "'");
            cfg.group_probs[tok[1]] = parse_double_tok(tok[2], line_no);
        } else if (key == "drift") {
            need(2);
            if (cfg.drift.count(tok[1])) cfg_fail(line_no, "duplicate drift for '" + tok[1] + "'");
            cfg.drift[tok[1]] = parse_double_tok(tok[2], line_no);
        } else if (key == "drift_all") {
            need(1), once(key);
            cfg.drift_all = parse_double_tok(tok[1], line_no);
        } else if (key == "marked_choose") {
            need(1), once(key);
            cfg.marked_choose = parse_int_tok(tok[1], line_no);
        } else if (key == "marked_groups") {
            need_at_least(1), once(key);
            cfg.marked_groups.assign(tok.begin() + 1, tok.end());
        } else if (key == "marked_terms") {
            need_at_least(1), once(key);
            cfg.marked_terms.assign(tok.begin() + 1, tok.end());
        } else if (key == "subject") {
            need_at_least(1);
            if (tok.size() > 3) cfg_fail(line_no, "'subject' takes a code and an optional weight");
            SubjectWeight sw;
            sw.code = tok[1];
            if (tok.size() == 3) sw.weight = parse_int_tok(tok[2], line_no);
            for (const auto& prev : cfg.subjects)
                if (prev.code == sw.code) cfg_fail(line_no, "duplicate subject '" + sw.code + "'");
            cfg.subjects.push_back(std::move(sw));
        } else if (key == "inject_subjects") {
            need_at_least(1), once(key);
            cfg.inject_subjects.assign(tok.begin() + 1, tok.end());
        } else {
            cfg_fail(line_no, "unknown key '" + key + "'");
        }
    }
    return cfg;
}

SynthConfig load_synth_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open synth config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_synth_config(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

double Expectation::at(int year, const std::string& predicate) const {
    auto it = cells.find({year, predicate});
    if (it == cells.end())
        throw ValidationError("no expectation for (" + std::to_string(year) + ", " + predicate + ")");
    return it->second;
}

SynthGenerator::SynthGenerator(SynthConfig cfg, const AnalysisSuite& suite)
    : cfg_(std::move(cfg)), suite_(suite) {
    validate_suite(suite_);
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };

    if (cfg_.years.empty()) fail("no years configured");
    std::sort(cfg_.years.begin(), cfg_.years.end());
    for (std::size_t i = 0; i < cfg_.years.size(); ++i) {
        if (i && cfg_.years[i].first == cfg_.years[i - 1].first)
            fail("duplicate year " + std::to_string(cfg_.years[i].first));
        if (cfg_.years[i].second <= 0)
            fail("year " + std::to_string(cfg_.years[i].first) + " has a non-positive count");
    }
    first_year_ = cfg_.years.front().first;
    int last_year = cfg_.years.back().first;

    if (cfg_.vocab_size < 1 || cfg_.vocab_size > (int64_t{1} << 30))
        fail("vocab size must be in [1, 2^30]");
    if (cfg_.len_min < 1 || cfg_.len_max < cfg_.len_min) fail("bad length range");
    if (cfg_.abs_min < 0 || cfg_.abs_max < cfg_.abs_min) fail("bad abstract range");
    if (cfg_.title_tokens < 0) fail("bad title length");
    if (cfg_.occurrence_factor < 0) fail("occurrence factor must be >= 0");
    if (cfg_.marked_occurrence < 0 || cfg_.marked_occurrence > 32)
        fail("marked occurrence lambda must be in [0, 32]");

    // Canonical-term lookup for validating config references.
    std::unordered_map<std::string, const MarkerGroup*> groups;
    std::unordered_set<std::string> canonicals;
    for (const auto& g : suite_.groups) {
        groups[g.name] = &g;
        for (const auto& t : g.terms) canonicals.insert(t.canonical);
    }

    std::map<std::string, double> probs = cfg_.base_probs;
    for (const auto& [gname, p] : cfg_.group_probs) {
        auto it = groups.find(gname);
        if (it == groups.end()) fail("prob_group references unknown group '" + gname + "'");
        for (const auto& t : it->second->terms) probs.try_emplace(t.canonical, p);
    }
    for (const auto& [term, p] : probs) {
        if (!canonicals.count(term)) fail("prob set for unknown term '" + term + "'");
        if (p < 0.0 || p > 1.0) fail("probability for '" + term + "' outside [0, 1]");
    }
    for (const auto& [term, g] : cfg_.drift) {
        if (!canonicals.count(term)) fail("drift set for unknown term '" + term + "'");
        if (g < 0.0) fail("drift for '" + term + "' must be >= 0");
    }
    if (cfg_.drift_all < 0.0) fail("drift_all must be >= 0");

    for (const auto& g : suite_.groups) {
        for (const auto& t : g.terms) {
            auto it = probs.find(t.canonical);
            if (it == probs.end() || it->second <= 0.0) continue;
            TermSpec spec;
            spec.canonical = t.canonical;
            spec.base_prob = it->second;
            auto d = cfg_.drift.find(t.canonical);
            spec.growth = d != cfg_.drift.end() ? d->second : cfg_.drift_all;
            double p_last = prob_at(spec, last_year);
            if (p_last > 1.0)
                fail("probability for '" + t.canonical + "' exceeds 1 by " +
                     std::to_string(last_year) + " under drift");
            if (cfg_.occurrence_factor * p_last > 32)
                fail("occurrence lambda for '" + t.canonical + "' exceeds 32");
            terms_.push_back(std::move(spec));
        }
    }

    bool injected = false;
    for (const auto& [year, eps] : cfg_.injection) {
        if (eps < 0.0 || eps > 1.0)
            fail("inject fraction for " + std::to_string(year) + " outside [0, 1]");
        bool known = false;
        for (const auto& [y, _] : cfg_.years) known |= y == year;
        if (!known) fail("inject year " + std::to_string(year) + " is not a configured year");
        injected |= eps > 0.0;
    }

    if (cfg_.marked_choose < 1) fail("marked_choose must be >= 1");
    if (!cfg_.marked_terms.empty()) {
        for (const auto& term : cfg_.marked_terms) {
            if (!canonicals.count(term)) fail("marked term '" + term + "' is not in the suite");
            if (std::find(pool_.begin(), pool_.end(), term) == pool_.end()) pool_.push_back(term);
        }
    } else {
        for (const auto& gname : cfg_.marked_groups) {
            auto it = groups.find(gname);
            if (it == groups.end()) {
                if (injected) fail("marked group '" + gname + "' is not in the suite");
                continue;
            }
            for (const auto& t : it->second->terms)
                if (std::find(pool_.begin(), pool_.end(), t.canonical) == pool_.end())
                    pool_.push_back(t.canonical);
        }
    }
    if (injected && static_cast<int>(pool_.size()) < cfg_.marked_choose)
        fail("marked pool has " + std::to_string(pool_.size()) + " terms, need " +
             std::to_string(cfg_.marked_choose));

    if (!cfg_.subjects.empty()) {
        std::unordered_set<std::string> inject_set(cfg_.inject_subjects.begin(),
                                                   cfg_.inject_subjects.end());
        for (const auto& code : cfg_.inject_subjects) {
            bool known = false;
            for (const auto& sw : cfg_.subjects) known |= sw.code == code;
            if (!known) fail("inject subject '" + code + "' is not a configured subject");
        }
        int64_t total_weight = 0, injected_weight = 0;
        for (std::size_t si = 0; si < cfg_.subjects.size(); ++si) {
            const SubjectWeight& sw = cfg_.subjects[si];
            if (sw.code.empty()) fail("empty subject code");
            if (sw.weight < 1) fail("subject '" + sw.code + "' has weight < 1");
            bool inj = inject_set.empty() || inject_set.count(sw.code);
            for (int w = 0; w < sw.weight; ++w) {
                CyclePos pos;
                pos.subject = static_cast<int>(si);
                pos.offset = w;
                pos.injectable = inj;
                cycle_.push_back(pos);
            }
            total_weight += sw.weight;
            if (inj) injected_weight += sw.weight;
        }
        if (total_weight > 1000000) fail("subject weights too large");
        cycle_weight_ = total_weight;
        injected_share_ = static_cast<double>(injected_weight) / static_cast<double>(total_weight);
        if (injected && injected_weight == 0) fail("injection enabled but no subject is injectable");
    } else if (!cfg_.inject_subjects.empty()) {
        fail("inject_subjects requires configured subjects");
    }

    // Each marker term needs a free slot even in the shortest document.
    int64_t min_slots = cfg_.title_tokens + cfg_.len_min;
    int64_t worst_markers = static_cast<int64_t>(terms_.size()) + cfg_.marked_choose;
    if (min_slots < 2 * worst_markers)
        fail("documents too short for the configured marker set (need length >= " +
             std::to_string(2 * worst_markers) + ")");

    // Marker lookup used during generation: suite-order term ids, then any
    // pool terms that carry no background probability.
    for (const auto& t : terms_) marker_names_.push_back(t.canonical);
    pool_marker_.resize(pool_.size());
    for (std::size_t i = 0; i < pool_.size(); ++i) {
        auto it = std::find(marker_names_.begin(), marker_names_.end(), pool_[i]);
        if (it == marker_names_.end()) {
            pool_marker_[i] = static_cast<int32_t>(marker_names_.size());
            marker_names_.push_back(pool_[i]);
        } else {
            pool_marker_[i] = static_cast<int32_t>(it - marker_names_.begin());
        }
    }

    filler_width_ = 1;
    for (int64_t v = cfg_.vocab_size - 1; v >= 10; v /= 10) ++filler_width_;
    if (cfg_.vocab_size <= (int64_t{1} << 20)) {
        filler_cache_.reserve(static_cast<std::size_t>(cfg_.vocab_size));
        char buf[32];
        for (int64_t i = 0; i < cfg_.vocab_size; ++i) {
            std::snprintf(buf, sizeof buf, "w%0*lld", filler_width_, static_cast<long long>(i));
            filler_cache_.emplace_back(buf);
        }
    }
}

double SynthGenerator::prob_at(const TermSpec& t, int year) const {
    int span = year - first_year_;
    if (span <= 0) return t.base_prob;
    return t.base_prob * powi(1.0 + t.growth, span);
}

double SynthGenerator::term_prob(const std::string& canonical, int year) const {
    for (const auto& t : terms_)
        if (t.canonical == canonical) return prob_at(t, year);
    return 0.0;
}

double SynthGenerator::epsilon_overall(int year) const {
    auto it = cfg_.injection.find(year);
    if (it == cfg_.injection.end()) return 0.0;
    return it->second * injected_share_;
}

int64_t SynthGenerator::docs_in(int year) const {
    for (const auto& [y, n] : cfg_.years)
        if (y == year) return n;
    return 0;
}

bool SynthGenerator::is_marked(int year, int64_t index) const {
    auto it = cfg_.injection.find(year);
    if (it == cfg_.injection.end() || it->second <= 0.0) return false;
    double eps = it->second;
    int64_t j = index;
    if (!cycle_.empty()) {
        const CyclePos& pos = cycle_[static_cast<std::size_t>(index % cycle_weight_)];
        if (!pos.injectable) return false;
        j = (index / cycle_weight_) * cfg_.subjects[static_cast<std::size_t>(pos.subject)].weight +
            pos.offset;
    }
    double lo = std::floor(static_cast<double>(j) * eps);
    double hi = std::floor(static_cast<double>(j + 1) * eps);
    return hi > lo;
}

const std::string& SynthGenerator::subject_of(int64_t index) const {
    static const std::string kNone;
    if (cycle_.empty()) return kNone;
    const CyclePos& pos = cycle_[static_cast<std::size_t>(index % cycle_weight_)];
    return cfg_.subjects[static_cast<std::size_t>(pos.subject)].code;
}

void SynthGenerator::make_document_into(int year, int64_t index, Document& doc) const {
    Rng rng(derive_seed(cfg_.seed, static_cast<uint64_t>(year), static_cast<uint64_t>(index)));

    const int length =
        cfg_.len_min + static_cast<int>(rng.below(static_cast<uint64_t>(cfg_.len_max - cfg_.len_min + 1)));
    int abstract_len =
        cfg_.abs_min + static_cast<int>(rng.below(static_cast<uint64_t>(cfg_.abs_max - cfg_.abs_min + 1)));
    abstract_len = std::min(abstract_len, length);
    const int slots = cfg_.title_tokens + length;

    // slot content: filler id, or -(marker id + 1)
    thread_local std::vector<int32_t> tok;
    tok.resize(static_cast<std::size_t>(slots));
    for (int s = 0; s < slots; ++s)
        tok[static_cast<std::size_t>(s)] = static_cast<int32_t>(rng.below(static_cast<uint64_t>(cfg_.vocab_size)));

    auto place = [&](int32_t marker) {
        for (int tries = 0; tries < 64; ++tries) {
            auto s = static_cast<std::size_t>(rng.below(static_cast<uint64_t>(slots)));
            if (tok[s] >= 0) {
                tok[s] = -(marker + 1);
                return;
            }
        }
        auto start = static_cast<std::size_t>(rng.below(static_cast<uint64_t>(slots)));
        for (int d = 0; d < slots; ++d) {
            std::size_t s = (start + static_cast<std::size_t>(d)) % static_cast<std::size_t>(slots);
            if (tok[s] >= 0) {
                tok[s] = -(marker + 1);
                return;
            }
        }
        // document saturated with markers; occurrence dropped
    };

    for (std::size_t ti = 0; ti < terms_.size(); ++ti) {
        double p = prob_at(terms_[ti], year);
        if (rng.next_double() >= p) continue;
        int repeats = 1 + rng.poisson(cfg_.occurrence_factor * p);
        for (int r = 0; r < repeats; ++r) place(static_cast<int32_t>(ti));
    }

    if (is_marked(year, index)) {
        thread_local std::vector<int32_t> pick;
        pick.resize(pool_.size());
        for (std::size_t i = 0; i < pick.size(); ++i) pick[i] = static_cast<int32_t>(i);
        for (int i = 0; i < cfg_.marked_choose; ++i) {
            auto j = static_cast<std::size_t>(i) +
                     static_cast<std::size_t>(rng.below(pick.size() - static_cast<std::size_t>(i)));
            std::swap(pick[static_cast<std::size_t>(i)], pick[j]);
            int repeats = 1 + rng.poisson(cfg_.marked_occurrence);
            int32_t marker = pool_marker_[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])];
            for (int r = 0; r < repeats; ++r) place(marker);
        }
    }

    char idbuf[48];
    std::snprintf(idbuf, sizeof idbuf, "s%d-%lld", year, static_cast<long long>(index));
    doc.id.assign(idbuf);
    doc.year = year;
    doc.type = cfg_.doc_type;
    doc.subjects.clear();
    if (!cycle_.empty()) doc.subjects.push_back(subject_of(index));

    auto append_tok = [&](std::string& out, std::size_t s) {
        if (!out.empty()) out.push_back(' ');
        int32_t c = tok[s];
        if (c >= 0) {
            if (!filler_cache_.empty()) {
                out += filler_cache_[static_cast<std::size_t>(c)];
            } else {
                char buf[32];
                std::snprintf(buf, sizeof buf, "w%0*lld", filler_width_, static_cast<long long>(c));
                out += buf;
            }
        } else {
            out += marker_names_[static_cast<std::size_t>(-c - 1)];
        }
    };

    doc.title.clear();
    doc.abstract.clear();
    doc.body.clear();
    std::size_t s = 0;
    for (int i = 0; i < cfg_.title_tokens; ++i) append_tok(doc.title, s++);
    for (int i = 0; i < abstract_len; ++i) append_tok(doc.abstract, s++);
    for (int i = 0; i < length - abstract_len; ++i) append_tok(doc.body, s++);
}

Document SynthGenerator::make_document(int year, int64_t index) const {
    Document doc;
    make_document_into(year, index, doc);
    return doc;
}

void SynthGenerator::write_corpus(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create corpus file: " + path);
    std::string buf;
    buf.reserve(8u << 20);
    Document doc;
    for (const auto& [year, n] : cfg_.years) {
        for (int64_t i = 0; i < n; ++i) {
            make_document_into(year, i, doc);
            append_record(buf, doc);
            buf.push_back('\n');
            if (buf.size() >= (4u << 20)) {
                out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
                buf.clear();
            }
        }
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    out.flush();
    if (!out) throw IoError("write failure on corpus file: " + path);
}

namespace {

// P(at least kmin of the terms present), background inclusion probabilities
// probs[], terms in `forced` present with certainty.
double subset_prob(const std::vector<double>& probs, uint32_t forced, int kmin) {
    const auto m = static_cast<uint32_t>(probs.size());
    double sum = 0.0;
    for (uint32_t mask = 0; mask < (uint32_t{1} << m); ++mask) {
        if ((mask & forced) != forced) continue;
        if (std::popcount(mask) < kmin) continue;
        double pr = 1.0;
        for (uint32_t i = 0; i < m; ++i) {
            if ((forced >> i) & 1) continue;  // present with probability 1
            pr *= ((mask >> i) & 1) ? probs[i] : 1.0 - probs[i];
        }
        sum += pr;
    }
    return sum;
}

}  // namespace

Expectation expected_frequency(const SynthConfig& cfg, const AnalysisSuite& suite) {
    SynthGenerator gen(cfg, suite);
    Expectation ex;

    const auto& pool = gen.marked_pool();
    const int choose = gen.config().marked_choose;

    for (const auto& pred : suite.predicates) {
        const std::vector<std::string> terms = suite.predicate_terms(pred);
        if (terms.size() > 20)
            throw ConfigError("predicate '" + pred.name + "' has too many terms for enumeration");
        const int kmin = pred.mode == PredicateMode::Any ? 1 : pred.k;

        // Bit of each pool term within this predicate's term list (0 = none).
        std::vector<uint32_t> pool_bits(pool.size(), 0);
        for (std::size_t i = 0; i < pool.size(); ++i)
            for (std::size_t t = 0; t < terms.size(); ++t)
                if (pool[i] == terms[t]) pool_bits[i] = uint32_t{1} << t;

        // All marked-set draws, grouped by which predicate terms they force.
        std::map<uint32_t, int64_t> forced_weight;
        int64_t combos = 0;
        if (!pool.empty() && choose <= static_cast<int>(pool.size())) {
            auto recurse = [&](auto&& self, std::size_t start, int left, uint32_t mask) -> void {
                if (left == 0) {
                    ++forced_weight[mask];
                    ++combos;
                    if (combos > 200000) throw ConfigError("marked pool too large for enumeration");
                    return;
                }
                for (std::size_t i = start; i < pool.size(); ++i) {
                    if (pool.size() - i < static_cast<std::size_t>(left)) break;
                    self(self, i + 1, left - 1, mask | pool_bits[i]);
                }
            };
            recurse(recurse, 0, choose, 0);
        }

        for (const auto& [year, n] : gen.config().years) {
            std::vector<double> probs(terms.size());
            for (std::size_t t = 0; t < terms.size(); ++t) probs[t] = gen.term_prob(terms[t], year);

            double pu = subset_prob(probs, 0, kmin);
            double eps = gen.epsilon_overall(year);
            double value = pu;
            if (eps > 0.0 && combos > 0) {
                double pm = 0.0;
                for (const auto& [mask, weight] : forced_weight)
                    pm += static_cast<double>(weight) / static_cast<double>(combos) *
                          subset_prob(probs, mask, kmin);
                value = eps * pm + (1.0 - eps) * pu;
            }
            ex.cells[{year, pred.name}] = value;
        }
    }
    return ex;
}

}  // namespace markerscan
