#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "markerscan/corpus.hpp"
#include "markerscan/errors.hpp"
#include "markerscan/lexicon.hpp"
#include "markerscan/matcher.hpp"
#include "markerscan/synth.hpp"
#include "markerscan/tokenizer.hpp"

using namespace markerscan;

namespace {

SynthConfig small_cfg() {
    SynthConfig cfg;
    cfg.years = {{2022, 300}, {2023, 300}, {2024, 300}};
    cfg.vocab_size = 500;
    cfg.len_min = 40;
    cfg.len_max = 80;
    cfg.abs_min = 20;
    cfg.abs_max = 30;
    cfg.title_tokens = 5;
    cfg.group_probs["C"] = 0.1;
    cfg.seed = 99;
    return cfg;
}

std::vector<Document> generate_all(const SynthGenerator& gen) {
    std::vector<Document> docs;
    for (const auto& [year, n] : gen.config().years) {
        for (int64_t i = 0; i < n; ++i) docs.push_back(gen.make_document(year, i));
    }
    return docs;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config parser reads every key") {
    SynthConfig cfg = parse_synth_config(
        "# comment\n"
        "seed 123\n"
        "type review\n"
        "vocab 750\n"
        "length 50 90   # trailing comment\n"
        "abstract 10 20\n"
        "title 6\n"
        "occurrence 2.5\n"
        "marked_occurrence 0.5\n"
        "year 2023 1000\n"
        "year 2024 2000\n"
        "prob crucial 0.25\n"
        "prob_group D 0.05\n"
        "drift crucial 0.02\n"
        "drift_all 0.01\n"
        "inject 2024 0.1\n"
        "marked_choose 3\n"
        "marked_groups C D\n"
        "subject 09 2\n"
        "subject 13\n"
        "inject_subjects 09\n");
    CHECK(cfg.seed == 123);
    CHECK(cfg.doc_type == DocType::Review);
    CHECK(cfg.vocab_size == 750);
    CHECK(cfg.len_min == 50);
    CHECK(cfg.len_max == 90);
    CHECK(cfg.abs_min == 10);
    CHECK(cfg.abs_max == 20);
    CHECK(cfg.title_tokens == 6);
    CHECK(cfg.occurrence_factor == doctest::Approx(2.5));
    CHECK(cfg.marked_occurrence == doctest::Approx(0.5));
    CHECK(cfg.years == std::vector<std::pair<int, int64_t>>{{2023, 1000}, {2024, 2000}});
    CHECK(cfg.base_probs.at("crucial") == doctest::Approx(0.25));
    CHECK(cfg.group_probs.at("D") == doctest::Approx(0.05));
    CHECK(cfg.drift.at("crucial") == doctest::Approx(0.02));
    CHECK(cfg.drift_all == doctest::Approx(0.01));
    CHECK(cfg.injection.at(2024) == doctest::Approx(0.1));
    CHECK(cfg.marked_choose == 3);
    CHECK(cfg.marked_groups == std::vector<std::string>{"C", "D"});
    REQUIRE(cfg.subjects.size() == 2);
    CHECK(cfg.subjects[0].code == "09");
    CHECK(cfg.subjects[0].weight == 2);
    CHECK(cfg.subjects[1].weight == 1);
    CHECK(cfg.inject_subjects == std::vector<std::string>{"09"});
}

TEST_CASE("config parser rejects bad input with line numbers") {
    auto fails = [](const std::string& text, const std::string& needle) {
        try {
            parse_synth_config(text);
            FAIL("expected ConfigError for: " << text);
        } catch (const ConfigError& e) {
            INFO("message: " << e.what());
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    fails("seed 1\nseed 2\n", "line 2");
    fails("bogus 1\n", "unknown key");
    fails("seed notanumber\n", "unsigned");
    fails("length 10\n", "'length' takes 2");
    fails("year 2024 100\nyear 2024 100\n", "duplicate year");
    fails("type journal\n", "unknown document type");
    fails("prob crucial 0.1\nprob crucial 0.2\n", "duplicate prob");
}

TEST_CASE("generator validation") {
    AnalysisSuite suite = builtin_suite();
    auto rejects = [&](auto mutate) {
        SynthConfig cfg = small_cfg();
        mutate(cfg);
        CHECK_THROWS_AS(SynthGenerator(cfg, suite), ConfigError);
    };

    rejects([](SynthConfig& c) { c.injection[2024] = 1.5; });
    rejects([](SynthConfig& c) { c.injection[2030] = 0.1; });  // not a configured year
    rejects([](SynthConfig& c) { c.base_probs["crucial"] = 1.2; });
    rejects([](SynthConfig& c) { c.base_probs["nosuchword"] = 0.1; });
    rejects([](SynthConfig& c) { c.group_probs["nosuchgroup"] = 0.1; });
    rejects([](SynthConfig& c) {  // drift pushes the last-year probability past 1
        c.base_probs["crucial"] = 0.9;
        c.drift["crucial"] = 0.5;
    });
    rejects([](SynthConfig& c) { c.marked_terms = {"notaterm"}; });
    rejects([](SynthConfig& c) {  // pool smaller than the draw when injecting
        c.injection[2024] = 0.5;
        c.marked_terms = {"crucial"};
        c.marked_choose = 2;
    });
    rejects([](SynthConfig& c) { c.inject_subjects = {"09"}; });  // no subjects configured
    rejects([](SynthConfig& c) {
        c.subjects = {{"09", 1}};
        c.inject_subjects = {"13"};
    });
    rejects([](SynthConfig& c) { c.len_min = c.len_max = 4; });  // too short for markers
    rejects([](SynthConfig& c) { c.occurrence_factor = 400.0; });  // lambda cap
    rejects([](SynthConfig& c) { c.years.clear(); });
    rejects([](SynthConfig& c) { c.years[0].second = 0; });

    SUBCASE("small pool is fine while nothing is injected") {
        SynthConfig cfg = small_cfg();
        cfg.marked_terms = {"crucial"};
        cfg.marked_choose = 2;
        CHECK_NOTHROW(SynthGenerator(cfg, suite));
    }
}

TEST_CASE("documents have the configured shape") {
    SynthConfig cfg = small_cfg();
    SynthGenerator gen(cfg, builtin_suite());

    for (int64_t i : {int64_t{0}, int64_t{7}, int64_t{299}}) {
        Document d = gen.make_document(2023, i);
        CHECK(d.id == "s2023-" + std::to_string(i));
        CHECK(d.year == 2023);
        CHECK(d.type == DocType::Article);
        CHECK(d.subjects.empty());
        CHECK(tokenize(d.title).size() == 5);
        std::size_t abs_tokens = tokenize(d.abstract).size();
        std::size_t body_tokens = tokenize(d.body).size();
        CHECK(abs_tokens >= 20);
        CHECK(abs_tokens <= 30);
        CHECK(abs_tokens + body_tokens >= 40);
        CHECK(abs_tokens + body_tokens <= 80);
    }
}

TEST_CASE("generation is deterministic and order-free") {
    SynthConfig cfg = small_cfg();
    cfg.injection[2024] = 0.25;
    AnalysisSuite suite = builtin_suite();
    SynthGenerator g1(cfg, suite);
    SynthGenerator g2(cfg, suite);

    // Random access equals sequential access, across generator instances.
    Document late = g1.make_document(2024, 123);
    for (int64_t i = 0; i < 200; ++i) (void)g1.make_document(2022, i);
    Document again = g1.make_document(2024, 123);
    Document fresh = g2.make_document(2024, 123);
    CHECK(late.body == again.body);
    CHECK(late.body == fresh.body);
    CHECK(late.title == fresh.title);

    SUBCASE("written corpora are byte-identical") {
        g1.write_corpus("synth_det_a.jsonl");
        g2.write_corpus("synth_det_b.jsonl");
        CHECK(slurp("synth_det_a.jsonl") == slurp("synth_det_b.jsonl"));
        std::remove("synth_det_a.jsonl");
        std::remove("synth_det_b.jsonl");
    }
    SUBCASE("different seeds differ") {
        SynthConfig other = cfg;
        other.seed = cfg.seed + 1;
        SynthGenerator g3(other, suite);
        CHECK(g3.make_document(2024, 123).body != late.body);
    }
}

TEST_CASE("marked fraction is exact under index stratification") {
    AnalysisSuite suite = builtin_suite();
    for (double eps : {0.0, 0.1, 0.25, 1.0 / 3.0, 0.37, 0.999, 1.0}) {
        SynthConfig cfg = small_cfg();
        cfg.years = {{2024, 1000}};
        if (eps > 0) cfg.injection[2024] = eps;
        SynthGenerator gen(cfg, suite);
        int64_t marked = 0;
        for (int64_t j = 0; j < 1000; ++j) marked += gen.is_marked(2024, j) ? 1 : 0;
        CHECK(marked == static_cast<int64_t>(std::floor(1000 * eps)));
        // Exactness holds for every prefix, not just the full year.
        int64_t prefix_marked = 0;
        for (int64_t j = 0; j < 137; ++j) prefix_marked += gen.is_marked(2024, j) ? 1 : 0;
        CHECK(prefix_marked == static_cast<int64_t>(std::floor(137 * eps)));
    }
}

TEST_CASE("full injection guarantees the marked terms") {
    SynthConfig cfg = small_cfg();
    cfg.injection[2024] = 1.0;
    cfg.marked_terms = {"crucial", "valuable"};
    cfg.marked_choose = 2;
    SynthGenerator gen(cfg, builtin_suite());
    MatchEngine engine(builtin_suite());

    auto docs = generate_all(gen);
    CountsTable t = scan_documents(docs, engine, SectionScope::FullText);
    CHECK(t.total_at(2024) == 300);
    CHECK(t.matched_at(2024, "2xC") == 300);  // every 2024 document carries both terms
    CHECK(t.matched_at(2024, "C") == 300);
    CHECK(t.matched_at(2023, "2xC") < 300);  // no injection before the horizon
}

TEST_CASE("zero probabilities and zero injection yield a silent corpus") {
    SynthConfig cfg = small_cfg();
    cfg.group_probs.clear();
    SynthGenerator gen(cfg, builtin_suite());
    MatchEngine engine(builtin_suite());
    CountsTable t = scan_documents(generate_all(gen), engine, SectionScope::FullText);
    for (const auto& [year, row] : t.years) {
        CHECK(row.total == 300);
        for (int64_t m : row.matched) CHECK(m == 0);
    }
}

TEST_CASE("expected_frequency hand arithmetic") {
    AnalysisSuite suite = builtin_suite();

    SUBCASE("background-only Any over three p=0.1 terms") {
        SynthConfig cfg = small_cfg();
        Expectation ex = expected_frequency(cfg, suite);
        CHECK(ex.at(2023, "C") == doctest::Approx(1.0 - 0.9 * 0.9 * 0.9).epsilon(1e-9));
        CHECK(ex.at(2023, "control") == 0.0);
        CHECK(ex.at(2023, "2xCD") ==
              doctest::Approx(0.1 * 0.1 * 0.9 * 3 + 0.1 * 0.1 * 0.1).epsilon(1e-9));
    }
    SUBCASE("epsilon mixes the marked and unmarked populations") {
        SynthConfig cfg = small_cfg();
        cfg.injection[2024] = 0.2;
        cfg.marked_terms = {"crucial", "valuable"};
        cfg.marked_choose = 2;
        Expectation ex = expected_frequency(cfg, suite);
        double background = 1.0 - 0.9 * 0.9 * 0.9;
        CHECK(ex.at(2024, "C") == doctest::Approx(0.2 + 0.8 * background).epsilon(1e-9));
        CHECK(ex.at(2023, "C") == doctest::Approx(background).epsilon(1e-9));
        // Marked documents always carry exactly these two C terms, so 2xC
        // matches with certainty in the marked share.
        double bg_2xc = 0.1 * 0.1 * 0.9 * 3 + 0.1 * 0.1 * 0.1;
        CHECK(ex.at(2024, "2xC") == doctest::Approx(0.2 + 0.8 * bg_2xc).epsilon(1e-9));
    }
    SUBCASE("all zero probabilities give zero everywhere") {
        SynthConfig cfg = small_cfg();
        cfg.group_probs.clear();
        Expectation ex = expected_frequency(cfg, suite);
        for (const auto& [key, value] : ex.cells) CHECK(value == 0.0);
    }
    SUBCASE("unknown cell lookups are rejected") {
        SynthConfig cfg = small_cfg();
        Expectation ex = expected_frequency(cfg, suite);
        CHECK_THROWS_AS(ex.at(1999, "C"), ValidationError);
    }
}

TEST_CASE("drift compounds geometrically") {
    SynthConfig cfg = small_cfg();
    cfg.drift_all = 0.1;
    SynthGenerator gen(cfg, builtin_suite());
    CHECK(gen.term_prob("crucial", 2022) == doctest::Approx(0.1));
    CHECK(gen.term_prob("crucial", 2023) == doctest::Approx(0.11));
    CHECK(gen.term_prob("crucial", 2024) == doctest::Approx(0.1 * 1.1 * 1.1));
    CHECK(gen.term_prob("red", 2024) == 0.0);  // no probability configured
}

TEST_CASE("realized frequencies converge to the analytic expectation") {
    AnalysisSuite suite = builtin_suite();
    MatchEngine engine(suite);

    SynthConfig cfg;
    cfg.years = {{2022, 4000}, {2023, 4000}, {2024, 4000}};
    cfg.vocab_size = 500;
    cfg.len_min = 60;
    cfg.len_max = 120;
    cfg.abs_min = 30;
    cfg.abs_max = 40;
    cfg.title_tokens = 5;
    cfg.group_probs = {{"control", 0.10}, {"A", 0.10}, {"B", 0.05}, {"C", 0.0345}, {"D", 0.02}};
    cfg.injection[2024] = 0.1;

    int cells = 0;
    int failures = 0;
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        cfg.seed = seed;
        SynthGenerator gen(cfg, suite);
        Expectation ex = expected_frequency(cfg, suite);
        CountsTable t = scan_documents(generate_all(gen), engine, SectionScope::FullText);
        for (const auto& [year, n] : cfg.years) {
            for (const auto& pred : engine.predicate_names()) {
                double e = ex.at(year, pred);
                double observed = static_cast<double>(t.matched_at(year, pred)) /
                                  static_cast<double>(t.total_at(year));
                double sigma = std::sqrt(e * (1.0 - e) / static_cast<double>(n));
                ++cells;
                if (std::abs(observed - e) > 3.0 * sigma) ++failures;
            }
        }
    }
    // >= 99% of (seed, year, predicate) cells inside three binomial sigma.
    CHECK(cells == 20 * 3 * 12);
    CHECK(failures * 100 <= cells);
}

TEST_CASE("subject cycle, restricted injection, and the scaled epsilon") {
    SynthConfig cfg = small_cfg();
    cfg.years = {{2024, 300}};
    cfg.subjects = {{"09", 2}, {"13", 1}};
    cfg.inject_subjects = {"09"};
    cfg.injection[2024] = 0.3;
    SynthGenerator gen(cfg, builtin_suite());

    CHECK(gen.epsilon_overall(2024) == doctest::Approx(0.3 * 2.0 / 3.0));

    int64_t by_code[2] = {0, 0};
    int64_t marked_09 = 0;
    int64_t marked_13 = 0;
    for (int64_t i = 0; i < 300; ++i) {
        const std::string& code = gen.subject_of(i);
        if (code == "09") {
            ++by_code[0];
            marked_09 += gen.is_marked(2024, i) ? 1 : 0;
        } else {
            REQUIRE(code == "13");
            ++by_code[1];
            marked_13 += gen.is_marked(2024, i) ? 1 : 0;
        }
    }
    CHECK(by_code[0] == 200);  // weight 2 of 3
    CHECK(by_code[1] == 100);
    CHECK(marked_13 == 0);  // injection restricted to "09"
    CHECK(marked_09 == static_cast<int64_t>(std::floor(200 * 0.3)));

    SUBCASE("documents carry their subject code") {
        Document d = gen.make_document(2024, 0);
        REQUIRE(d.subjects.size() == 1);
        CHECK(d.subjects[0] == gen.subject_of(0));
    }
}
