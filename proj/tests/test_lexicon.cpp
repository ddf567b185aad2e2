#include <string>
#include <vector>

#include "doctest.h"
#include "markerscan/errors.hpp"
#include "markerscan/lexicon.hpp"

using namespace markerscan;

namespace {
std::vector<std::string> canonicals(const MarkerGroup& g) {
    std::vector<std::string> out;
    for (const auto& t : g.terms) out.push_back(t.canonical);
    return out;
}
}  // namespace

TEST_CASE("builtin suite structure") {
    AnalysisSuite s = builtin_suite();

    REQUIRE(s.groups.size() == 5);
    CHECK(canonicals(*s.find_group("control")) ==
          std::vector<std::string>{"red", "blue", "yellow"});
    CHECK(canonicals(*s.find_group("A")) ==
          std::vector<std::string>{"potential", "significant", "these"});
    CHECK(canonicals(*s.find_group("B")) ==
          std::vector<std::string>{"capabilities", "comprehensive", "effectively", "enhance"});
    CHECK(canonicals(*s.find_group("C")) ==
          std::vector<std::string>{"additionally", "crucial", "valuable"});
    CHECK(canonicals(*s.find_group("D")) ==
          std::vector<std::string>{"invaluable", "methodically", "noteworthy", "pivotal",
                                   "strategically"});
    CHECK(s.find_group("control")->band == Band::Control);
    CHECK(s.find_group("D")->band == Band::D);

    REQUIRE(s.predicates.size() == 12);
    std::vector<std::string> names;
    for (const auto& p : s.predicates) names.push_back(p.name);
    CHECK(names == std::vector<std::string>{"control", "A", "B", "C", "D", "2xcontrol", "2xA",
                                            "2xB", "2xC", "2xD", "2xBC", "2xCD"});

    const Predicate* cd = s.find_predicate("2xCD");
    REQUIRE(cd != nullptr);
    CHECK(cd->mode == PredicateMode::AtLeastK);
    CHECK(cd->k == 2);
    CHECK(s.predicate_terms(*cd).size() == 8);

    const Predicate* any_c = s.find_predicate("C");
    CHECK(any_c->mode == PredicateMode::Any);

    // Every at-least-k predicate satisfies k <= union size with room.
    for (const auto& p : s.predicates) {
        if (p.mode == PredicateMode::AtLeastK) {
            CHECK(p.k == 2);
            CHECK(s.predicate_terms(p).size() >= 3);
        }
    }

    // Reproducibility: repeated calls give structurally equal suites.
    CHECK(builtin_suite() == s);
}

TEST_CASE("suite config grammar") {
    AnalysisSuite s = load_suite("group g: alpha, beta\npredicate p: any of g\n");
    REQUIRE(s.groups.size() == 1);
    CHECK(s.groups[0].band == Band::Custom);
    CHECK(canonicals(s.groups[0]) == std::vector<std::string>{"alpha", "beta"});
    REQUIRE(s.predicates.size() == 1);
    CHECK(s.predicates[0].mode == PredicateMode::Any);

    SUBCASE("variants") {
        AnalysisSuite v = load_suite(
            "group g: underscore(underscore|underscores|underscored)\n"
            "predicate p: any of g\n");
        REQUIRE(v.groups[0].terms.size() == 1);
        CHECK(v.groups[0].terms[0].variants ==
              std::vector<std::string>{"underscore", "underscores", "underscored"});
    }
    SUBCASE("terms are case-folded on load") {
        AnalysisSuite v = load_suite("group g: Alpha(ALPHA|AlphaS)\npredicate p: any of g\n");
        CHECK(v.groups[0].terms[0].canonical == "alpha");
        CHECK(v.groups[0].terms[0].variants == std::vector<std::string>{"alpha", "alphas"});
    }
    SUBCASE("band labels and group unions") {
        AnalysisSuite v = load_suite(
            "# comment line\n"
            "group one band=C : crucial\n"
            "group two band=D : pivotal\n"
            "predicate both : atleast 2 of one+two\n");
        CHECK(v.groups[0].band == Band::C);
        CHECK(v.groups[1].band == Band::D);
        CHECK(v.predicates[0].groups == std::vector<std::string>{"one", "two"});
        CHECK(v.predicates[0].k == 2);
        CHECK(v.predicate_terms(v.predicates[0]) ==
              std::vector<std::string>{"crucial", "pivotal"});
    }
}

TEST_CASE("round-trip through config text") {
    AnalysisSuite s = builtin_suite();
    CHECK(load_suite(to_config_text(s)) == s);

    AnalysisSuite custom = load_suite(
        "suite custom\n"
        "group g band=B : enhance(enhance|enhances|enhanced), apex\n"
        "predicate p : atleast 2 of g\n");
    CHECK(load_suite(to_config_text(custom)) == custom);
}

TEST_CASE("config errors carry line numbers") {
    auto fails = [](const std::string& text, const std::string& needle) {
        try {
            load_suite(text);
            FAIL("expected ConfigError for: " << text);
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };

    fails("predicate p: atleast 2 of g\n", "g");                        // unknown group
    fails("group g: a\npredicate p: atleast 2 of g\n", "k=2");          // k beyond union
    fails("group g: a\npredicate p: atleast 1 of g\n", "k");            // k < 2
    fails("group g: a\ngroup g: b\npredicate p: any of g\n", "duplicate");
    fails("group g: a, a\npredicate p: any of g\n", "repeats");
    fails("group g: re-analysis\npredicate p: any of g\n", "token");    // invalid term
    fails("group g: a\nnonsense line\n", "line 2");
    fails("group g: a\npredicate p: any of g\npredicate p: any of g\n", "duplicate");
}

TEST_CASE("validate_suite rejects cross-term variant collisions") {
    AnalysisSuite s;
    s.name = "x";
    s.groups.push_back({"g1", Band::Custom, {{"alpha", {"alpha", "shared"}}}});
    s.groups.push_back({"g2", Band::Custom, {{"beta", {"beta", "shared"}}}});
    s.predicates.push_back({"p", {"g1"}, PredicateMode::Any, 0});
    CHECK_THROWS_AS(validate_suite(s), ConfigError);
}

TEST_CASE("band name round trip") {
    CHECK(std::string(band_name(Band::Control)) == "control");
    CHECK(std::string(band_name(Band::A)) == "A");
    CHECK(std::string(band_name(Band::Custom)) == "custom");
}
