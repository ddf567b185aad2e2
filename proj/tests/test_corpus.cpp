#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "markerscan/corpus.hpp"
#include "markerscan/errors.hpp"

using namespace markerscan;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& contents) {
        static int counter = 0;
        path = "corpus_test_" + std::to_string(counter++) + ".jsonl";
        std::ofstream out(path, std::ios::binary);
        out << contents;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

std::string record(const std::string& id, int year, const std::string& type,
                   const std::string& body) {
    return "{\"id\":\"" + id + "\",\"year\":" + std::to_string(year) + ",\"type\":\"" + type +
           "\",\"subjects\":[],\"title\":\"t\",\"abstract\":\"a\",\"body\":\"" + body + "\"}";
}

}  // namespace

TEST_CASE("parse_record maps fields") {
    Document d = parse_record(
        R"({"id":"d1","year":2023,"type":"article","subjects":["09"],"title":"T","abstract":"A","body":"B"})");
    CHECK(d.id == "d1");
    CHECK(d.year == 2023);
    CHECK(d.type == DocType::Article);
    CHECK(d.subjects == std::vector<std::string>{"09"});
    CHECK(d.title == "T");
    CHECK(d.abstract == "A");
    CHECK(d.body == "B");
}

TEST_CASE("parse_record defaults and validation") {
    SUBCASE("missing body maps to empty") {
        Document d = parse_record(R"({"id":"x","year":2020,"type":"article","title":"T"})");
        CHECK(d.body.empty());
        CHECK(d.abstract.empty());
    }
    SUBCASE("unknown type maps to other") {
        Document d = parse_record(R"({"id":"x","year":2020,"type":"editorial","title":"T"})");
        CHECK(d.type == DocType::Other);
    }
    SUBCASE("year range") {
        CHECK_THROWS_AS(parse_record(R"({"id":"x","year":1850,"type":"article","title":"T"})"),
                        ValidationError);
        CHECK_THROWS_AS(parse_record(R"({"id":"x","year":2101,"type":"article","title":"T"})"),
                        ValidationError);
        CHECK_NOTHROW(parse_record(R"({"id":"x","year":1900,"type":"article","title":"T"})"));
    }
    SUBCASE("empty id rejected") {
        CHECK_THROWS_AS(parse_record(R"({"id":"","year":2020,"type":"article","title":"T"})"),
                        ValidationError);
    }
    SUBCASE("all sections empty rejected") {
        CHECK_THROWS_AS(parse_record(R"({"id":"x","year":2020,"type":"article"})"),
                        ValidationError);
    }
    SUBCASE("malformed JSON carries the line number") {
        try {
            parse_record("{not json", 37);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line_number == 37);
            CHECK(std::string(e.what()).find("37") != std::string::npos);
        }
    }
    SUBCASE("wrong field type is a parse error") {
        CHECK_THROWS_AS(parse_record(R"({"id":"x","year":"2020","type":"article","title":"T"})"),
                        ParseError);
    }
}

TEST_CASE("append_record round-trips through parse_record") {
    Document d;
    d.id = "weird \"id\" \\ with\ttabs";
    d.year = 2024;
    d.type = DocType::Review;
    d.subjects = {"09", "13"};
    d.title = "Title with é and 漢字";
    d.abstract = "line\nbreak";
    d.body = "";

    std::string line;
    append_record(line, d);
    CHECK(line.find('\n') == std::string::npos);  // one record per line

    Document back = parse_record(line);
    CHECK(back.id == d.id);
    CHECK(back.year == d.year);
    CHECK(back.type == d.type);
    CHECK(back.subjects == d.subjects);
    CHECK(back.title == d.title);
    CHECK(back.abstract == d.abstract);
    CHECK(back.body == d.body);
}

TEST_CASE("LineReader handles last-line and CRLF cases") {
    auto read_all = [](const std::string& path) {
        LineReader r(path);
        std::vector<std::string> all, batch;
        while (r.next_batch(batch, 10)) all.insert(all.end(), batch.begin(), batch.end());
        return all;
    };
    SUBCASE("no trailing newline") {
        TempFile f("one\ntwo");
        CHECK(read_all(f.path) == std::vector<std::string>{"one", "two"});
    }
    SUBCASE("CRLF endings are stripped") {
        TempFile f("one\r\ntwo\r\n");
        CHECK(read_all(f.path) == std::vector<std::string>{"one", "two"});
    }
    SUBCASE("CRLF on an unterminated last line") {
        TempFile f("one\r\ntwo\r");
        CHECK(read_all(f.path) == std::vector<std::string>{"one", "two"});
    }
    SUBCASE("line numbers track the file") {
        TempFile f("a\nb\nc\n");
        LineReader r(f.path);
        std::vector<std::string> lines;
        r.next_batch(lines, 2);
        CHECK(r.line_number() == 2);
        r.next_batch(lines, 2);
        CHECK(r.line_number() == 3);
    }
    SUBCASE("missing file throws IoError") { CHECK_THROWS_AS(LineReader("no_such_file"), IoError); }
}

TEST_CASE("CorpusReader filters types and counts totals") {
    TempFile f(record("a", 2023, "article", "x") + "\n" + record("b", 2023, "article", "x") +
               "\n" + record("c", 2024, "article", "x") + "\n" + record("d", 2023, "preprint", "x") +
               "\n");

    SUBCASE("default filter keeps articles") {
        CorpusReader reader(f.path);
        int n = 0;
        while (reader.next()) ++n;
        CHECK(n == 3);
        CHECK(reader.totals() == YearTotals{{2023, 2}, {2024, 1}});
        CHECK(reader.skipped() == 0);
    }
    SUBCASE("wider filter") {
        CorpusReader reader(f.path, {.types = {DocType::Article, DocType::Preprint}});
        int n = 0;
        int64_t sum = 0;
        while (reader.next()) ++n;
        CHECK(reader.totals() == YearTotals{{2023, 3}, {2024, 1}});
        for (const auto& [y, c] : reader.totals()) sum += c;
        CHECK(sum == n);  // totals count exactly the yielded documents
    }
}

TEST_CASE("CorpusReader error policies") {
    std::string good = record("a", 2023, "article", "x");
    std::string dup = record("a", 2024, "article", "y");
    std::string bad = "{broken";

    SUBCASE("fail-fast on malformed line reports the line number") {
        TempFile f(good + "\n" + bad + "\n");
        CorpusReader reader(f.path);
        CHECK(reader.next().has_value());
        try {
            reader.next();
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line_number == 2);
        }
    }
    SUBCASE("duplicate id is a validation error") {
        TempFile f(good + "\n" + dup + "\n");
        CorpusReader reader(f.path);
        CHECK(reader.next().has_value());
        CHECK_THROWS_AS(reader.next(), ValidationError);
    }
    SUBCASE("skip policy counts both kinds") {
        TempFile f(good + "\n" + bad + "\n" + dup + "\n" + record("z", 2025, "article", "x") +
                   "\n");
        CorpusReader reader(f.path, {.on_malformed = MalformedPolicy::Skip});
        int n = 0;
        while (reader.next()) ++n;
        CHECK(n == 2);
        CHECK(reader.skipped() == 2);
        CHECK(reader.totals() == YearTotals{{2023, 1}, {2025, 1}});
    }
    SUBCASE("empty file yields nothing") {
        TempFile f("");
        CorpusReader reader(f.path);
        CHECK_FALSE(reader.next().has_value());
        CHECK(reader.totals().empty());
    }
    SUBCASE("two reads of one file yield identical sequences") {
        TempFile f(good + "\n" + record("b", 2024, "article", "y") + "\n");
        auto drain = [&] {
            std::vector<std::string> ids;
            CorpusReader reader(f.path);
            while (auto d = reader.next()) ids.push_back(d->id);
            return ids;
        };
        CHECK(drain() == drain());
    }
}

TEST_CASE("doc type names") {
    CHECK(doc_type_from_string("article") == DocType::Article);
    CHECK(doc_type_from_string("preprint") == DocType::Preprint);
    CHECK(doc_type_from_string("review") == DocType::Review);
    CHECK(doc_type_from_string("anything-else") == DocType::Other);
    CHECK(std::string(doc_type_name(DocType::Article)) == "article");
    CHECK(std::string(doc_type_name(DocType::Other)) == "other");
}
