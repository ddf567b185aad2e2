#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace markerscan {

enum class DocType { Article, Preprint, Review, Other };

DocType doc_type_from_string(std::string_view s);  // unknown strings map to Other
const char* doc_type_name(DocType t);

// Which document sections a scan reads.
enum class SectionScope { TitleAbstract, FullText };

struct Document {
    std::string id;
    int year = 0;
    DocType type = DocType::Other;
    std::vector<std::string> subjects;
    std::string title;
    std::string abstract;
    std::string body;
};

// year -> document count, after doc-type filtering.
using YearTotals = std::map<int, int64_t>;

// Parses one corpus record (a single-line JSON object). Missing body maps
// to empty text; unknown type strings map to Other. Throws ParseError for
// malformed JSON / wrong field types and ValidationError for invariant
// violations (year outside [1900, 2100], empty id, no text at all).
Document parse_record(std::string_view line, int64_t line_number = 0);

// Serializes a document as one corpus line (no trailing newline).
void append_record(std::string& out, const Document& doc);

// Reads a file in fixed-size blocks and yields complete lines. Lines are
// views into the internal buffer, valid until the next fill().
class LineReader {
public:
    explicit LineReader(const std::string& path);

    // Appends up to max_lines complete lines (without the trailing LF) to
    // out. Returns false when the file is exhausted and no line was read.
    bool next_batch(std::vector<std::string>& out, std::size_t max_lines);

    int64_t line_number() const { return line_number_; }  // of the last yielded line

private:
    std::ifstream in_;
    std::string pending_;
    std::string block_;
    std::size_t block_pos_ = 0;
    bool eof_ = false;
    int64_t line_number_ = 0;
};

enum class MalformedPolicy { Fail, Skip };

struct CorpusOptions {
    std::set<DocType> types = {DocType::Article};
    MalformedPolicy on_malformed = MalformedPolicy::Fail;
};

// Streams validated documents from a corpus file, applying the doc-type
// filter and tracking per-year totals of the yielded documents. Duplicate
// ids are treated like malformed records (fail or skip per policy).
class CorpusReader {
public:
    CorpusReader(const std::string& path, CorpusOptions options = {});

    // Returns the next document passing the filter, or nullopt at EOF.
    std::optional<Document> next();

    const YearTotals& totals() const { return totals_; }
    int64_t skipped() const { return skipped_; }

private:
    LineReader lines_;
    CorpusOptions options_;
    std::vector<std::string> batch_;
    std::size_t batch_index_ = 0;
    int64_t batch_first_line_ = 0;
    YearTotals totals_;
    int64_t skipped_ = 0;
    std::unordered_set<std::string> seen_ids_;
};

}  // namespace markerscan
