#include "markerscan/corpus.hpp"

#include <json.hpp>

#include "markerscan/errors.hpp"

namespace markerscan {

namespace {

constexpr std::size_t kBlockSize = 4u << 20;

using json = nlohmann::json;

std::string get_string(const json& obj, const char* key, int64_t line, bool required) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        if (required) {
            throw ParseError(std::string("missing field '") + key + "'", line);
        }
        return {};
    }
    if (!it->is_string()) {
        throw ParseError(std::string("field '") + key + "' is not a string", line);
    }
    return it->get<std::string>();
}

}  // namespace

DocType doc_type_from_string(std::string_view s) {
    if (s == "article") return DocType::Article;
    if (s == "preprint") return DocType::Preprint;
    if (s == "review") return DocType::Review;
    return DocType::Other;
}

const char* doc_type_name(DocType t) {
    switch (t) {
        case DocType::Article: return "article";
        case DocType::Preprint: return "preprint";
        case DocType::Review: return "review";
        case DocType::Other: return "other";
    }
    return "other";
}

Document parse_record(std::string_view line, int64_t line_number) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad record: ") + e.what(), line_number);
    }
    if (!obj.is_object()) {
        throw ParseError("record is not an object", line_number);
    }

    Document doc;
    doc.id = get_string(obj, "id", line_number, true);
    if (doc.id.empty()) {
        throw ValidationError("line " + std::to_string(line_number) + ": empty document id");
    }

    auto year_it = obj.find("year");
    if (year_it == obj.end() || !year_it->is_number_integer()) {
        throw ParseError("missing or non-integer 'year'", line_number);
    }
    doc.year = year_it->get<int>();
    if (doc.year < 1900 || doc.year > 2100) {
        throw ValidationError("line " + std::to_string(line_number) + ": year " +
                              std::to_string(doc.year) + " outside [1900, 2100]");
    }

    doc.type = doc_type_from_string(get_string(obj, "type", line_number, true));

    auto subj_it = obj.find("subjects");
    if (subj_it != obj.end()) {
        if (!subj_it->is_array()) {
            throw ParseError("'subjects' is not an array", line_number);
        }
        for (const auto& s : *subj_it) {
            if (!s.is_string()) {
                throw ParseError("'subjects' entry is not a string", line_number);
            }
            doc.subjects.push_back(s.get<std::string>());
        }
    }

    doc.title = get_string(obj, "title", line_number, false);
    doc.abstract = get_string(obj, "abstract", line_number, false);
    doc.body = get_string(obj, "body", line_number, false);
    if (doc.title.empty() && doc.abstract.empty() && doc.body.empty()) {
        throw ValidationError("line " + std::to_string(line_number) +
                              ": document has no text in any section");
    }
    return doc;
}

namespace {

void append_json_string(std::string& out, std::string_view s) {
    out.push_back('"');
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out.push_back(c);
                }
        }
    }
    out.push_back('"');
}

}  // namespace

void append_record(std::string& out, const Document& doc) {
    out += "{\"id\":";
    append_json_string(out, doc.id);
    out += ",\"year\":";
    out += std::to_string(doc.year);
    out += ",\"type\":\"";
    out += doc_type_name(doc.type);
    out += "\",\"subjects\":[";
    for (std::size_t i = 0; i < doc.subjects.size(); ++i) {
        if (i > 0) {
            out.push_back(',');
        }
        append_json_string(out, doc.subjects[i]);
    }
    out += "],\"title\":";
    append_json_string(out, doc.title);
    out += ",\"abstract\":";
    append_json_string(out, doc.abstract);
    if (!doc.body.empty()) {
        out += ",\"body\":";
        append_json_string(out, doc.body);
    }
    out.push_back('}');
}

LineReader::LineReader(const std::string& path) : in_(path, std::ios::binary) {
    if (!in_) {
        throw IoError("cannot open corpus file: " + path);
    }
    block_.reserve(kBlockSize);
}

bool LineReader::next_batch(std::vector<std::string>& out, std::size_t max_lines) {
    out.clear();
    while (out.size() < max_lines) {
        if (block_pos_ >= block_.size()) {
            if (eof_) {
                break;
            }
            block_.resize(kBlockSize);
            in_.read(block_.data(), static_cast<std::streamsize>(kBlockSize));
            std::size_t got = static_cast<std::size_t>(in_.gcount());
            block_.resize(got);
            block_pos_ = 0;
            if (got < kBlockSize) {
                if (in_.bad()) {
                    throw IoError("read failure on corpus file");
                }
                eof_ = true;
            }
            if (got == 0) {
                continue;
            }
        }
        std::size_t nl = block_.find('\n', block_pos_);
        if (nl == std::string::npos) {
            pending_.append(block_, block_pos_, block_.size() - block_pos_);
            block_pos_ = block_.size();
            continue;
        }
        ++line_number_;
        std::string& line = out.emplace_back();
        if (pending_.empty()) {
            line.assign(block_, block_pos_, nl - block_pos_);
        } else {
            pending_.append(block_, block_pos_, nl - block_pos_);
            line = std::move(pending_);
            pending_.clear();
        }
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        block_pos_ = nl + 1;
    }
    if (out.empty() && eof_ && block_pos_ >= block_.size() && !pending_.empty()) {
        // final line without a trailing LF
        ++line_number_;
        if (pending_.back() == '\r') {
            pending_.pop_back();
        }
        out.push_back(std::move(pending_));
        pending_.clear();
    }
    return !out.empty();
}

CorpusReader::CorpusReader(const std::string& path, CorpusOptions options)
    : lines_(path), options_(std::move(options)) {}

std::optional<Document> CorpusReader::next() {
    while (true) {
        if (batch_index_ >= batch_.size()) {
            batch_first_line_ = lines_.line_number() + 1;
            if (!lines_.next_batch(batch_, 1024)) {
                return std::nullopt;
            }
            batch_index_ = 0;
        }
        int64_t line_no = batch_first_line_ + static_cast<int64_t>(batch_index_);
        const std::string& line = batch_[batch_index_++];
        try {
            Document doc = parse_record(line, line_no);
            if (!seen_ids_.insert(doc.id).second) {
                throw ValidationError("line " + std::to_string(line_no) + ": duplicate id '" +
                                      doc.id + "'");
            }
            if (!options_.types.contains(doc.type)) {
                continue;
            }
            ++totals_[doc.year];
            return doc;
        } catch (const ParseError&) {
            if (options_.on_malformed == MalformedPolicy::Fail) {
                throw;
            }
            ++skipped_;
        } catch (const ValidationError&) {
            if (options_.on_malformed == MalformedPolicy::Fail) {
                throw;
            }
            ++skipped_;
        }
    }
}

}  // namespace markerscan
