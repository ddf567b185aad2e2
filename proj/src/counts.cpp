#include "markerscan/counts.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "markerscan/errors.hpp"

namespace markerscan {

CountsTable::Row& CountsTable::row(int year) {
    auto [it, inserted] = years.try_emplace(year);
    if (inserted) it->second.matched.assign(predicates.size(), 0);
    return it->second;
}

const CountsTable::Row* CountsTable::find_row(int year) const {
    auto it = years.find(year);
    return it == years.end() ? nullptr : &it->second;
}

int CountsTable::predicate_index(std::string_view name) const {
    for (std::size_t i = 0; i < predicates.size(); ++i)
        if (predicates[i] == name) return static_cast<int>(i);
    return -1;
}

int64_t CountsTable::matched_at(int year, std::string_view predicate) const {
    const Row* r = find_row(year);
    int idx = predicate_index(predicate);
    if (!r || idx < 0) return 0;
    return r->matched[static_cast<std::size_t>(idx)];
}

int64_t CountsTable::total_at(int year) const {
    const Row* r = find_row(year);
    return r ? r->total : 0;
}

void CountsTable::merge(const CountsTable& other) {
    if (predicates.empty() && years.empty()) predicates = other.predicates;
    if (predicates != other.predicates)
        throw ValidationError("cannot merge counts tables with different predicate lists");
    for (const auto& [year, src] : other.years) {
        Row& dst = row(year);
        dst.total += src.total;
        for (std::size_t i = 0; i < dst.matched.size(); ++i) dst.matched[i] += src.matched[i];
    }
}

void write_counts_csv(std::ostream& out, const CountsTable& table) {
    out << "year,total";
    for (const auto& p : table.predicates) out << ',' << p;
    out << '\n';
    for (const auto& [year, row] : table.years) {
        out << year << ',' << row.total;
        for (int64_t m : row.matched) out << ',' << m;
        out << '\n';
    }
}

std::string counts_csv(const CountsTable& table) {
    std::ostringstream os;
    write_counts_csv(os, table);
    return os.str();
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

int64_t parse_int_field(std::string_view field, std::size_t line_no, const char* what) {
    int64_t value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw ParseError(std::string("expected integer ") + what + ", got '" + std::string(field) + "'",
                         line_no);
    return value;
}

}  // namespace

CountsTable read_counts_csv(std::istream& in) {
    CountsTable table;
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw ParseError("empty counts file", 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = split_fields(line);
    if (header.size() < 3 || header[0] != "year" || header[1] != "total")
        throw ParseError("counts header must start with 'year,total' and list at least one predicate",
                         line_no);
    for (std::size_t i = 2; i < header.size(); ++i) {
        if (header[i].empty()) throw ParseError("empty predicate name in header", line_no);
        table.predicates.emplace_back(header[i]);
    }

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_fields(line);
        if (fields.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                                 std::to_string(fields.size()),
                             line_no);
        int64_t year64 = parse_int_field(fields[0], line_no, "year");
        int year = static_cast<int>(year64);
        if (year64 != year) throw ParseError("year out of range", line_no);
        if (table.years.count(year)) throw ParseError("duplicate year " + std::to_string(year), line_no);
        CountsTable::Row& row = table.row(year);
        row.total = parse_int_field(fields[1], line_no, "total");
        if (row.total < 0) throw ParseError("negative total", line_no);
        for (std::size_t i = 2; i < fields.size(); ++i) {
            int64_t m = parse_int_field(fields[i], line_no, "count");
            if (m < 0) throw ParseError("negative count", line_no);
            if (m > row.total)
                throw ParseError("count for '" + table.predicates[i - 2] + "' exceeds total", line_no);
            row.matched[i - 2] = m;
        }
    }
    if (table.years.empty()) throw ParseError("counts file has no data rows", line_no ? line_no : 1);
    return table;
}

CountsTable read_counts_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open counts file: " + path);
    return read_counts_csv(in);
}

}  // namespace markerscan
