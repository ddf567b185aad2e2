#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace markerscan {

// year x predicate matched-document counts plus per-year totals.
// Predicate order follows the suite; years iterate ascending.
struct CountsTable {
    struct Row {
        int64_t total = 0;
        std::vector<int64_t> matched;
    };

    std::vector<std::string> predicates;
    std::map<int, Row> years;

    Row& row(int year);
    const Row* find_row(int year) const;
    int predicate_index(std::string_view name) const;  // -1 when absent
    int64_t matched_at(int year, std::string_view predicate) const;
    int64_t total_at(int year) const;
    bool empty() const { return years.empty(); }

    // Adds another table with the same predicate list (cell-wise sums).
    void merge(const CountsTable& other);
};

void write_counts_csv(std::ostream& out, const CountsTable& table);
std::string counts_csv(const CountsTable& table);

// Parses and validates a counts CSV: header `year,total,<predicates>`,
// integer cells, 0 <= matched <= total, unique years. Throws ParseError.
CountsTable read_counts_csv(std::istream& in);
CountsTable read_counts_csv_file(const std::string& path);

}  // namespace markerscan
