#pragma once

#include "kbh/knockoff.hpp"
#include "kbh/types.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace kbh {

// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double v);

struct NumericTable {
    std::vector<std::string> header;
    Matrix values;  // rows x header.size()
};

// Comma-separated, header row first, numeric body. Double-quoted header fields
// are accepted. Errors carry the 1-based line and column.
NumericTable parse_csv(std::istream& in);
NumericTable read_csv(const std::string& path);

// Splits the response column off a table; all remaining columns form the design.
DesignProblem design_from_table(const NumericTable& table, std::string_view response);

void write_csv(std::ostream& out, const std::vector<std::string>& header, const Matrix& values);

// Dataset layout: design columns followed by the response column.
void write_dataset(std::ostream& out, const DesignProblem& problem, std::string_view response = "y");

}  // namespace kbh
