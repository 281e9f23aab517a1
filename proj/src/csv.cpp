#include "kbh/csv.hpp"

#include "kbh/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <system_error>

namespace kbh {

namespace {

std::vector<std::string> split_fields(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current += c;
        }
    }
    if (quoted) throw ParseError("unterminated quoted field", line_no, line.size());
    fields.push_back(std::move(current));
    return fields;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

NumericTable parse_csv(std::istream& in) {
    NumericTable table;
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::vector<double>> rows;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;
        auto fields = split_fields(line, line_no);
        if (table.header.empty()) {
            for (auto& f : fields) {
                const auto name = trim(f);
                if (name.empty()) throw ParseError("empty column name", line_no);
                table.header.emplace_back(name);
            }
            continue;
        }
        if (fields.size() != table.header.size())
            throw ParseError("expected " + std::to_string(table.header.size()) + " fields, found " +
                                 std::to_string(fields.size()),
                             line_no);
        std::vector<double> row(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const auto text = trim(fields[c]);
            const char* first = text.data();
            const char* last = text.data() + text.size();
            if (!text.empty() && *first == '+') ++first;
            const auto res = std::from_chars(first, last, row[c]);
            if (text.empty() || res.ec != std::errc() || res.ptr != last)
                throw ParseError("invalid number '" + std::string(text) + "'", line_no, c + 1);
            if (!std::isfinite(row[c]))
                throw ParseError("non-finite value '" + std::string(text) + "'", line_no, c + 1);
        }
        rows.push_back(std::move(row));
    }
    if (table.header.empty()) throw ParseError("input is empty (no header row)");

    table.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(table.header.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) table.values(r, c) = rows[r][c];
    return table;
}

NumericTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return parse_csv(in);
}

DesignProblem design_from_table(const NumericTable& table, std::string_view response) {
    Index response_col = -1;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (table.header[c] == response) {
            if (response_col >= 0) throw ParseError("response column '" + std::string(response) + "' appears twice", 1);
            response_col = static_cast<Index>(c);
        }
    }
    if (response_col < 0) throw ParseError("response column '" + std::string(response) + "' not found", 1);

    DesignProblem problem;
    const Index rows = table.values.rows();
    const Index cols = static_cast<Index>(table.header.size());
    problem.y = table.values.col(response_col);
    problem.x.resize(rows, cols - 1);
    for (Index c = 0, j = 0; c < cols; ++c) {
        if (c == response_col) continue;
        problem.x.col(j++) = table.values.col(c);
        problem.names.push_back(table.header[c]);
    }
    return problem;
}

void write_csv(std::ostream& out, const std::vector<std::string>& header, const Matrix& values) {
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << '\n';
    for (Index r = 0; r < values.rows(); ++r) {
        for (Index c = 0; c < values.cols(); ++c) out << (c ? "," : "") << format_double(values(r, c));
        out << '\n';
    }
}

void write_dataset(std::ostream& out, const DesignProblem& problem, std::string_view response) {
    std::vector<std::string> header = problem.names;
    for (Index j = static_cast<Index>(header.size()); j < problem.d(); ++j)
        header.push_back("x" + std::to_string(j + 1));
    header.emplace_back(response);
    Matrix values(problem.n(), problem.d() + 1);
    values << problem.x, problem.y;
    write_csv(out, header, values);
}

}  // namespace kbh
