#include "srmimo/cli.hpp"

#include <cmath>
#include <cstdio>

namespace srmimo::cli
{

namespace
{

std::string quote_if_needed(const std::string &s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char ch : s)
    {
        if (ch == '"')
            out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

struct CellWriter
{
    std::string operator()(double v) const { return format_number(v); }
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(const std::string &s) const { return quote_if_needed(s); }
};

} // namespace

std::string format_number(double value)
{
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

void write_csv(std::ostream &out, const CsvTable &table)
{
    for (const auto &line : table.comments)
        out << "# " << line << "\n";
    for (std::size_t i = 0; i < table.header.size(); ++i)
        out << (i ? "," : "") << quote_if_needed(table.header[i]);
    out << "\n";
    for (const auto &row : table.rows)
    {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << std::visit(CellWriter{}, row[i]);
        out << "\n";
    }
}

} // namespace srmimo::cli
