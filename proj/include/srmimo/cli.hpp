#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace srmimo::cli
{

enum class Command
{
    GammaSweep,
    SinrVsM,
    PaprCompare,
    Efficiency,
    ValidateDe,
    DePoint,
};

std::optional<Command> parse_command(std::string_view name);
std::string_view to_string(Command command);
const std::vector<Command> &all_commands();

// Bad user input: unknown key, malformed value, invalid scenario. Exit code 2.
class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Resolved key = value parameters of one command, in a fixed order. Each
// command starts from its own defaults; only keys present there are accepted.
class Params
{
public:
    static Params defaults(Command command);

    Command command() const { return command_; }
    bool has(std::string_view key) const;
    // Throws ConfigError naming the key if the command does not use it.
    void set(std::string_view key, std::string value);
    // Applies "key=value" (surrounding blanks trimmed).
    void apply(std::string_view assignment);
    // Flat key=value file; blank lines and lines starting with '#' are skipped.
    void load_file(const std::string &path);

    const std::string &text(std::string_view key) const;
    double number(std::string_view key) const;
    std::uint64_t integer(std::string_view key) const;
    // Comma-separated items, each a number or an inclusive range start:step:stop.
    std::vector<double> numbers(std::string_view key) const;
    // Comma-separated raw items.
    std::vector<std::string> items(std::string_view key) const;

    const std::vector<std::pair<std::string, std::string>> &entries() const { return entries_; }

private:
    Command command_ = Command::DePoint;
    std::vector<std::pair<std::string, std::string>> entries_;
};

// Parses one numeric token (strict: trailing garbage is rejected).
double parse_number(std::string_view token, std::string_view key);
std::vector<double> parse_number_list(std::string_view text, std::string_view key);

using CsvCell = std::variant<double, long long, std::string>;

struct CsvTable
{
    std::vector<std::string> comments; // written as "# <line>"
    std::vector<std::string> header;
    std::vector<std::vector<CsvCell>> rows;
};

// RFC 4180 style; numbers with 9 significant digits.
void write_csv(std::ostream &out, const CsvTable &table);
std::string format_number(double value);

struct RunOptions
{
    unsigned workers = 0; // not part of the output: results do not depend on it
};

// Runs a command on resolved parameters. Throws ConfigError for invalid
// scenarios and srmimo::Error for numerical failures.
CsvTable run_command(const Params &params, const RunOptions &options = {});

// Command-line entry point; returns the process exit code
// (0 success, 2 configuration error, 3 numerical failure).
int main_entry(int argc, char **argv);

} // namespace srmimo::cli
