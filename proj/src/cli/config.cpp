#include "srmimo/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

namespace srmimo::cli
{

namespace
{

// 1/sigma2 = 12 dB
constexpr const char *sigma2_12db = "0.0630957344480193";

struct CommandInfo
{
    Command command;
    std::string_view name;
};

constexpr CommandInfo command_table[] = {
    {Command::GammaSweep, "gamma-sweep"}, {Command::SinrVsM, "sinr-vs-m"},     {Command::PaprCompare, "papr-compare"},
    {Command::Efficiency, "efficiency"},  {Command::ValidateDe, "validate-de"}, {Command::DePoint, "de-point"},
};

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view text)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true)
    {
        const auto comma = text.find(',', start);
        out.push_back(trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}

} // namespace

std::optional<Command> parse_command(std::string_view name)
{
    for (const auto &info : command_table)
        if (info.name == name)
            return info.command;
    return std::nullopt;
}

std::string_view to_string(Command command)
{
    for (const auto &info : command_table)
        if (info.command == command)
            return info.name;
    return "?";
}

const std::vector<Command> &all_commands()
{
    static const std::vector<Command> commands = [] {
        std::vector<Command> v;
        for (const auto &info : command_table)
            v.push_back(info.command);
        return v;
    }();
    return commands;
}

Params Params::defaults(Command command)
{
    Params p;
    p.command_ = command;
    auto &e = p.entries_;
    switch (command)
    {
    case Command::GammaSweep:
        e = {{"m", "80"},        {"k", "40"},         {"pa", "1"},      {"sigma2", sigma2_12db},
             {"eta_a", "1"},     {"corr", "identity"}, {"trials", "1000"}, {"seed", "1"},
             {"norm_axis", "0.1:0.1:2"}};
        break;
    case Command::SinrVsM:
        e = {{"k", "40"},       {"pa", "1"},    {"sigma2", sigma2_12db}, {"corr", "identity"},
             {"trials", "1000"}, {"seed", "1"}, {"m_list", "80:5:120"}, {"series", "opt,2,1.5"}};
        break;
    case Command::PaprCompare:
        e = {{"k", "10"},       {"pa", "1"},    {"sigma2", "1"},          {"corr", "exp:0.1,0"},
             {"trials", "1000"}, {"seed", "1"}, {"m_list", "60:10:120"}, {"gamma", "opt"}};
        break;
    case Command::Efficiency:
        e = {{"m", "80"},      {"k", "40"},         {"pa", "1"},          {"eta_a", "1"},
             {"corr", "identity"}, {"trials", "10000"}, {"seed", "1"},    {"gamma_list", "0.5:0.1:2"},
             {"y_points", "2048"}, {"z_points", "2048"}};
        break;
    case Command::ValidateDe:
        e = {{"pa", "1"},       {"sigma2", "1"}, {"corr", "identity"},  {"trials", "500"},
             {"seed", "1"},     {"m_list", "64,128,256"}, {"k_ratio", "0.5"}, {"gamma", "opt"}};
        break;
    case Command::DePoint:
        e = {{"m", "80"}, {"k", "40"}, {"pa", "1"}, {"sigma2", "1"}, {"gamma", "opt"}, {"corr", "identity"}};
        break;
    }
    return p;
}

bool Params::has(std::string_view key) const
{
    return std::any_of(entries_.begin(), entries_.end(), [&](const auto &kv) { return kv.first == key; });
}

void Params::set(std::string_view key, std::string value)
{
    for (auto &kv : entries_)
        if (kv.first == key)
        {
            kv.second = std::move(value);
            return;
        }
    throw ConfigError("unknown key '" + std::string(key) + "' for command " + std::string(to_string(command_)));
}

void Params::apply(std::string_view assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos)
        throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
    const auto key = trim(assignment.substr(0, eq));
    if (key.empty())
        throw ConfigError("empty key in '" + std::string(assignment) + "'");
    set(key, std::string(trim(assignment.substr(eq + 1))));
}

void Params::load_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::string line;
    int number = 0;
    while (std::getline(in, line))
    {
        ++number;
        const auto body = trim(line);
        if (body.empty() || body.front() == '#')
            continue;
        try
        {
            apply(body);
        }
        catch (const ConfigError &e)
        {
            throw ConfigError(path + ":" + std::to_string(number) + ": " + e.what());
        }
    }
}

const std::string &Params::text(std::string_view key) const
{
    for (const auto &kv : entries_)
        if (kv.first == key)
            return kv.second;
    throw ConfigError("unknown key '" + std::string(key) + "' for command " + std::string(to_string(command_)));
}

double Params::number(std::string_view key) const
{
    return parse_number(text(key), key);
}

std::uint64_t Params::integer(std::string_view key) const
{
    const std::string &t = text(key);
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw ConfigError("key '" + std::string(key) + "': expected a nonnegative integer, got '" + t + "'");
    return value;
}

std::vector<double> Params::numbers(std::string_view key) const
{
    return parse_number_list(text(key), key);
}

std::vector<std::string> Params::items(std::string_view key) const
{
    std::vector<std::string> out;
    if (trim(text(key)).empty())
        return out;
    for (auto item : split_commas(text(key)))
    {
        if (item.empty())
            throw ConfigError("key '" + std::string(key) + "': empty list item");
        out.emplace_back(item);
    }
    return out;
}

double parse_number(std::string_view token, std::string_view key)
{
    token = trim(token);
    if (!token.empty() && token.front() == '+')
        token.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(value))
        throw ConfigError("key '" + std::string(key) + "': cannot parse number '" + std::string(token) + "'");
    return value;
}

std::vector<double> parse_number_list(std::string_view text, std::string_view key)
{
    std::vector<double> out;
    if (trim(text).empty())
        return out;
    for (auto item : split_commas(text))
    {
        const auto c1 = item.find(':');
        if (c1 == std::string_view::npos)
        {
            out.push_back(parse_number(item, key));
            continue;
        }
        const auto c2 = item.find(':', c1 + 1);
        if (c2 == std::string_view::npos)
            throw ConfigError("key '" + std::string(key) + "': range must be start:step:stop, got '" +
                              std::string(item) + "'");
        const double start = parse_number(item.substr(0, c1), key);
        const double step = parse_number(item.substr(c1 + 1, c2 - c1 - 1), key);
        const double stop = parse_number(item.substr(c2 + 1), key);
        if (!(step > 0.0) || stop < start)
            throw ConfigError("key '" + std::string(key) + "': range needs step > 0 and stop >= start");
        const auto count = std::size_t(std::floor((stop - start) / step + 1e-9)) + 1;
        if (count > 1000000)
            throw ConfigError("key '" + std::string(key) + "': range has too many points");
        for (std::size_t i = 0; i < count; ++i)
        {
            // round away the accumulation noise of start + i * step
            const double v = start + double(i) * step;
            out.push_back(std::stod(format_number(v)));
        }
    }
    return out;
}

} // namespace srmimo::cli
