#include "kbh/scenario_config.hpp"

#include "kbh/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <string_view>

namespace kbh {

namespace {

struct RawValue {
    std::vector<std::string> items;
    std::size_t line = 0;
    std::size_t column = 0;
};

// Grid axes in expansion order, outermost first.
const std::vector<std::string>& axis_keys() {
    static const std::vector<std::string> keys = {
        "n", "d", "k", "amplitude", "alpha", "eta", "rho", "tau2", "lambda",
        "s_margin", "reps", "placement", "grid_size", "grid_ratio"};
    return keys;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string unquote(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
        s = s.substr(1, s.size() - 2);
    return std::string(s);
}

std::vector<std::string> split_list(std::string_view body) {
    std::vector<std::string> out;
    std::size_t start = 0;
    bool quoted = false;
    for (std::size_t i = 0; i <= body.size(); ++i) {
        if (i < body.size() && body[i] == '"') quoted = !quoted;
        if (i == body.size() || (body[i] == ',' && !quoted)) {
            auto item = trim(body.substr(start, i - start));
            if (!item.empty()) out.push_back(unquote(item));
            start = i + 1;
        }
    }
    return out;
}

double to_double(const std::string& text, const RawValue& raw, const std::string& key) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto res = std::from_chars(first, last, v);
    if (text.empty() || res.ec != std::errc() || res.ptr != last || !std::isfinite(v))
        throw ParseError("'" + key + "' expects a number, got '" + text + "'", raw.line, raw.column);
    return v;
}

long long to_integer(const std::string& text, const RawValue& raw, const std::string& key) {
    const double v = to_double(text, raw, key);
    if (v != std::floor(v)) throw ParseError("'" + key + "' expects an integer, got '" + text + "'", raw.line, raw.column);
    return static_cast<long long>(v);
}

void apply(ScenarioConfig& c, const std::string& key, const std::string& text, const RawValue& raw) {
    if (key == "n") c.n = to_integer(text, raw, key);
    else if (key == "d") c.d = to_integer(text, raw, key);
    else if (key == "k") c.k = to_integer(text, raw, key);
    else if (key == "amplitude") c.amplitude = to_double(text, raw, key);
    else if (key == "alpha") c.alpha = to_double(text, raw, key);
    else if (key == "eta") c.eta = to_double(text, raw, key);
    else if (key == "rho") c.rho = to_double(text, raw, key);
    else if (key == "tau2") c.tau2_known = to_double(text, raw, key);
    else if (key == "lambda") c.lambda = to_double(text, raw, key);
    else if (key == "s_margin") c.s_margin = to_double(text, raw, key);
    else if (key == "reps") c.reps = static_cast<int>(to_integer(text, raw, key));
    else if (key == "grid_size") c.lasso.grid_size = static_cast<int>(to_integer(text, raw, key));
    else if (key == "grid_ratio") c.lasso.grid_ratio = to_double(text, raw, key);
    else if (key == "placement") {
        if (text == "first") c.placement = SignalPlacement::First;
        else if (text == "random") c.placement = SignalPlacement::Random;
        else throw ParseError("placement must be \"first\" or \"random\"", raw.line, raw.column);
    }
}

}  // namespace

std::vector<ScenarioConfig> parse_scenario_grid(std::istream& in, std::uint64_t seed) {
    std::map<std::string, RawValue> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        bool quoted = false;
        for (std::size_t i = 0; i < view.size(); ++i) {
            if (view[i] == '"') quoted = !quoted;
            if (view[i] == '#' && !quoted) {
                view = view.substr(0, i);
                break;
            }
        }
        view = trim(view);
        if (view.empty()) continue;
        if (view.front() == '[' && view.back() == ']')
            throw ParseError("tables are not supported; use flat key = value lines", line_no, 1);
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no, 1);
        const std::string key(trim(view.substr(0, eq)));
        auto rhs = trim(view.substr(eq + 1));
        const std::size_t column = static_cast<std::size_t>(rhs.data() - line.data()) + 1;

        const bool known = key == "methods" ||
                           std::find(axis_keys().begin(), axis_keys().end(), key) != axis_keys().end();
        if (key == "seed") throw ParseError("'seed' is set with --seed on the command line", line_no, 1);
        if (!known) throw ParseError("unknown key '" + key + "'", line_no, 1);
        if (values.count(key)) throw ParseError("duplicate key '" + key + "'", line_no, 1);
        if (rhs.empty()) throw ParseError("missing value for '" + key + "'", line_no, column);

        RawValue raw{{}, line_no, column};
        if (rhs.front() == '[') {
            if (rhs.back() != ']') throw ParseError("unterminated list", line_no, column);
            raw.items = split_list(rhs.substr(1, rhs.size() - 2));
            if (raw.items.empty()) throw ParseError("empty list for '" + key + "'", line_no, column);
        } else {
            raw.items.push_back(unquote(rhs));
        }
        values.emplace(key, std::move(raw));
    }

    ScenarioConfig base;
    base.seed = seed;
    if (auto it = values.find("methods"); it != values.end()) {
        base.methods.clear();
        for (const auto& token : it->second.items) {
            auto p = parse_procedure(token);
            if (!p) throw ParseError("unknown method '" + token + "'", it->second.line, it->second.column);
            if (std::find(base.methods.begin(), base.methods.end(), *p) == base.methods.end())
                base.methods.push_back(*p);
        }
    }

    std::vector<ScenarioConfig> grid = {base};
    for (const auto& key : axis_keys()) {
        auto it = values.find(key);
        if (it == values.end()) continue;
        std::vector<ScenarioConfig> next;
        next.reserve(grid.size() * it->second.items.size());
        for (const auto& cfg : grid) {
            for (const auto& item : it->second.items) {
                ScenarioConfig c = cfg;
                apply(c, key, item, it->second);
                next.push_back(std::move(c));
            }
        }
        grid = std::move(next);
    }
    for (const auto& c : grid) validate(c);
    return grid;
}

std::vector<ScenarioConfig> read_scenario_grid(const std::string& path, std::uint64_t seed) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return parse_scenario_grid(in, seed);
}

}  // namespace kbh
