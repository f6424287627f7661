#include "chainrisk/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "chainrisk/error.hpp"

namespace chainrisk {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.emplace_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

std::vector<std::string> tokens(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == ',') {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::optional<double> to_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

std::optional<long long> to_integer(std::string_view s) {
    s = trim(s);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

struct Entry {
    std::string value;
    int line;
};

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    RunConfig run();

private:
    [[noreturn]] void fail(const std::string& what, int line) const { throw ParseError(what, line); }

    double number(const std::string& key, const Entry& e) const {
        const auto v = to_double(e.value);
        if (!v) fail(key + ": expected a number, got '" + e.value + "'", e.line);
        return *v;
    }
    double positive(const std::string& key, const Entry& e) const {
        const double v = number(key, e);
        if (!(v > 0.0)) fail(key + ": must be positive, got " + e.value, e.line);
        return v;
    }
    long long integer(const std::string& key, const Entry& e, long long min) const {
        const auto v = to_integer(e.value);
        if (!v) fail(key + ": expected an integer, got '" + e.value + "'", e.line);
        if (*v < min) fail(key + ": must be at least " + std::to_string(min), e.line);
        return *v;
    }
    Distribution law(const std::string& key, const Entry& e) const {
        try {
            return parse_distribution(e.value);
        } catch (const ParseError& err) {
            fail(key + ": " + err.what(), e.line);
        }
    }
    std::pair<int, int> int_range(const std::string& key, const Entry& e) const;
    std::vector<double> time_grid(const std::string& key, const Entry& e) const;
    RateExpr rate(const std::string& key, const Entry& e) const;

    std::string_view text_;
    // section -> key -> entries (repeatable keys keep all occurrences)
    std::map<std::string, std::map<std::string, std::vector<Entry>>> sections_;
    std::map<std::string, int> section_line_;
};

std::pair<int, int> Parser::int_range(const std::string& key, const Entry& e) const {
    const auto dots = e.value.find("..");
    std::string lo = e.value;
    std::string hi = e.value;
    if (dots != std::string::npos) {
        lo = e.value.substr(0, dots);
        hi = e.value.substr(dots + 2);
    }
    const auto a = to_integer(lo);
    const auto b = to_integer(hi);
    if (!a || !b) fail(key + ": expected a range like 1..12, got '" + e.value + "'", e.line);
    if (*a < 1 || *b < *a) fail(key + ": range must satisfy 1 <= lo <= hi", e.line);
    return {static_cast<int>(*a), static_cast<int>(*b)};
}

std::vector<double> Parser::time_grid(const std::string& key, const Entry& e) const {
    std::vector<double> grid;
    if (e.value.find(':') != std::string::npos) {
        const auto parts = split(e.value, ':');
        if (parts.size() != 3) fail(key + ": expected start:stop:step", e.line);
        const auto start = to_double(parts[0]);
        const auto stop = to_double(parts[1]);
        const auto step = to_double(parts[2]);
        if (!start || !stop || !step || !(*step > 0.0) || *stop < *start) {
            fail(key + ": expected start:stop:step with step > 0 and stop >= start", e.line);
        }
        const auto count = static_cast<std::size_t>(std::floor((*stop - *start) / *step + 1e-9));
        for (std::size_t i = 0; i <= count; ++i) grid.push_back(*start + *step * static_cast<double>(i));
    } else {
        for (const auto& part : split(e.value, ',')) {
            const auto v = to_double(part);
            if (!v) fail(key + ": expected a number, got '" + part + "'", e.line);
            grid.push_back(*v);
        }
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < 0.0) fail(key + ": times must be nonnegative", e.line);
        if (i > 0 && grid[i] < grid[i - 1]) fail(key + ": times must be ascending", e.line);
    }
    if (grid.empty()) fail(key + ": empty time grid", e.line);
    return grid;
}

RateExpr Parser::rate(const std::string& key, const Entry& e) const {
    const auto parts = split(e.value, ',');
    if (parts.empty() || parts.size() > 3) fail(key + ": expected 'a, b, c'", e.line);
    RateExpr r;
    double* fields[] = {&r.a, &r.b, &r.c};
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const auto v = to_double(parts[i]);
        if (!v) fail(key + ": expected a number, got '" + parts[i] + "'", e.line);
        *fields[i] = *v;
    }
    return r;
}

RunConfig Parser::run() {
    static const std::map<std::string, std::set<std::string>> known = {
        {"model", {"n", "m", "mode", "hacker", "hackers", "detect", "reset"}},
        {"engine", {"reps", "seed", "threads", "tol", "cells", "step", "horizon", "cycle_cap", "crn"}},
        {"econ", {"revenue", "reset_cost", "run_cost"}},
        {"sweep", {"m", "k", "t"}},
    };
    static const std::set<std::string> repeatable = {"hacker"};

    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text_.size()) {
        const std::size_t end = std::min(text_.find('\n', pos), text_.size());
        std::string_view line = text_.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) {
            if (end == text_.size()) break;
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') fail("unterminated section header", line_no);
            section = lower(trim(line.substr(1, line.size() - 2)));
            if (!known.count(section)) fail("unknown section [" + section + "]", line_no);
            if (section_line_.count(section)) fail("duplicate section [" + section + "]", line_no);
            section_line_[section] = line_no;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail("expected key = value", line_no);
        const std::string key = lower(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (section.empty()) fail("key '" + key + "' appears before any section", line_no);
        if (!known.at(section).count(key)) fail("unknown key '" + key + "' in [" + section + "]", line_no);
        auto& slot = sections_[section][key];
        if (!slot.empty() && !repeatable.count(key)) fail("duplicate key '" + key + "'", line_no);
        if (value.empty()) fail("key '" + key + "' has no value", line_no);
        slot.push_back({value, line_no});
        if (end == text_.size()) break;
    }

    if (!section_line_.count("model")) fail("missing [model] section", 0);
    const int model_line = section_line_.at("model");
    auto& model = sections_["model"];
    auto one = [](auto& sec, const std::string& key) -> const Entry* {
        const auto it = sec.find(key);
        return it == sec.end() ? nullptr : &it->second.front();
    };

    RunConfig cfg;
    const Entry* n = one(model, "n");
    const Entry* m = one(model, "m");
    if (n && m) fail("both n and m given; specify exactly one", m->line);
    if (!n && !m) fail("[model] needs either n or m", model_line);
    if (n) cfg.n = static_cast<int>(integer("n", *n, 2));
    if (m) cfg.m = static_cast<int>(integer("m", *m, 1));
    if (const Entry* mode = one(model, "mode")) {
        const std::string v = lower(mode->value);
        if (v == "destructive") {
            cfg.mode = AttackMode::Destructive;
        } else if (v == "ransom") {
            cfg.mode = AttackMode::Ransom;
        } else {
            fail("mode: expected destructive or ransom, got '" + mode->value + "'", mode->line);
        }
    }
    if (const auto it = model.find("hacker"); it != model.end()) {
        for (const auto& e : it->second) cfg.hackers.push_back(law("hacker", e));
    }
    if (cfg.hackers.empty()) fail("[model] needs at least one 'hacker' law", model_line);
    if (const Entry* count = one(model, "hackers")) {
        const auto k = integer("hackers", *count, 1);
        if (cfg.hackers.size() != 1) {
            fail("hackers: replication needs exactly one 'hacker' line", count->line);
        }
        cfg.hackers.assign(static_cast<std::size_t>(k), cfg.hackers.front());
    }
    for (const auto& h : cfg.hackers) {
        if (h.family() == Family::Weibull) {
            fail("hacker: Weibull hacking times are not closed under convolution", model_line);
        }
    }
    const Entry* detect = one(model, "detect");
    const Entry* reset = one(model, "reset");
    if (!detect) fail("[model] needs a 'detect' law", model_line);
    if (!reset) fail("[model] needs a 'reset' law", model_line);
    cfg.detect = law("detect", *detect);
    cfg.reset = law("reset", *reset);

    auto& engine = sections_["engine"];
    if (const Entry* e = one(engine, "reps")) cfg.engine.reps = static_cast<std::size_t>(integer("reps", *e, 2));
    if (const Entry* e = one(engine, "seed")) {
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
        if (ec != std::errc() || ptr != e->value.data() + e->value.size()) {
            fail("seed: expected an unsigned 64-bit integer", e->line);
        }
        cfg.engine.seed = v;
    }
    if (const Entry* e = one(engine, "threads")) cfg.engine.threads = static_cast<unsigned>(integer("threads", *e, 0));
    if (const Entry* e = one(engine, "tol")) cfg.engine.quad.abs_tol = positive("tol", *e);
    if (const Entry* e = one(engine, "cells")) cfg.engine.grid.cells = static_cast<std::size_t>(integer("cells", *e, 1));
    if (const Entry* e = one(engine, "step")) {
        const double v = number("step", *e);
        if (v < 0.0) fail("step: must be nonnegative", e->line);
        cfg.engine.grid.step = v;
    }
    if (const Entry* e = one(engine, "horizon")) {
        const double v = number("horizon", *e);
        if (v < 0.0) fail("horizon: must be nonnegative", e->line);
        cfg.engine.grid.horizon = v;
    }
    if (const Entry* e = one(engine, "cycle_cap")) {
        cfg.engine.cycle_cap = static_cast<std::uint64_t>(integer("cycle_cap", *e, 1));
    }
    if (const Entry* e = one(engine, "crn")) {
        const std::string v = lower(e->value);
        if (v == "true" || v == "yes" || v == "1") {
            cfg.engine.common_random_numbers = true;
        } else if (v == "false" || v == "no" || v == "0") {
            cfg.engine.common_random_numbers = false;
        } else {
            fail("crn: expected true or false", e->line);
        }
    }

    if (section_line_.count("econ")) {
        auto& econ = sections_["econ"];
        EconSpec spec;
        const std::pair<const char*, RateExpr*> slots[] = {
            {"revenue", &spec.revenue}, {"reset_cost", &spec.reset_cost}, {"run_cost", &spec.run_cost}};
        for (const auto& [key, slot] : slots) {
            const Entry* e = one(econ, key);
            if (!e) fail(std::string("[econ] needs '") + key + "'", section_line_.at("econ"));
            *slot = rate(key, *e);
        }
        cfg.econ = spec;
    }

    auto& sweep = sections_["sweep"];
    if (const Entry* e = one(sweep, "m")) std::tie(cfg.sweep.m_lo, cfg.sweep.m_hi) = int_range("m", *e);
    if (const Entry* e = one(sweep, "k")) std::tie(cfg.sweep.k_lo, cfg.sweep.k_hi) = int_range("k", *e);
    if (const Entry* e = one(sweep, "t")) {
        cfg.sweep.t_grid = time_grid("t", *e);
    } else {
        for (int i = 0; i <= 20; ++i) cfg.sweep.t_grid.push_back(0.5 * i);
    }

    // Surface domain errors (e.g. m > n) as parse errors.
    try {
        (void)cfg.spec();
    } catch (const Error& err) {
        fail(err.what(), model_line);
    }
    cfg.source_text = std::string(text_);
    cfg.source_hash = fnv1a64(text_);
    return cfg;
}

}  // namespace

Distribution parse_distribution(std::string_view text) {
    const auto toks = tokens(text);
    if (toks.empty()) throw ParseError("empty distribution", 0);
    const std::string family = lower(toks.front());
    std::map<std::string, double> params;
    for (std::size_t i = 1; i < toks.size(); ++i) {
        const auto eq = toks[i].find('=');
        if (eq == std::string::npos) throw ParseError("expected name=value, got '" + toks[i] + "'", 0);
        const std::string name = lower(toks[i].substr(0, eq));
        const auto v = to_double(toks[i].substr(eq + 1));
        if (!v) throw ParseError(name + ": expected a number, got '" + toks[i].substr(eq + 1) + "'", 0);
        if (!(*v > 0.0)) throw ParseError(name + ": must be positive, got " + toks[i].substr(eq + 1), 0);
        if (!params.emplace(name, *v).second) throw ParseError("duplicate parameter " + name, 0);
    }
    auto take = [&](const std::vector<std::string>& names) {
        std::vector<double> out;
        for (const auto& name : names) {
            const auto it = params.find(name);
            if (it == params.end()) throw ParseError(family + ": missing parameter " + name, 0);
            out.push_back(it->second);
        }
        if (params.size() != names.size()) {
            throw ParseError(family + ": unexpected parameter (expects only the listed ones)", 0);
        }
        return out;
    };
    if (family == "exponential" || family == "exp") {
        const auto v = take({"rate"});
        return Distribution::exponential(v[0]);
    }
    if (family == "gamma") {
        const auto v = take({"shape", "rate"});
        return Distribution::gamma(v[0], v[1]);
    }
    if (family == "weibull") {
        const auto v = take({"scale", "shape"});
        return Distribution::weibull(v[0], v[1]);
    }
    throw ParseError("unknown distribution family '" + toks.front() + "'", 0);
}

BlockchainSpec RunConfig::spec() const {
    if (!detect || !reset) throw DomainError("configuration lacks detect or reset law");
    if (n) return BlockchainSpec::from_nodes(*n, mode, hackers, *detect, *reset);
    return BlockchainSpec::from_quorum(m.value_or(1), hackers, *detect, *reset);
}

McOptions RunConfig::mc_options() const {
    McOptions o;
    o.cycle_cap = engine.cycle_cap;
    o.threads = engine.threads;
    return o;
}

RunConfig parse_config(std::string_view text) {
    return Parser(text).run();
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open config file '" + path + "'", 0);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string attack_mode_name(AttackMode mode) {
    return mode == AttackMode::Destructive ? "destructive" : "ransom";
}

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace chainrisk
