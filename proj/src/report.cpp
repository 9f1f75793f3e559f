#include "asianqmc/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "asianqmc/errors.hpp"

namespace asianqmc {

using nlohmann::json;

ExperimentConfig default_config() {
    ExperimentConfig c;
    c.options = {OptionKind::kBinaryAsian, OptionKind::kAsianCall, OptionKind::kUpAndOutAsianCall};
    c.greeks = {GreekKind::kDelta, GreekKind::kGamma, GreekKind::kVega};
    c.strikes = {90.0, 100.0, 110.0};
    c.dims = {64, 128};
    c.methods = standard_methods(c.construction);
    return c;
}

namespace {

int line_of_offset(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Line of the first occurrence of "key"; 0 when absent.
int line_of_key(const std::string& text, const std::string& key) {
    const auto pos = text.find('"' + key + '"');
    return pos == std::string::npos ? 0 : line_of_offset(text, pos);
}

[[noreturn]] void fail_at(const std::string& text, const std::string& key, const std::string& message) {
    const int line = line_of_key(text, key);
    throw ConfigError((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + message);
}

template <typename T>
T get_as(const std::string& text, const json& node, const std::string& key) {
    try {
        return node.get<T>();
    } catch (const json::exception&) {
        fail_at(text, key, "'" + key + "' has the wrong type");
    }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("line " + std::to_string(line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1)) +
                          ": malformed JSON (" + e.what() + ")");
    }
    if (!root.is_object()) throw ConfigError("line 1: top level must be a JSON object");

    ExperimentConfig c = default_config();
    static const std::set<std::string> known = {"market", "options", "greeks", "strikes", "dims", "barrier",
                                                "methods", "m_batches", "n_samples", "seed", "construction",
                                                "gpca_pilot_size", "record_timing", "output"};
    for (const auto& [key, value] : root.items())
        if (!known.count(key)) fail_at(text, key, "unknown key '" + key + "'");

    if (root.contains("market")) {
        const json& m = root["market"];
        if (!m.is_object()) fail_at(text, "market", "'market' must be an object");
        for (const auto& [key, value] : m.items()) {
            if (key == "s0") c.market.s0 = get_as<double>(text, value, key);
            else if (key == "sigma") c.market.sigma = get_as<double>(text, value, key);
            else if (key == "r") c.market.r = get_as<double>(text, value, key);
            else if (key == "T") c.market.maturity = get_as<double>(text, value, key);
            else fail_at(text, key, "unknown market key '" + key + "'");
        }
    }
    auto list = [&](const char* key, auto parse_item) {
        using Item = decltype(parse_item(std::declval<const json&>()));
        std::vector<Item> out;
        const json& node = root[key];
        if (!node.is_array()) fail_at(text, key, std::string("'") + key + "' must be a list");
        for (const auto& item : node) {
            try {
                out.push_back(parse_item(item));
            } catch (const ConfigError& e) {
                fail_at(text, key, e.what());
            } catch (const json::exception&) {
                fail_at(text, key, std::string("'") + key + "' has an entry of the wrong type");
            }
        }
        return out;
    };
    if (root.contains("construction"))
        try {
            c.construction = parse_construction(get_as<std::string>(text, root["construction"], "construction"));
        } catch (const ConfigError& e) {
            fail_at(text, "construction", e.what());
        }
    if (root.contains("options"))
        c.options = list("options", [](const json& j) { return parse_option(j.get<std::string>()); });
    if (root.contains("greeks"))
        c.greeks = list("greeks", [](const json& j) { return parse_greek(j.get<std::string>()); });
    if (root.contains("strikes")) c.strikes = list("strikes", [](const json& j) { return j.get<double>(); });
    if (root.contains("dims")) c.dims = list("dims", [](const json& j) { return j.get<int>(); });
    if (root.contains("methods")) {
        const Construction cons = c.construction;
        c.methods = list("methods", [cons](const json& j) { return MethodSpec::parse(j.get<std::string>(), cons); });
    }
    if (root.contains("barrier")) c.barrier = get_as<double>(text, root["barrier"], "barrier");
    if (root.contains("m_batches")) c.m_batches = get_as<int>(text, root["m_batches"], "m_batches");
    if (root.contains("n_samples")) c.n_samples = get_as<int>(text, root["n_samples"], "n_samples");
    if (root.contains("seed")) c.seed = get_as<std::uint64_t>(text, root["seed"], "seed");
    if (root.contains("gpca_pilot_size"))
        c.gpca_pilot_size = get_as<std::size_t>(text, root["gpca_pilot_size"], "gpca_pilot_size");
    if (root.contains("record_timing")) c.record_timing = get_as<bool>(text, root["record_timing"], "record_timing");
    if (root.contains("output")) {
        const json& o = root["output"];
        if (!o.is_object()) fail_at(text, "output", "'output' must be an object");
        for (const auto& [key, value] : o.items()) {
            if (key == "path") c.output_path = get_as<std::string>(text, value, key);
            else if (key == "format") c.output_format = get_as<std::string>(text, value, key);
            else fail_at(text, key, "unknown output key '" + key + "'");
        }
    }

    try {
        c.validate();
    } catch (const ConfigError& e) {
        // Messages start with the field name; point at it.
        const std::string msg = e.what();
        const std::string field = msg.substr(0, msg.find(':'));
        const std::string key = field.find('.') != std::string::npos ? field.substr(field.find('.') + 1) : field;
        fail_at(text, key, msg);
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& c) {
    nlohmann::ordered_json j;
    j["market"] = {{"s0", c.market.s0}, {"sigma", c.market.sigma}, {"r", c.market.r}, {"T", c.market.maturity}};
    for (auto o : c.options) j["options"].push_back(std::string(to_string(o)));
    for (auto g : c.greeks) j["greeks"].push_back(std::string(to_string(g)));
    j["strikes"] = c.strikes;
    j["dims"] = c.dims;
    j["barrier"] = c.barrier;
    for (const auto& m : c.methods) j["methods"].push_back(m.name());
    j["m_batches"] = c.m_batches;
    j["n_samples"] = c.n_samples;
    j["seed"] = c.seed;
    j["construction"] = std::string(to_string(c.construction));
    j["gpca_pilot_size"] = c.gpca_pilot_size;
    j["record_timing"] = c.record_timing;
    j["output"] = {{"path", c.output_path}, {"format", c.output_format}};
    return j;
}

namespace {

std::string format_full(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw Error("malformed number '" + s + "' in report");
    return v;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch == '\n' ? ' ' : ch;
    }
    return out + '"';
}

std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                fields.back() += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.emplace_back();
        } else {
            fields.back() += ch;
        }
    }
    return fields;
}

constexpr const char* kCsvHeader = "option,greek,K,d,method,mean,std_err,vrf,seconds,status";

}  // namespace

void write_csv(const ExperimentReport& report, std::ostream& out) {
    out << kCsvHeader << '\n';
    for (const auto& r : report.rows) {
        const double mean = r.ok() ? r.estimate.mean : std::numeric_limits<double>::quiet_NaN();
        const double se = r.ok() ? r.estimate.std_err : std::numeric_limits<double>::quiet_NaN();
        out << to_string(r.option) << ',' << to_string(r.greek) << ',' << format_full(r.strike) << ',' << r.d << ','
            << r.method << ',' << format_full(mean) << ',' << format_full(se) << ',' << format_full(r.vrf) << ','
            << format_full(r.seconds) << ',' << csv_quote(r.status) << '\n';
    }
}

ExperimentReport read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw Error("report CSV: unexpected header");
    ExperimentReport report;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = csv_split(line);
        if (f.size() != 10) throw Error("report CSV: expected 10 fields in '" + line + "'");
        ReportRow r{parse_option(f[0]), parse_greek(f[1]), parse_double(f[2]), std::stoi(f[3]), f[4], {}, 1.0, 0.0,
                    f[9]};
        r.estimate.mean = parse_double(f[5]);
        r.estimate.std_err = parse_double(f[6]);
        r.estimate.var_of_means = r.estimate.std_err * r.estimate.std_err;
        r.vrf = parse_double(f[7]);
        r.seconds = parse_double(f[8]);
        report.rows.push_back(std::move(r));
    }
    return report;
}

std::string format_significant(double value, int digits) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, value);
    return buf;
}

void write_markdown(const ExperimentReport& report, std::ostream& out) {
    std::vector<std::string> methods;
    for (const auto& r : report.rows)
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
    std::vector<OptionKind> options;
    for (const auto& r : report.rows)
        if (std::find(options.begin(), options.end(), r.option) == options.end()) options.push_back(r.option);

    for (auto option : options) {
        out << "### " << to_string(option) << "\n\n| greek | K | d |";
        for (const auto& m : methods) out << ' ' << m << " |";
        out << "\n|---|---|---|";
        for (std::size_t i = 0; i < methods.size(); ++i) out << "---|";
        out << '\n';
        // Rows keyed by (greek, K, d) in report order.
        std::vector<std::tuple<GreekKind, double, int>> keys;
        for (const auto& r : report.rows) {
            if (r.option != option) continue;
            const auto key = std::make_tuple(r.greek, r.strike, r.d);
            if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
        }
        for (const auto& [greek, strike, d] : keys) {
            out << "| " << to_string(greek) << " | " << format_significant(strike, 6) << " | " << d << " |";
            for (const auto& m : methods) {
                const auto it = std::find_if(report.rows.begin(), report.rows.end(), [&](const ReportRow& r) {
                    return r.option == option && r.greek == greek && r.strike == strike && r.d == d && r.method == m;
                });
                if (it == report.rows.end()) {
                    out << "  |";
                } else if (!it->ok()) {
                    out << " failed |";
                } else {
                    out << ' ' << format_significant(it->estimate.mean, 6) << " (" << format_significant(it->vrf, 6)
                        << ") |";
                }
            }
            out << '\n';
        }
        out << '\n';
    }
}

}  // namespace asianqmc
