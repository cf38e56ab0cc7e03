#pragma once

#include "posauc/mechanisms.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace posauc::io {

using json = nlohmann::json;

// Malformed user input; the CLI maps it to exit code 1.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline json to_json(const Rational& x) { return x.str(); }

inline json to_json(const std::vector<Rational>& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(x.str());
    return a;
}

inline json to_json(const Matrix& m) {
    json a = json::array();
    for (const auto& row : m) a.push_back(to_json(row));
    return a;
}

// 1-based indices; kNone becomes null.
inline json index_json(std::size_t i) { return i == kNone ? json(nullptr) : json(i + 1); }

inline json index_json(const std::vector<std::size_t>& v) {
    json a = json::array();
    for (auto i : v) a.push_back(index_json(i));
    return a;
}

inline Rational rational_from_json(const json& j, const std::string& path) {
    if (j.is_string()) {
        auto r = Rational::try_parse(j.get<std::string>());
        if (!r) throw InputError(path + ": '" + j.get<std::string>() + "' is not a rational (use \"p/q\" or a decimal)");
        return *r;
    }
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_number_unsigned()) return Rational(static_cast<unsigned long>(j.get<unsigned long long>()));
    if (j.is_number_float()) throw InputError(path + ": floating-point literal; quote it as a string to keep it exact");
    throw InputError(path + ": expected a rational string, got " + std::string(j.type_name()));
}

inline std::vector<Rational> rationals_from_json(const json& j, const std::string& path) {
    if (!j.is_array()) throw InputError(path + ": expected an array");
    std::vector<Rational> out;
    for (std::size_t k = 0; k < j.size(); ++k) out.push_back(rational_from_json(j[k], path + "[" + std::to_string(k) + "]"));
    return out;
}

inline Instance instance_from_json(const json& j) {
    if (!j.is_object()) throw InputError("instance: expected a JSON object");
    for (const auto& [key, _] : j.items())
        if (key != "values" && key != "ctr" && key != "strict_positive_ctr")
            throw InputError("instance: unknown field '" + key + "'");
    if (!j.contains("values")) throw InputError("instance: missing field 'values'");
    if (!j.contains("ctr")) throw InputError("instance: missing field 'ctr'");
    Instance inst;
    inst.values = rationals_from_json(j["values"], "values");
    const json& c = j["ctr"];
    if (!c.is_array()) throw InputError("ctr: expected an array of rows");
    for (std::size_t i = 0; i < c.size(); ++i) inst.ctr.push_back(rationals_from_json(c[i], "ctr[" + std::to_string(i) + "]"));
    if (j.contains("strict_positive_ctr")) {
        if (!j["strict_positive_ctr"].is_boolean()) throw InputError("strict_positive_ctr: expected a boolean");
        inst.strict_positive_ctr = j["strict_positive_ctr"].get<bool>();
    }
    try {
        inst.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    return inst;
}

inline json instance_to_json(const Instance& inst) {
    json j;
    j["values"] = to_json(inst.values);
    j["ctr"] = to_json(inst.ctr);
    if (inst.strict_positive_ctr) j["strict_positive_ctr"] = true;
    return j;
}

inline json parse_json_text(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
            if (text[k] == '\n') ++line, col = 1;
            else ++col;
        }
        throw InputError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": JSON syntax error");
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Instance load_instance(const std::string& path) {
    json j = parse_json_text(read_file(path), path);
    try {
        return instance_from_json(j);
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

inline json outcome_to_json(const Outcome& o) {
    json j;
    j["allocation"] = index_json(o.allocation);
    j["prices"] = to_json(o.prices);
    j["utilities"] = to_json(o.utilities);
    j["revenue"] = o.revenue().str();
    return j;
}

inline std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr))
        throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned k = 0; k < len; ++k) s += hex[md[k] >> 4], s += hex[md[k] & 15];
    return s;
}

// Digest of the canonical JSON form.
inline std::string digest(const Instance& inst) { return "sha256:" + sha256_hex(instance_to_json(inst).dump()); }

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

inline std::vector<Rational> parse_rational_list(const std::string& s, const std::string& what) {
    std::vector<Rational> out;
    for (const auto& tok : split(s, ',')) {
        auto r = Rational::try_parse(tok);
        if (!r) throw InputError(what + ": '" + tok + "' is not a rational");
        out.push_back(*r);
    }
    return out;
}

// "1,3,2" to 0-based indices, each in [1, limit].
inline std::vector<std::size_t> parse_index_list(const std::string& s, std::size_t limit, const std::string& what) {
    std::vector<std::size_t> out;
    for (const auto& tok : split(s, ',')) {
        std::size_t pos = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(tok, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos == 0 || pos != tok.size() || v < 1 || v > limit)
            throw InputError(what + ": '" + tok + "' is not an index in 1.." + std::to_string(limit));
        out.push_back(v - 1);
    }
    return out;
}

inline void require_permutation(const std::vector<std::size_t>& p, std::size_t size, const std::string& what) {
    try {
        check_permutation(p, size, what.c_str());
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
}

// Rows separated by ';', entries by ','.
inline Matrix parse_matrix(const std::string& s, const std::string& what) {
    Matrix m;
    for (const auto& row : split(s, ';')) m.push_back(parse_rational_list(row, what));
    return m;
}

// "priority:3,1,2", "click-ratio", "click-ratio:2,1,3" or "revenue-max".
inline TieBreakRule parse_tiebreak(const std::string& s, std::size_t n) {
    auto colon = s.find(':');
    std::string kind = s.substr(0, colon), rest = colon == std::string::npos ? "" : s.substr(colon + 1);
    std::vector<std::size_t> prio;
    if (!rest.empty()) {
        prio = parse_index_list(rest, n, "--tiebreak");
        require_permutation(prio, n, "--tiebreak");
    }
    if (kind == "priority") return TieBreakRule::by_priority(prio);
    if (kind == "click-ratio") return TieBreakRule::click_ratio(prio);
    if (kind == "revenue-max" && rest.empty()) return TieBreakRule::revenue_max();
    throw InputError("--tiebreak: expected priority:i,j,...|click-ratio[:i,j,...]|revenue-max, got '" + s + "'");
}

inline json tiebreak_to_json(const TieBreakRule& t) {
    json j;
    switch (t.kind) {
    case TieBreakRule::Kind::Priority: j["kind"] = "priority"; break;
    case TieBreakRule::Kind::HighestClickRatio: j["kind"] = "click-ratio"; break;
    case TieBreakRule::Kind::RevenueMax: j["kind"] = "revenue-max"; break;
    }
    j["priority"] = index_json(t.priority);
    return j;
}

// One "path,value" line per scalar leaf, in key order.
inline void flatten_csv(const json& j, const std::string& prefix, std::ostream& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) flatten_csv(v, prefix.empty() ? k : prefix + "." + k, out);
    } else if (j.is_array()) {
        for (std::size_t k = 0; k < j.size(); ++k) flatten_csv(j[k], prefix + "[" + std::to_string(k + 1) + "]", out);
    } else {
        std::string v = j.is_string() ? j.get<std::string>() : j.dump();
        if (v.find_first_of(",\"\n") != std::string::npos) {
            std::string q = "\"";
            for (char c : v) q += c == '"' ? std::string("\"\"") : std::string(1, c);
            v = q + "\"";
        }
        out << prefix << "," << v << "\n";
    }
}

}  // namespace posauc::io
