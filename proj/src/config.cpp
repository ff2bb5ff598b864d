#include "radialcap/config.hpp"

#include "radialcap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace radialcap {

namespace {

using nlohmann::json;

const std::set<std::string> kFields{"n", "m", "w", "g", "lambda", "h", "tangency"};

std::optional<int> read_int(const json& doc, const std::string& key,
                            std::vector<std::string>& errors) {
    if (!doc.contains(key)) {
        errors.push_back("field '" + key + "': missing");
        return std::nullopt;
    }
    const json& v = doc.at(key);
    if (!v.is_number_integer()) {
        errors.push_back("field '" + key + "': expected an integer");
        return std::nullopt;
    }
    return v.get<int>();
}

std::optional<Expr> read_expr(const json& doc, const std::string& key,
                              std::vector<std::string>& errors) {
    if (!doc.contains(key)) {
        errors.push_back("field '" + key + "': missing");
        return std::nullopt;
    }
    const json& v = doc.at(key);
    if (!v.is_string()) {
        errors.push_back("field '" + key + "': expected an expression string");
        return std::nullopt;
    }
    try {
        return parse(v.get<std::string>());
    } catch (const Error& e) {
        errors.push_back("field '" + key + "': " + e.what());
        return std::nullopt;
    }
}

json number_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

} // namespace

Constellation constellation_from_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");

    std::vector<std::string> errors;
    for (const auto& [key, _] : doc.items())
        if (!kFields.contains(key)) errors.push_back("field '" + key + "': unknown field");

    std::optional<Tangency> tangency;
    if (!doc.contains("tangency")) {
        errors.push_back("field 'tangency': missing");
    } else if (doc["tangency"] == "lower") {
        tangency = Tangency::Lower;
    } else if (doc["tangency"] == "upper") {
        tangency = Tangency::Upper;
    } else {
        errors.push_back("field 'tangency': expected \"lower\" or \"upper\"");
    }

    const auto n = read_int(doc, "n", errors);
    const auto m = read_int(doc, "m", errors);
    const auto w = read_expr(doc, "w", errors);
    std::optional<Expr> g;
    if (tangency == Tangency::Upper && !doc.contains("g"))
        g = Expr::number(1.0);
    else
        g = read_expr(doc, "g", errors);
    const auto lambda = read_expr(doc, "lambda", errors);
    const auto h = read_expr(doc, "h", errors);

    if (m && *m < 2) errors.push_back("field 'm': must be at least 2");
    if (n && m && *m > *n) errors.push_back("field 'n': must be at least m");

    if (!errors.empty()) {
        std::ostringstream os;
        os << "invalid constellation config:";
        for (const auto& e : errors) os << "\n  " << e;
        throw ConfigError(os.str());
    }
    return Constellation(*n, ModelSpace(*m, *w), *g, *lambda, *h, *tangency);
}

Constellation load_constellation(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return constellation_from_json(ss.str());
}

json to_json(const Constellation& c) {
    return json{{"n", c.n},
                {"m", c.m()},
                {"w", c.model.warping().to_string()},
                {"g", c.g.to_string()},
                {"lambda", c.lambda.to_string()},
                {"h", c.h.to_string()},
                {"tangency", c.tangency == Tangency::Lower ? "lower" : "upper"}};
}

bool is_self_constellation(const Constellation& c) {
    for (double r : geometric_grid(1e-2, 1e2, 17)) {
        try {
            if (c.tangency == Tangency::Lower && c.g(r) != 1.0) return false;
            if (c.lambda(r) != 0.0 || c.h(r) != 0.0) return false;
        } catch (const DomainError&) {
            return false;
        }
    }
    return true;
}

json to_json(const BalanceProfile& prof) {
    json out;
    out["p"] = prof.p;
    out["sign"] = prof.all_zero ? std::string("identically_zero") : std::string(to_string(prof.sign));
    out["all_zero"] = prof.all_zero;
    out["samples"] = prof.r.size();
    if (!prof.values.empty()) {
        const auto [lo, hi] = std::minmax_element(prof.values.begin(), prof.values.end());
        out["min"] = number_or_null(*lo);
        out["max"] = number_or_null(*hi);
    }
    out["sign_changes"] = prof.witnesses;
    return out;
}

json to_json(const TailClass& tail) {
    json out;
    const auto& ev = tail.evidence;
    out["kind"] = std::string(to_string(tail.kind));
    out["decided_by"] = std::string(to_string(ev.decided_by));
    out["alpha_hat"] = number_or_null(ev.alpha_hat);
    out["fit_residual"] = number_or_null(ev.fit_residual);
    out["fit_window"] = {ev.fit_lo, ev.fit_hi};
    out["horizon"] = tail.horizon();
    out["value"] = tail.kind == TailKind::Convergent ? number_or_null(tail.value) : json(nullptr);
    out["error"] = tail.kind == TailKind::Convergent ? number_or_null(tail.error) : json(nullptr);
    json partials = json::array();
    for (std::size_t k = 0; k < ev.radii.size(); ++k)
        partials.push_back({ev.radii[k], number_or_null(ev.partials[k])});
    out["partials"] = std::move(partials);
    if (!ev.stopped_early.empty()) out["stopped_early"] = ev.stopped_early;
    return out;
}

json evidence_json(const Verdict& v) {
    json out;
    out["criterion"] = std::string(to_string(v.by));
    out["reason"] = std::string(to_string(v.reason));
    out["failed_hypothesis"] = v.failed_hypothesis.empty() ? json(nullptr) : json(v.failed_hypothesis);
    out["witnesses"] = v.witnesses;
    out["certified_interval"] = {number_or_null(v.certified_lo), number_or_null(v.certified_hi)};
    out["balance"] = v.balance ? to_json(*v.balance) : json(nullptr);
    out["tail"] = v.tail ? to_json(*v.tail) : json(nullptr);
    out["notes"] = v.notes;
    return out;
}

} // namespace radialcap
