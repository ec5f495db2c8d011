#include "audit/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace audit::io {

using nlohmann::json;

namespace {

std::vector<double> as_vector(const json& j, const std::string& key, std::size_t want) {
    if (!j.contains(key)) throw std::invalid_argument("missing field '" + key + "'");
    const auto& arr = j.at(key);
    if (!arr.is_array()) throw std::invalid_argument("field '" + key + "' must be an array");
    std::vector<double> out;
    out.reserve(arr.size());
    for (const auto& x : arr) {
        if (!x.is_number()) throw std::invalid_argument("field '" + key + "' must hold numbers");
        out.push_back(x.get<double>());
    }
    if (want != 0 && out.size() != want)
        throw std::invalid_argument("field '" + key + "' must have length " + std::to_string(want));
    return out;
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
}

}  // namespace

AuditGame parse_game(const std::string& text) {
    const json j = parse_json(text);
    if (!j.is_object()) throw std::invalid_argument("game config must be a JSON object");
    AuditGame g;
    if (!j.contains("m") || !j.at("m").is_number_integer())
        throw std::invalid_argument("game config needs integer field 'm'");
    g.m = j.at("m").get<int>();
    if (g.m < 2) throw std::invalid_argument("field 'm' must be at least 2");
    g.n = j.value("n", 1.0);
    const auto m = static_cast<std::size_t>(g.m);
    g.q = as_vector(j, "q", m);
    g.pay = as_vector(j, "pay", m);
    g.pen = as_vector(j, "pen", m);
    g.val = as_vector(j, "val", m * m);

    const bool has_lambda = j.contains("lambda");
    const bool has_budget = j.contains("budget");
    if (has_lambda == has_budget)
        throw std::invalid_argument("game config needs exactly one of 'lambda' or 'budget'");
    g.regime = has_lambda ? Regime::costly(j.at("lambda").get<double>())
                          : Regime::budgeted(j.at("budget").get<double>());
    return g;
}

AuditGame load_game(const std::string& path) { return parse_game(read_file(path)); }

std::string write_game(const AuditGame& g) {
    json j;
    j["n"] = g.n;
    j["m"] = g.m;
    j["q"] = g.q;
    j["val"] = g.val;
    j["pay"] = g.pay;
    j["pen"] = g.pen;
    if (g.regime.kind == RegimeKind::Costly)
        j["lambda"] = g.regime.lambda;
    else
        j["budget"] = g.regime.budget;
    return j.dump(2) + "\n";
}

bool looks_continuous(const std::string& text) {
    const json j = parse_json(text);
    return j.is_object() && j.contains("pay_affine");
}

ContinuousModelSpec parse_continuous(const std::string& text) {
    const json j = parse_json(text);
    ContinuousModelSpec spec;
    const auto pay_affine = as_vector(j, "pay_affine", 2);
    spec.c0 = pay_affine[0];
    spec.c1 = pay_affine[1];
    if (!j.contains("pen_offset")) throw std::invalid_argument("missing field 'pen_offset'");
    spec.pen_offset = j.at("pen_offset").get<double>();
    const auto fam = as_vector(j, "val_family", 3);
    spec.a0 = fam[0];
    spec.a1 = fam[1];
    spec.a2 = fam[2];
    if (!j.contains("lambda")) throw std::invalid_argument("missing field 'lambda'");
    spec.lambda = j.at("lambda").get<double>();
    if (!j.contains("m")) throw std::invalid_argument("missing field 'm'");
    spec.m = j.at("m").get<int>();
    return spec;
}

std::vector<std::vector<double>> parse_priors(const std::string& text, int m) {
    const json j = parse_json(text);
    if (!j.is_array() || j.empty())
        throw std::invalid_argument("priors file must be a nonempty JSON array");
    std::vector<std::vector<double>> out;
    out.reserve(j.size());
    for (const auto& row : j) {
        if (!row.is_array() || static_cast<int>(row.size()) != m)
            throw std::invalid_argument("each prior must be an array of length m");
        out.emplace_back();
        for (const auto& x : row) out.back().push_back(x.get<double>());
    }
    return out;
}

SweepPlan parse_plan(const std::string& text, const std::string& base_dir) {
    const json j = parse_json(text);
    if (!j.is_object() || !j.contains("kind"))
        throw std::invalid_argument("sweep plan needs a 'kind' field");
    SweepPlan plan;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "prior_simplex")
        plan.kind = SweepPlan::Kind::PriorSimplex;
    else if (kind == "cost")
        plan.kind = SweepPlan::Kind::CostSweep;
    else if (kind == "penalty_margin")
        plan.kind = SweepPlan::Kind::PenaltyMargin;
    else if (kind == "resolution")
        plan.kind = SweepPlan::Kind::Resolution;
    else if (kind == "audit_scan")
        plan.kind = SweepPlan::Kind::AuditScan;
    else
        throw std::invalid_argument("unknown sweep kind '" + kind + "'");

    auto load_nested_game = [&](const json& node) -> AuditGame {
        if (node.is_string()) {
            const auto path = std::filesystem::path(base_dir) / node.get<std::string>();
            return load_game(path.string());
        }
        return parse_game(node.dump());
    };

    if (j.contains("game")) plan.base_game = load_nested_game(j.at("game"));
    if (j.contains("continuous")) {
        const auto& node = j.at("continuous");
        if (node.is_string()) {
            const auto path = std::filesystem::path(base_dir) / node.get<std::string>();
            plan.cspec = parse_continuous(read_file(path.string()));
        } else {
            plan.cspec = parse_continuous(node.dump());
        }
    }

    plan.eps = j.value("eps", 1e-3);
    if (j.contains("objectives")) {
        plan.utility = plan.welfare = false;
        for (const auto& o : j.at("objectives")) {
            if (o == "utility") plan.utility = true;
            else if (o == "welfare") plan.welfare = true;
            else throw std::invalid_argument("unknown objective in plan");
        }
    }
    plan.simplex_resolution = j.value("resolution", 60);
    if (j.contains("values")) plan.values = as_vector(j, "values", 0);
    if (j.contains("range")) {
        // {"range": [lo, hi], "step": s} expands to an inclusive ladder.
        const auto range = as_vector(j, "range", 2);
        const double step = j.value("step", 0.1);
        if (!(step > 0.0)) throw std::invalid_argument("range step must be positive");
        for (double x = range[0]; x <= range[1] + 1e-12; x += step) plan.values.push_back(x);
    }
    plan.m_lo = j.value("m_lo", 2);
    plan.m_hi = j.value("m_hi", 200);
    plan.scan_index = j.value("scan_index", 0);
    plan.scan_lo = j.value("scan_lo", 0.0);
    plan.scan_hi = j.value("scan_hi", 1.0);
    plan.scan_step = j.value("scan_step", 1.0 / 256);
    return plan;
}

std::string write_policy(const DictatorPolicy& policy) {
    json j;
    j["p_star"] = policy.p_star;
    j["qhat_star"] = policy.qhat_star;
    if (policy.regime.kind == RegimeKind::Costly) {
        j["regime"] = "costly";
        j["lambda"] = policy.regime.lambda;
    } else {
        j["regime"] = "budgeted";
        j["budget"] = policy.regime.budget;
    }
    j["value"] = policy.value;
    j["small_budget"] = policy.small_budget;
    j["critical"] = {{"iota", policy.critical.iota},
                     {"kappa", policy.critical.kappa},
                     {"sign", policy.critical.sign == CriticalSign::Plus ? "+" : "-"}};
    return j.dump(2) + "\n";
}

DictatorPolicy parse_policy(const std::string& text) {
    const json j = parse_json(text);
    DictatorPolicy policy;
    policy.p_star = as_vector(j, "p_star", 0);
    policy.qhat_star = as_vector(j, "qhat_star", 0);
    const std::string regime = j.at("regime").get<std::string>();
    policy.regime = regime == "costly" ? Regime::costly(j.at("lambda").get<double>())
                                       : Regime::budgeted(j.at("budget").get<double>());
    policy.value = j.at("value").get<double>();
    policy.small_budget = j.value("small_budget", false);
    if (j.contains("critical")) {
        const auto& c = j.at("critical");
        policy.critical.iota = c.at("iota").get<int>();
        policy.critical.kappa = c.at("kappa").get<int>();
        policy.critical.sign =
            c.at("sign").get<std::string>() == "+" ? CriticalSign::Plus : CriticalSign::Minus;
    }
    return policy;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    std::mt19937_64 rng(std::random_device{}());
    const fs::path tmp = target.parent_path() /
                         (target.filename().string() + ".tmp" + std::to_string(rng() & 0xffffff));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write file: " + tmp.string());
        out << content;
        if (!out.good()) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string fmt_sig(double x, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
    return buf;
}

}  // namespace audit::io
