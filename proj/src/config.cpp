#include "secdet/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace secdet {

using nlohmann::json;

namespace {

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad JSON: ") + e.what());
    }
}

template <typename T>
T require(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("missing field: ") + key);
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad field '") + key + "': " + e.what());
    }
}

DistributionPair pair_from(const json& j) {
    const auto kind = require<std::string>(j, "kind");
    if (kind == "bernoulli")
        return DistributionPair::bernoulli(require<double>(j, "p0"), require<double>(j, "p1"));
    if (kind == "gaussian_shift")
        return DistributionPair::gaussian_shift(require<double>(j, "a"),
                                                require<double>(j, "vbar"),
                                                require<double>(j, "sigma"));
    throw ConfigError("unknown pair kind: " + kind);
}

json pair_to(const DistributionPair& p) {
    if (p.kind() == DistributionPair::Kind::Bernoulli)
        return {{"kind", "bernoulli"}, {"p0", p.p0()}, {"p1", p.p1()}};
    return {{"kind", "gaussian_shift"},
            {"a", p.shift()},
            {"vbar", p.noise_mean()},
            {"sigma", p.noise_sigma()}};
}

DetectorSpec detector_from(const json& j) {
    const auto kind = require<std::string>(j, "kind");
    if (kind == "bayes") {
        BayesSpec spec;
        spec.chi = j.value("chi", 0.0);
        if (j.contains("subset")) spec.subset = j.at("subset").get<std::vector<int>>();
        return spec;
    }
    if (kind == "secure") return SecureSpec{require<double>(j, "z_s")};
    if (kind == "secure_sensors")
        return SecureSensorsSpec{require<double>(j, "z_s"), require<int>(j, "m_s")};
    if (kind == "unknown_n")
        return UnknownNSpec{require<std::vector<double>>(j, "z_tuple")};
    if (kind == "trimmed") return TrimmedSpec{};
    if (kind == "qom")
        return QOutOfMSpec{require<std::vector<long long>>(j, "q_schedule")};
    throw ConfigError("unknown detector kind: " + kind);
}

json detector_to(const DetectorSpec& spec) {
    json j;
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, BayesSpec>) {
                j = {{"kind", "bayes"}, {"chi", s.chi}};
                if (!s.subset.empty()) j["subset"] = s.subset;
            } else if constexpr (std::is_same_v<T, SecureSpec>) {
                j = {{"kind", "secure"}, {"z_s", s.z_s}};
            } else if constexpr (std::is_same_v<T, SecureSensorsSpec>) {
                j = {{"kind", "secure_sensors"}, {"z_s", s.z_s}, {"m_s", s.m_s}};
            } else if constexpr (std::is_same_v<T, UnknownNSpec>) {
                j = {{"kind", "unknown_n"}, {"z_tuple", s.z_tuple}};
            } else if constexpr (std::is_same_v<T, TrimmedSpec>) {
                j = {{"kind", "trimmed"}};
            } else {
                j = {{"kind", "qom"}, {"q_schedule", s.q_schedule}};
            }
        },
        spec);
    return j;
}

AttackSpec attack_from(const json& j) {
    const auto kind = require<std::string>(j, "kind");
    if (kind == "none") return {AttackSpec::Kind::None, 0.0, -1};
    if (kind == "flip") return {AttackSpec::Kind::Flip, 0.0, -1};
    if (kind == "rate_target")
        return {AttackSpec::Kind::RateTarget, require<double>(j, "z_s"), j.value("n_a", -1)};
    throw ConfigError("unknown attack kind: " + kind);
}

json attack_to(const AttackSpec& a) {
    switch (a.kind) {
        case AttackSpec::Kind::None:
            return {{"kind", "none"}};
        case AttackSpec::Kind::Flip:
            return {{"kind", "flip"}};
        case AttackSpec::Kind::RateTarget: {
            json j = {{"kind", "rate_target"}, {"z_s", a.z_s}};
            if (a.n_actual >= 0) j["n_a"] = a.n_actual;
            return j;
        }
    }
    return {};
}

NetworkShape shape_from(const json& j) {
    NetworkShape s;
    s.m = require<int>(j, "m");
    s.n = require<int>(j, "n");
    s.m_s = j.value("m_s", 0);
    s.validate();
    return s;
}

}  // namespace

DistributionPair parse_pair_json(const std::string& text) { return pair_from(parse(text)); }
DetectorSpec parse_detector_json(const std::string& text) { return detector_from(parse(text)); }
AttackSpec parse_attack_json(const std::string& text) { return attack_from(parse(text)); }
NetworkShape parse_shape_json(const std::string& text) { return shape_from(parse(text)); }

ScenarioConfig parse_scenario_json(const std::string& text) {
    const json j = parse(text);
    if (!j.contains("pair")) throw ConfigError("missing field: pair");
    ScenarioConfig cfg(pair_from(j.at("pair")));
    if (!j.contains("shape")) throw ConfigError("missing field: shape");
    cfg.shape = shape_from(j.at("shape"));
    if (!j.contains("detector")) throw ConfigError("missing field: detector");
    cfg.detector = detector_from(j.at("detector"));
    cfg.attack = j.contains("attack") ? attack_from(j.at("attack"))
                                      : AttackSpec{AttackSpec::Kind::None, 0.0};

    const auto mode = j.value("theta_mode", std::string("both"));
    if (mode == "both")
        cfg.theta_mode = ThetaMode::Both;
    else if (mode == "theta0")
        cfg.theta_mode = ThetaMode::Fixed0;
    else if (mode == "theta1")
        cfg.theta_mode = ThetaMode::Fixed1;
    else
        throw ConfigError("unknown theta_mode: " + mode);

    cfg.horizon = j.value("horizon", 40);
    cfg.trials = j.value("trials", static_cast<long long>(10000));
    cfg.master_seed = j.value("master_seed", static_cast<std::uint64_t>(1));
    cfg.threads = j.value("threads", 0);

    if (j.contains("sampler")) {
        const auto& js = j.at("sampler");
        const auto kind = require<std::string>(js, "kind");
        if (kind == "plain") {
            cfg.sampler.kind = SamplerSpec::Kind::Plain;
        } else if (kind == "tilted") {
            cfg.sampler.kind = SamplerSpec::Kind::Tilted;
            if (js.contains("w") && !js.at("w").is_string()) {
                cfg.sampler.auto_w = false;
                cfg.sampler.w = js.at("w").get<double>();
            } else {
                cfg.sampler.auto_w = true;  // "auto" or absent
            }
        } else {
            throw ConfigError("unknown sampler kind: " + kind);
        }
    }
    if (j.contains("fit_window")) {
        const auto w = j.at("fit_window").get<std::vector<int>>();
        if (w.size() != 2) throw ConfigError("fit_window must be [lo, hi]");
        cfg.fit_window = std::make_pair(w[0], w[1]);
    }
    return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario_json(ss.str());
}

std::string scenario_to_json(const ScenarioConfig& cfg) {
    json j;
    j["pair"] = pair_to(cfg.pair);
    j["shape"] = {{"m", cfg.shape.m}, {"n", cfg.shape.n}, {"m_s", cfg.shape.m_s}};
    j["detector"] = detector_to(cfg.detector);
    j["attack"] = attack_to(cfg.attack);
    j["theta_mode"] = cfg.theta_mode == ThetaMode::Both
                          ? "both"
                          : (cfg.theta_mode == ThetaMode::Fixed0 ? "theta0" : "theta1");
    j["horizon"] = cfg.horizon;
    j["trials"] = cfg.trials;
    j["master_seed"] = cfg.master_seed;
    if (cfg.sampler.kind == SamplerSpec::Kind::Plain) {
        j["sampler"] = {{"kind", "plain"}};
    } else if (cfg.sampler.auto_w) {
        j["sampler"] = {{"kind", "tilted"}, {"w", "auto"}};
    } else {
        j["sampler"] = {{"kind", "tilted"}, {"w", cfg.sampler.w}};
    }
    if (cfg.fit_window) j["fit_window"] = {cfg.fit_window->first, cfg.fit_window->second};
    if (cfg.threads > 0) j["threads"] = cfg.threads;
    return j.dump(2);
}

std::string estimate_to_json(const ErrorEstimate& est, const ScenarioConfig& cfg) {
    json j;
    if (std::isnan(est.fitted_exponent))
        j["fitted_exponent"] = nullptr;
    else
        j["fitted_exponent"] = est.fitted_exponent;
    j["window"] = {est.fit_window.first, est.fit_window.second};
    j["seed"] = cfg.master_seed;
    j["config_echo"] = json::parse(scenario_to_json(cfg));
    return j.dump(2);
}

std::string estimate_to_csv(const ErrorEstimate& est) {
    std::ostringstream out;
    out.precision(12);
    out << "k,p_err0,se0,p_err1,se1,worst\n";
    for (const auto& row : est.per_k)
        out << row.k << ',' << row.p_err0 << ',' << row.se0 << ',' << row.p_err1 << ','
            << row.se1 << ',' << row.worst << '\n';
    return out.str();
}

}  // namespace secdet
