#include "wqed/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace wqed {

namespace {
double get_num(const nlohmann::json& j, const char* key, std::optional<double> fallback = {}) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError(std::string("config: missing required key '") + key + "'");
    }
    if (!j[key].is_number()) throw ConfigError(std::string("config: '") + key + "' must be a number");
    return j[key].get<double>();
}
}  // namespace

RunConfig parse_config(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }
    RunConfig cfg;
    if (!j.contains("kind") || !j["kind"].is_string())
        throw ConfigError("config: 'kind' must be \"tls\" or \"lambda\"");
    const std::string kind = j["kind"].get<std::string>();
    const double omega = get_num(j, "omega");
    const double omega0 = get_num(j, "omega0", 0.0);
    if (kind == "tls") {
        cfg.system = EmitterSystem::tls(omega, get_num(j, "gamma1"), omega0);
    } else if (kind == "lambda") {
        cfg.system = EmitterSystem::lambda(omega, get_num(j, "gamma1"), get_num(j, "gamma2", 0.0),
                                           get_num(j, "dtilde1", 0.0), get_num(j, "dtilde2", 0.0),
                                           omega0);
    } else {
        throw ConfigError("config: unknown kind '" + kind + "'");
    }
    if (!j.contains("inputs") || !j["inputs"].is_array() || j["inputs"].empty())
        throw ConfigError("config: 'inputs' must be a non-empty array of frequencies");
    for (const auto& v : j["inputs"]) {
        if (!v.is_number()) throw ConfigError("config: 'inputs' entries must be numbers");
        cfg.photons.inputs.push_back(v.get<double>());
    }
    cfg.initial_ground = static_cast<int>(get_num(j, "initial_ground", 1.0));
    if (cfg.initial_ground != 1 && cfg.initial_ground != 2)
        throw ConfigError("config: 'initial_ground' must be 1 or 2");
    if (kind == "tls" && cfg.initial_ground != 1)
        throw ConfigError("config: a TLS has only ground level 1");

    auto rep = validate_photons(cfg.system, cfg.photons);
    if (!rep.pass()) {
        std::string msg = "config: invalid parameters:";
        for (const auto& v : rep.violations) msg += " " + v + ";";
        throw ConfigError(msg);
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string amplitude_json(const Amplitude& amp) {
    nlohmann::json j;
    j["photons"] = amp.photons;
    j["canonical"] = amp.canonical;
    nlohmann::json sym = nlohmann::json::object();
    for (int k = 0; k < kNumSymbols; ++k) {
        const Symbol s = static_cast<Symbol>(k);
        if (amp.role(s) == SymbolRole::Unused) continue;
        sym[symbol_name(s)] = amp.role(s) == SymbolRole::Input ? "input" : "output";
    }
    j["symbols"] = sym;
    j["terms"] = nlohmann::json::array();
    for (const auto& t : amp.terms) {
        nlohmann::json jt;
        jt["prefactor"] = {t.prefactor.real(), t.prefactor.imag()};
        jt["deltas"] = nlohmann::json::array();
        for (const auto& d : t.deltas) jt["deltas"].push_back(d.str());
        if (!t.gfactors.empty()) {
            jt["gfactors"] = nlohmann::json::array();
            for (const auto& g : t.gfactors)
                jt["gfactors"].push_back({{"form", g.arg.str()}, {"power", g.power}});
        }
        if (!t.polefactors.empty()) {
            jt["polefactors"] = nlohmann::json::array();
            for (const auto& p : t.polefactors)
                jt["polefactors"].push_back({{"form", p.form.str()}, {"power", p.power}});
        }
        if (t.final_ground != 0) jt["final_ground"] = t.final_ground;
        if (!t.origin.empty()) jt["origin"] = t.origin;
        j["terms"].push_back(jt);
    }
    return j.dump(2);
}

}  // namespace wqed
