#include "fpa/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "fpa/strategies.hpp"

namespace fpa {

AuctionEnv ExperimentConfig::make_env(const std::string& base_dir) const {
    return AuctionEnv::make(parse_dist_spec(value_dist_spec, base_dir), value_mean,
                            parse_dist_spec(maxbid_dist_spec, base_dir), reveal_m);
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": invalid JSON: " + e.what());
    }

    ExperimentConfig cfg;
    try {
        cfg.name = j.value("name", std::string{});
        cfg.description = j.value("description", std::string{});
        cfg.horizon = j.at("horizon").get<std::int64_t>();
        cfg.trials = j.at("trials").get<std::int64_t>();
        cfg.value_dist_spec = j.at("value_dist").get<std::string>();
        cfg.value_mean = j.at("value_mean").get<double>();
        cfg.maxbid_dist_spec = j.at("maxbid_dist").get<std::string>();
        cfg.reveal_m = j.at("reveal_m").get<bool>();
        cfg.strategies = j.at("strategies").get<std::vector<std::string>>();

        if (!j.contains("checkpoints") || j["checkpoints"].is_string()) {
            std::string spec = j.value("checkpoints", std::string("log:100"));
            if (spec.rfind("log:", 0) != 0)
                throw ConfigError("checkpoints: expected an array or 'log:N'");
            int count = std::stoi(spec.substr(4));
            if (count < 2) throw ConfigError("checkpoints: log:N needs N >= 2");
            cfg.checkpoints = log_checkpoints(cfg.horizon, count);
        } else {
            cfg.checkpoints = j["checkpoints"].get<std::vector<std::int64_t>>();
            std::sort(cfg.checkpoints.begin(), cfg.checkpoints.end());
            cfg.checkpoints.erase(std::unique(cfg.checkpoints.begin(), cfg.checkpoints.end()),
                                  cfg.checkpoints.end());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }

    if (cfg.horizon < 1) throw ConfigError("horizon must be >= 1");
    if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
    if (cfg.strategies.empty()) throw ConfigError("need at least one strategy");
    for (std::int64_t cp : cfg.checkpoints)
        if (cp < 1 || cp > cfg.horizon) throw ConfigError("checkpoints must lie in [1, horizon]");

    const std::string base_dir = std::filesystem::path(path).parent_path().string();
    DistModel maxbid = parse_dist_spec(cfg.maxbid_dist_spec, base_dir);
    parse_dist_spec(cfg.value_dist_spec, base_dir);
    for (const auto& spec : cfg.strategies) {
        make_strategy(spec, cfg.horizon, &maxbid, 0);  // parse check
        if (strategy_needs_rival_bids(spec) && !cfg.reveal_m)
            throw ConfigError("strategy '" + spec + "' needs reveal_m = true");
    }
    return cfg;
}

}  // namespace fpa
