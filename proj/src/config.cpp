#include "divsp/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace divsp {

namespace {

using nlohmann::json;

// Pulls a typed field, with defaults, raising ConfigError that names the
// full key path on any problem.
class FieldReader {
public:
    FieldReader(const json& obj, std::string prefix) : obj_(obj), prefix_(std::move(prefix)) {
        if (!obj.is_object()) throw ConfigError("config: '" + prefix_ + "' must be an object");
    }

    ~FieldReader() = default;

    void check_unknown_keys() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
            if (!seen_.count(it.key()))
                throw ConfigError("config: unknown key '" + path(it.key()) + "'");
    }

    template <typename T>
    T required(const std::string& key) {
        seen_.insert(key);
        if (!obj_.contains(key)) throw ConfigError("config: missing required key '" + path(key) + "'");
        return convert<T>(key);
    }

    template <typename T>
    T optional(const std::string& key, T fallback) {
        seen_.insert(key);
        if (!obj_.contains(key)) return fallback;
        return convert<T>(key);
    }

    bool has(const std::string& key) const { return obj_.contains(key); }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return obj_.at(key);
    }

private:
    std::string path(const std::string& key) const {
        return prefix_.empty() ? key : prefix_ + "." + key;
    }

    template <typename T>
    T convert(const std::string& key) {
        try {
            return obj_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError("config: key '" + path(key) + "' has the wrong type");
        }
    }

    const json& obj_;
    std::string prefix_;
    std::set<std::string> seen_;
};

void require_positive(double value, const std::string& field) {
    if (!(value > 0.0)) throw ConfigError("config: '" + field + "' must be positive");
}

void require_unit_interval(double value, const std::string& field) {
    if (value < 0.0 || value > 1.0)
        throw ConfigError("config: '" + field + "' must lie in [0, 1]");
}

}  // namespace

std::string strategy_name(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::kDivSP: return "divsp";
        case StrategyKind::kDR: return "dr";
        case StrategyKind::kPLR: return "plr";
        case StrategyKind::kMinimax: return "minimax";
        case StrategyKind::kPaired: return "paired";
    }
    throw ConfigError("strategy_name: invalid strategy kind");
}

StrategyKind strategy_from_name(const std::string& name) {
    if (name == "divsp") return StrategyKind::kDivSP;
    if (name == "dr") return StrategyKind::kDR;
    if (name == "plr") return StrategyKind::kPLR;
    if (name == "minimax") return StrategyKind::kMinimax;
    if (name == "paired") return StrategyKind::kPaired;
    throw ConfigError("config: 'strategy' has unknown value '" + name +
                      "' (expected divsp|dr|plr|minimax|paired)");
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }

    ExperimentConfig cfg;
    FieldReader top(root, "");

    if (top.has("env")) {
        FieldReader env(top.raw("env"), "env");
        cfg.env.width = env.optional<int>("width", cfg.env.width);
        cfg.env.height = env.optional<int>("height", cfg.env.height);
        cfg.env.max_blocks = env.optional<int>("max_blocks", cfg.env.max_blocks);
        cfg.env.horizon = env.optional<int>("horizon", cfg.env.horizon);
        cfg.env.view_size = env.optional<int>("view_size", cfg.env.view_size);
        env.check_unknown_keys();
        if (cfg.env.width < 2 || cfg.env.height < 2)
            throw ConfigError("config: 'env.width'/'env.height' must be at least 2");
        if (cfg.env.max_blocks < 0) throw ConfigError("config: 'env.max_blocks' must be >= 0");
        if (cfg.env.horizon < 1) throw ConfigError("config: 'env.horizon' must be >= 1");
        if (cfg.env.view_size < 1 || cfg.env.view_size % 2 == 0)
            throw ConfigError("config: 'env.view_size' must be a positive odd number");
    }

    if (top.has("learner")) {
        FieldReader learner(top.raw("learner"), "learner");
        cfg.learner.gae.gamma = learner.optional<double>("gamma", cfg.learner.gae.gamma);
        cfg.learner.gae.lambda = learner.optional<double>("lambda", cfg.learner.gae.lambda);
        cfg.learner.actor_lr = learner.optional<double>("actor_lr", cfg.learner.actor_lr);
        cfg.learner.critic_lr = learner.optional<double>("critic_lr", cfg.learner.critic_lr);
        cfg.learner.entropy_weight =
            learner.optional<double>("entropy_weight", cfg.learner.entropy_weight);
        cfg.learner.clipped_ratio =
            learner.optional<bool>("clipped_ratio", cfg.learner.clipped_ratio);
        cfg.learner.clip_epsilon = learner.optional<double>("clip_epsilon", cfg.learner.clip_epsilon);
        cfg.learner.epochs = learner.optional<int>("epochs", cfg.learner.epochs);
        learner.check_unknown_keys();
        if (!(cfg.learner.gae.gamma > 0.0) || cfg.learner.gae.gamma > 1.0)
            throw ConfigError("config: 'learner.gamma' must lie in (0, 1]");
        require_unit_interval(cfg.learner.gae.lambda, "learner.lambda");
        require_positive(cfg.learner.actor_lr, "learner.actor_lr");
        require_positive(cfg.learner.critic_lr, "learner.critic_lr");
        if (cfg.learner.epochs < 1) throw ConfigError("config: 'learner.epochs' must be >= 1");
    }

    if (top.has("curriculum")) {
        FieldReader cur(top.raw("curriculum"), "curriculum");
        cfg.replay.capacity = cur.optional<int>("capacity", cfg.replay.capacity);
        cfg.replay.p = cur.optional<double>("replay_p", cfg.replay.p);
        cfg.replay.rho = cur.optional<double>("rho", cfg.replay.rho);
        cfg.replay.beta = cur.optional<double>("beta", cfg.replay.beta);
        cur.check_unknown_keys();
        if (cfg.replay.capacity < 1) throw ConfigError("config: 'curriculum.capacity' must be >= 1");
        require_unit_interval(cfg.replay.p, "curriculum.replay_p");
        require_unit_interval(cfg.replay.rho, "curriculum.rho");
        require_positive(cfg.replay.beta, "curriculum.beta");
    }

    if (top.has("diversity")) {
        FieldReader div(top.raw("diversity"), "diversity");
        cfg.diversity.n = div.optional<int>("representatives", cfg.diversity.n);
        cfg.diversity.m_prime = div.optional<int>("subsample", cfg.diversity.m_prime);
        cfg.diversity.zero_norm_epsilon =
            div.optional<double>("zero_norm_epsilon", cfg.diversity.zero_norm_epsilon);
        div.check_unknown_keys();
        if (cfg.diversity.n < 1) throw ConfigError("config: 'diversity.representatives' must be >= 1");
        if (cfg.diversity.m_prime <= cfg.diversity.n)
            throw ConfigError("config: 'diversity.subsample' must exceed 'diversity.representatives'");
    }

    cfg.strategy = strategy_from_name(top.optional<std::string>("strategy", "divsp"));
    cfg.episodes_per_eval = top.optional<int>("episodes_per_eval", cfg.episodes_per_eval);
    cfg.generator_lr = top.optional<double>("generator_lr", cfg.generator_lr);
    cfg.use_gae_regret = top.optional<bool>("use_gae_regret", cfg.use_gae_regret);
    cfg.total_env_steps = top.optional<std::uint64_t>("total_env_steps", cfg.total_env_steps);
    cfg.max_iterations = top.optional<std::uint64_t>("max_iterations", cfg.max_iterations);
    cfg.seed = top.required<std::uint64_t>("seed");
    cfg.eval_interval = top.optional<int>("eval_interval", cfg.eval_interval);
    cfg.eval_episodes = top.optional<int>("eval_episodes", cfg.eval_episodes);
    cfg.eval_suite_path = top.optional<std::string>("eval_suite_path", cfg.eval_suite_path);
    cfg.output_dir = top.optional<std::string>("output_dir", cfg.output_dir);
    top.check_unknown_keys();

    if (cfg.episodes_per_eval < 1)
        throw ConfigError("config: 'episodes_per_eval' must be >= 1");
    require_positive(cfg.generator_lr, "generator_lr");
    if (cfg.eval_interval < 0) throw ConfigError("config: 'eval_interval' must be >= 0");
    if (cfg.eval_episodes < 1) throw ConfigError("config: 'eval_episodes' must be >= 1");

    // The replacement rule follows the strategy; PLR also pins rho to 0 so
    // its replay distribution is learning potential only.
    if (cfg.strategy == StrategyKind::kPLR) {
        cfg.replay.replacement = ReplacementRule::kMinGae;
        cfg.replay.rho = 0.0;
    } else {
        cfg.replay.replacement = ReplacementRule::kDiversity;
    }
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_experiment_config(buffer.str());
}

std::string experiment_config_to_json(const ExperimentConfig& cfg) {
    json root;
    root["env"] = {{"width", cfg.env.width},
                   {"height", cfg.env.height},
                   {"max_blocks", cfg.env.max_blocks},
                   {"horizon", cfg.env.horizon},
                   {"view_size", cfg.env.view_size}};
    root["learner"] = {{"gamma", cfg.learner.gae.gamma},
                       {"lambda", cfg.learner.gae.lambda},
                       {"actor_lr", cfg.learner.actor_lr},
                       {"critic_lr", cfg.learner.critic_lr},
                       {"entropy_weight", cfg.learner.entropy_weight},
                       {"clipped_ratio", cfg.learner.clipped_ratio},
                       {"clip_epsilon", cfg.learner.clip_epsilon},
                       {"epochs", cfg.learner.epochs}};
    root["curriculum"] = {{"capacity", cfg.replay.capacity},
                          {"replay_p", cfg.replay.p},
                          {"rho", cfg.replay.rho},
                          {"beta", cfg.replay.beta}};
    root["diversity"] = {{"representatives", cfg.diversity.n},
                         {"subsample", cfg.diversity.m_prime},
                         {"zero_norm_epsilon", cfg.diversity.zero_norm_epsilon}};
    root["strategy"] = strategy_name(cfg.strategy);
    root["episodes_per_eval"] = cfg.episodes_per_eval;
    root["generator_lr"] = cfg.generator_lr;
    root["use_gae_regret"] = cfg.use_gae_regret;
    root["total_env_steps"] = cfg.total_env_steps;
    root["max_iterations"] = cfg.max_iterations;
    root["seed"] = cfg.seed;
    root["eval_interval"] = cfg.eval_interval;
    root["eval_episodes"] = cfg.eval_episodes;
    root["eval_suite_path"] = cfg.eval_suite_path;
    root["output_dir"] = cfg.output_dir;
    return root.dump(2) + "\n";
}

}  // namespace divsp
