#include "divsp/snapshots.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace divsp {

namespace {

using nlohmann::json;

constexpr int kPolicyFormatVersion = 1;
constexpr int kBufferFormatVersion = 1;

json parse_or_throw(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string(what) + ": invalid JSON: " + e.what());
    }
}

std::string slurp(const std::string& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(std::string(what) + ": cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void spit(const std::string& path, const std::string& text, const char* what) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError(std::string(what) + ": cannot open '" + path + "' for writing");
    out << text;
}

template <typename T>
T field(const json& obj, const char* key, const char* what) {
    if (!obj.contains(key))
        throw ParseError(std::string(what) + ": missing field '" + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ParseError(std::string(what) + ": field '" + key + "' has the wrong type");
    }
}

json level_to_json(const LevelParams& level) {
    return {{"family_id", level.family_id}, {"encoding", level.encoding}, {"seed", level.seed}};
}

LevelParams level_from_json(const json& obj, const char* what) {
    LevelParams level;
    level.family_id = field<std::string>(obj, "family_id", what);
    level.encoding = field<std::vector<int>>(obj, "encoding", what);
    level.seed = field<std::uint64_t>(obj, "seed", what);
    return level;
}

}  // namespace

std::string policy_snapshot_to_json(const PolicySnapshot& snapshot) {
    json root;
    root["format_version"] = kPolicyFormatVersion;
    root["family_id"] = snapshot.family_id;
    root["obs_dim"] = snapshot.params.obs_dim;
    root["num_actions"] = snapshot.params.num_actions;
    root["version"] = snapshot.params.version;
    root["actor"] = snapshot.params.actor;
    root["critic"] = snapshot.params.critic;
    return root.dump(2) + "\n";
}

PolicySnapshot policy_snapshot_from_json(const std::string& text) {
    const json root = parse_or_throw(text, "policy snapshot");
    const char* what = "policy snapshot";
    if (field<int>(root, "format_version", what) != kPolicyFormatVersion)
        throw ParseError("policy snapshot: unsupported format_version");
    PolicySnapshot snapshot;
    snapshot.family_id = field<std::string>(root, "family_id", what);
    snapshot.params.obs_dim = field<int>(root, "obs_dim", what);
    snapshot.params.num_actions = field<int>(root, "num_actions", what);
    snapshot.params.version = field<std::uint64_t>(root, "version", what);
    snapshot.params.actor = field<std::vector<double>>(root, "actor", what);
    snapshot.params.critic = field<std::vector<double>>(root, "critic", what);
    const std::size_t expected_actor = static_cast<std::size_t>(snapshot.params.num_actions) *
                                       static_cast<std::size_t>(snapshot.params.obs_dim);
    if (snapshot.params.actor.size() != expected_actor ||
        snapshot.params.critic.size() != static_cast<std::size_t>(snapshot.params.obs_dim))
        throw ParseError("policy snapshot: weight array sizes do not match the header");
    return snapshot;
}

void save_policy_snapshot(const std::string& path, const PolicySnapshot& snapshot) {
    spit(path, policy_snapshot_to_json(snapshot), "policy snapshot");
}

PolicySnapshot load_policy_snapshot(const std::string& path) {
    return policy_snapshot_from_json(slurp(path, "policy snapshot"));
}

BufferSnapshot buffer_snapshot_of(const LevelBuffer& buffer) {
    BufferSnapshot snapshot;
    snapshot.config = buffer.config();
    snapshot.entries.assign(buffer.entries().begin(), buffer.entries().end());
    snapshot.next_insert_seq = buffer.next_insert_seq();
    return snapshot;
}

LevelBuffer buffer_from_snapshot(const BufferSnapshot& snapshot) {
    return LevelBuffer::restore(snapshot.config, snapshot.entries, snapshot.next_insert_seq);
}

std::string buffer_snapshot_to_json(const BufferSnapshot& snapshot) {
    json root;
    root["format_version"] = kBufferFormatVersion;
    root["config"] = {
        {"capacity", snapshot.config.capacity},
        {"replay_p", snapshot.config.p},
        {"rho", snapshot.config.rho},
        {"beta", snapshot.config.beta},
        {"replacement",
         snapshot.config.replacement == ReplacementRule::kDiversity ? "diversity" : "min_gae"}};
    root["next_insert_seq"] = snapshot.next_insert_seq;
    json entries = json::array();
    for (const BufferEntry& entry : snapshot.entries) {
        json e;
        e["level_id"] = entry.level_id;
        e["level"] = level_to_json(entry.level);
        e["representatives"] = entry.reps.vectors;
        e["gae_score"] = entry.gae_score;
        e["div_score"] = entry.div_score;
        e["visits"] = entry.visits;
        e["last_iteration"] = entry.last_iteration;
        e["insert_seq"] = entry.insert_seq;
        entries.push_back(std::move(e));
    }
    root["entries"] = std::move(entries);
    return root.dump(2) + "\n";
}

BufferSnapshot buffer_snapshot_from_json(const std::string& text) {
    const json root = parse_or_throw(text, "buffer snapshot");
    const char* what = "buffer snapshot";
    if (field<int>(root, "format_version", what) != kBufferFormatVersion)
        throw ParseError("buffer snapshot: unsupported format_version");

    BufferSnapshot snapshot;
    const json cfg = field<json>(root, "config", what);
    snapshot.config.capacity = field<int>(cfg, "capacity", what);
    snapshot.config.p = field<double>(cfg, "replay_p", what);
    snapshot.config.rho = field<double>(cfg, "rho", what);
    snapshot.config.beta = field<double>(cfg, "beta", what);
    const std::string rule = field<std::string>(cfg, "replacement", what);
    if (rule == "diversity")
        snapshot.config.replacement = ReplacementRule::kDiversity;
    else if (rule == "min_gae")
        snapshot.config.replacement = ReplacementRule::kMinGae;
    else
        throw ParseError("buffer snapshot: unknown replacement rule '" + rule + "'");
    snapshot.next_insert_seq = field<std::uint64_t>(root, "next_insert_seq", what);

    for (const json& e : field<json>(root, "entries", what)) {
        BufferEntry entry;
        entry.level_id = field<std::uint64_t>(e, "level_id", what);
        entry.level = level_from_json(field<json>(e, "level", what), what);
        entry.reps.level_ref = entry.level_id;
        entry.reps.vectors = field<std::vector<std::vector<double>>>(e, "representatives", what);
        entry.gae_score = field<double>(e, "gae_score", what);
        entry.div_score = field<double>(e, "div_score", what);
        entry.visits = field<std::uint64_t>(e, "visits", what);
        entry.last_iteration = field<std::uint64_t>(e, "last_iteration", what);
        entry.insert_seq = field<std::uint64_t>(e, "insert_seq", what);
        snapshot.entries.push_back(std::move(entry));
    }
    return snapshot;
}

void save_buffer_snapshot(const std::string& path, const BufferSnapshot& snapshot) {
    spit(path, buffer_snapshot_to_json(snapshot), "buffer snapshot");
}

BufferSnapshot load_buffer_snapshot(const std::string& path) {
    return buffer_snapshot_from_json(slurp(path, "buffer snapshot"));
}

}  // namespace divsp
