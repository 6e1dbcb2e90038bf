#include "divsp/curriculum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace divsp {

std::vector<double> rank_priorities(std::span<const double> scores, bool descending, double beta,
                                    std::span<const std::uint64_t> tiebreak) {
    if (scores.empty()) throw PreconditionError("rank_priorities: empty buffer");
    if (!(beta > 0.0)) throw PreconditionError("rank_priorities: beta must be positive");
    if (tiebreak.size() != scores.size())
        throw PreconditionError("rank_priorities: tiebreak size mismatch");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return descending ? scores[a] > scores[b] : scores[a] < scores[b];
        return tiebreak[a] < tiebreak[b];
    });

    std::vector<double> weights(scores.size());
    double sum = 0.0;
    for (std::size_t rank = 1; rank <= order.size(); ++rank) {
        const double w = std::pow(1.0 / static_cast<double>(rank), 1.0 / beta);
        weights[order[rank - 1]] = w;
        sum += w;
    }
    for (double& w : weights) w /= sum;
    return weights;
}

std::vector<double> mix_distributions(std::span<const double> p_gae,
                                      std::span<const double> p_div, double rho) {
    if (p_gae.size() != p_div.size())
        throw PreconditionError("mix_distributions: length mismatch");
    std::vector<double> mixed(p_gae.size());
    for (std::size_t i = 0; i < mixed.size(); ++i)
        mixed[i] = (1.0 - rho) * p_gae[i] + rho * p_div[i];
    return mixed;
}

std::optional<std::size_t> pick_eviction(double candidate_score,
                                         std::span<const double> incumbent_scores,
                                         std::span<const std::uint64_t> last_iterations) {
    if (incumbent_scores.empty()) throw PreconditionError("pick_eviction: no incumbents");
    std::size_t argmax = 0;
    for (std::size_t i = 1; i < incumbent_scores.size(); ++i) {
        if (incumbent_scores[i] > incumbent_scores[argmax] ||
            (incumbent_scores[i] == incumbent_scores[argmax] &&
             last_iterations[i] < last_iterations[argmax]))
            argmax = i;
    }
    if (candidate_score < incumbent_scores[argmax]) return argmax;
    return std::nullopt;
}

LevelBuffer::LevelBuffer(const ReplayConfig& cfg) : cfg_(cfg) {
    if (cfg.capacity < 1) throw ConfigError("LevelBuffer: capacity must be at least 1");
}

LevelBuffer LevelBuffer::restore(const ReplayConfig& cfg, std::vector<BufferEntry> entries,
                                 std::uint64_t next_insert_seq) {
    LevelBuffer buffer(cfg);
    if (static_cast<int>(entries.size()) > cfg.capacity)
        throw ConfigError("LevelBuffer::restore: more entries than capacity");
    buffer.entries_ = std::move(entries);
    buffer.next_insert_seq_ = next_insert_seq;
    return buffer;
}

void LevelBuffer::refresh_div_caches() {
    if (entries_.size() < 2) {
        for (BufferEntry& e : entries_) e.div_score = 0.0;
        return;
    }
    std::vector<RepresentativeSet> others;
    others.reserve(entries_.size() - 1);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        others.clear();
        for (std::size_t j = 0; j < entries_.size(); ++j)
            if (j != i) others.push_back(entries_[j].reps);
        entries_[i].div_score = level_div_score(entries_[i].reps, others);
    }
}

InsertOutcome LevelBuffer::try_insert(BufferEntry candidate) {
    if (candidate.reps.vectors.empty())
        throw PreconditionError("try_insert: candidate has no representatives");
    candidate.insert_seq = next_insert_seq_++;

    if (!full()) {
        entries_.push_back(std::move(candidate));
        refresh_div_caches();
        return {InsertOutcome::Kind::kInsertedEmptySlot, 0};
    }

    std::optional<std::size_t> evict;
    if (cfg_.replacement == ReplacementRule::kDiversity) {
        // Scores per Definition 2: every pool includes the candidate, the
        // candidate's own pool is the whole buffer.
        std::vector<double> incumbent_scores(entries_.size());
        std::vector<std::uint64_t> last_iters(entries_.size());
        std::vector<RepresentativeSet> pool;
        pool.reserve(entries_.size());
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            pool.clear();
            pool.push_back(candidate.reps);
            for (std::size_t j = 0; j < entries_.size(); ++j)
                if (j != i) pool.push_back(entries_[j].reps);
            incumbent_scores[i] = level_div_score(entries_[i].reps, pool);
            last_iters[i] = entries_[i].last_iteration;
        }
        pool.clear();
        for (const BufferEntry& e : entries_) pool.push_back(e.reps);
        const double candidate_score = level_div_score(candidate.reps, pool);
        evict = pick_eviction(candidate_score, incumbent_scores, last_iters);
    } else {
        // PLR rule: replace the lowest learning-potential entry when the
        // candidate strictly beats it.
        std::size_t argmin = 0;
        for (std::size_t i = 1; i < entries_.size(); ++i) {
            if (entries_[i].gae_score < entries_[argmin].gae_score ||
                (entries_[i].gae_score == entries_[argmin].gae_score &&
                 entries_[i].last_iteration < entries_[argmin].last_iteration))
                argmin = i;
        }
        if (candidate.gae_score > entries_[argmin].gae_score) evict = argmin;
    }

    if (!evict) return {InsertOutcome::Kind::kRejected, 0};

    const std::uint64_t replaced = entries_[*evict].level_id;
    entries_[*evict] = std::move(candidate);
    refresh_div_caches();
    return {InsertOutcome::Kind::kReplaced, replaced};
}

std::vector<double> LevelBuffer::gae_priority() const {
    std::vector<double> scores(entries_.size());
    std::vector<std::uint64_t> seq(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        scores[i] = entries_[i].gae_score;
        seq[i] = entries_[i].insert_seq;
    }
    return rank_priorities(scores, /*descending=*/true, cfg_.beta, seq);
}

std::vector<double> LevelBuffer::div_priority() const {
    std::vector<double> scores(entries_.size());
    std::vector<std::uint64_t> seq(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        scores[i] = entries_[i].div_score;
        seq[i] = entries_[i].insert_seq;
    }
    return rank_priorities(scores, /*descending=*/false, cfg_.beta, seq);
}

std::vector<double> LevelBuffer::replay_distribution() const {
    return mix_distributions(gae_priority(), div_priority(), cfg_.rho);
}

std::uint64_t LevelBuffer::sample_level(Rng& rng, std::uint64_t iteration) {
    if (entries_.empty()) throw PreconditionError("sample_level: empty buffer");
    const std::vector<double> dist = replay_distribution();
    const int slot = rng.categorical(dist);
    BufferEntry& entry = entries_[static_cast<std::size_t>(slot)];
    ++entry.visits;
    entry.last_iteration = iteration;
    return entry.level_id;
}

std::size_t LevelBuffer::index_of(std::uint64_t level_id) const {
    for (std::size_t i = 0; i < entries_.size(); ++i)
        if (entries_[i].level_id == level_id) return i;
    throw LookupError("LevelBuffer: unknown level id " + std::to_string(level_id));
}

const BufferEntry& LevelBuffer::entry_by_id(std::uint64_t level_id) const {
    return entries_[index_of(level_id)];
}

void LevelBuffer::update_entry(std::uint64_t level_id,
                               const std::vector<std::vector<double>>& fresh_obs, double new_gae,
                               const DiversityConfig& div_cfg, Rng& rng) {
    BufferEntry& entry = entries_[index_of(level_id)];

    // Old representatives stay ahead of the fresh subsample so greedy
    // tie-breaks keep an unchanged level's selection stable.
    std::vector<std::vector<double>> pool = entry.reps.vectors;
    if (!fresh_obs.empty()) {
        for (auto& v :
             uniform_subsample(fresh_obs, static_cast<std::size_t>(div_cfg.m_prime), rng))
            pool.push_back(std::move(v));
    }

    entry.reps = greedy_select(pool, div_cfg.n, entry.level_id);
    entry.gae_score = new_gae;
    refresh_div_caches();
}

std::optional<double> LevelBuffer::buffer_diversity() const {
    if (entries_.size() < 2) return std::nullopt;
    double total = 0.0;
    for (const BufferEntry& e : entries_) total += e.div_score;
    return total;
}

}  // namespace divsp
