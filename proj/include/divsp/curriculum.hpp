#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "divsp/core.hpp"
#include "divsp/diversity.hpp"
#include "divsp/rng.hpp"

namespace divsp {

struct BufferEntry {
    LevelParams level;
    std::uint64_t level_id = 0;
    RepresentativeSet reps;
    double gae_score = 0.0;  // learning potential, last visit
    double div_score = 0.0;  // cached state-aware diversity vs the rest of the buffer
    std::uint64_t visits = 0;
    std::uint64_t last_iteration = 0;
    std::uint64_t insert_seq = 0;  // monotone insertion counter, breaks rank ties
};

// How a full buffer decides replacements: state-aware diversity (the
// redundancy rule) or learning potential (PLR's min-score eviction).
enum class ReplacementRule { kDiversity, kMinGae };

struct ReplayConfig {
    int capacity = 32;   // K
    double p = 0.5;      // new-level probability per iteration
    double rho = 0.5;    // diversity weight in the replay mixture
    double beta = 0.3;   // rank-prioritization temperature
    ReplacementRule replacement = ReplacementRule::kDiversity;
};

struct InsertOutcome {
    enum class Kind { kInsertedEmptySlot, kReplaced, kRejected };
    Kind kind = Kind::kRejected;
    std::uint64_t replaced_level_id = 0;  // valid when kind == kReplaced
};

// Rank prioritization: order scores (descending or ascending), rank ties by
// lower tiebreak value first, weight each entry (1/rank)^(1/beta), normalize.
std::vector<double> rank_priorities(std::span<const double> scores, bool descending, double beta,
                                    std::span<const std::uint64_t> tiebreak);

// Element-wise mixture (1-rho) * p_gae + rho * p_div.
std::vector<double> mix_distributions(std::span<const double> p_gae,
                                      std::span<const double> p_div, double rho);

// Replacement decision for a full diversity buffer: evict the argmax-score
// incumbent when the candidate scores strictly lower than the max, ties on
// the max broken by oldest last_iteration. nullopt means reject.
std::optional<std::size_t> pick_eviction(double candidate_score,
                                         std::span<const double> incumbent_scores,
                                         std::span<const std::uint64_t> last_iterations);

// Capacity-K store of levels with cached learning-potential and diversity
// scores. Owned by exactly one training run; snapshots are value copies.
class LevelBuffer {
public:
    explicit LevelBuffer(const ReplayConfig& cfg);

    // Inserts unconditionally while below capacity. At capacity, applies the
    // configured replacement rule; diversity mode compares Eq.-9 style scores
    // with the candidate included in every incumbent's pool. Cached
    // div_scores are refreshed against the post-mutation buffer.
    InsertOutcome try_insert(BufferEntry candidate);

    std::vector<double> gae_priority() const;  // rank 1 = largest F_gae
    std::vector<double> div_priority() const;  // rank 1 = smallest F_div (most distinct)
    std::vector<double> replay_distribution() const;

    // Categorical draw from the replay distribution; bumps the winner's
    // visit count and last_iteration. Returns the level id.
    std::uint64_t sample_level(Rng& rng, std::uint64_t iteration);

    // Re-selects representatives greedily over (old reps + a fresh
    // subsample), overwrites the learning-potential score, and refreshes
    // every cached div_score.
    void update_entry(std::uint64_t level_id, const std::vector<std::vector<double>>& fresh_obs,
                      double new_gae, const DiversityConfig& div_cfg, Rng& rng);

    const BufferEntry& entry_by_id(std::uint64_t level_id) const;
    std::span<const BufferEntry> entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    int capacity() const { return cfg_.capacity; }
    bool full() const { return static_cast<int>(entries_.size()) >= cfg_.capacity; }
    const ReplayConfig& config() const { return cfg_; }

    // Buffer-wide diversity metric; equals the sum of the cached scores.
    std::optional<double> buffer_diversity() const;

    // Restores a snapshot verbatim, cached scores included.
    static LevelBuffer restore(const ReplayConfig& cfg, std::vector<BufferEntry> entries,
                               std::uint64_t next_insert_seq);
    std::uint64_t next_insert_seq() const { return next_insert_seq_; }

private:
    void refresh_div_caches();
    std::size_t index_of(std::uint64_t level_id) const;

    ReplayConfig cfg_;
    std::vector<BufferEntry> entries_;
    std::uint64_t next_insert_seq_ = 0;
};

}  // namespace divsp
