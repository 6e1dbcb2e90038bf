#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "divsp/rng.hpp"

namespace divsp {

// The n observed-state vectors chosen to summarize one level.
struct RepresentativeSet {
    std::uint64_t level_ref = 0;
    std::vector<std::vector<double>> vectors;
};

struct DiversityConfig {
    int n = 8;           // representative capacity
    int m_prime = 64;    // uniform subsample size, n < m_prime
    double zero_norm_epsilon = 1e-9;
};

// Cosine similarity. Two near-zero vectors compare equal (1); a near-zero
// vector against anything else compares orthogonal (0).
double cosine_kernel(std::span<const double> a, std::span<const double> b,
                     double zero_norm_epsilon = 1e-9);

// Representative score: sum over O of the best-match kernel value against S.
double rep_score(const std::vector<std::vector<double>>& S,
                 const std::vector<std::vector<double>>& O);

// Marginal gain of adding o to S, evaluated against O. Empty S yields
// rep_score({o}, O).
double marginal_gain(std::span<const double> o, const std::vector<std::vector<double>>& S,
                     const std::vector<std::vector<double>>& O);

// Greedy argmax-gain selection of cfg.n vectors out of the candidate pool,
// ties broken by lowest index. Always fills to n when enough candidates
// exist; there is no positive-gain early stop, so set sizes stay comparable.
RepresentativeSet greedy_select(const std::vector<std::vector<double>>& pool, int n,
                                std::uint64_t level_ref);

// Uniform subsample of min(count, |pool|) vectors without replacement.
std::vector<std::vector<double>> uniform_subsample(const std::vector<std::vector<double>>& pool,
                                                   std::size_t count, Rng& rng);

// Two-step heuristic: uniformly subsample O' of size min(m_prime, |O|),
// then greedy-select n representatives from it.
RepresentativeSet select_representatives(const std::vector<std::vector<double>>& observations,
                                         const DiversityConfig& cfg, Rng& rng,
                                         std::uint64_t level_ref = 0);

// State-aware diversity of `target` against the pooled representative
// vectors of `others`. Higher means more redundant.
double level_div_score(const RepresentativeSet& target,
                       std::span<const RepresentativeSet> others);

// Buffer-wide diversity: sum of each set's score against all the others.
double buffer_div_score(std::span<const RepresentativeSet> sets);

}  // namespace divsp
