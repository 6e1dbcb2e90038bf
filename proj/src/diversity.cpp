#include "divsp/diversity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "divsp/errors.hpp"

namespace divsp {

double cosine_kernel(std::span<const double> a, std::span<const double> b,
                     double zero_norm_epsilon) {
    if (a.size() != b.size()) throw ConfigError("cosine_kernel: dimension mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    na = std::sqrt(na);
    nb = std::sqrt(nb);
    const bool a_zero = na < zero_norm_epsilon;
    const bool b_zero = nb < zero_norm_epsilon;
    if (a_zero && b_zero) return 1.0;
    if (a_zero || b_zero) return 0.0;
    return dot / (na * nb);
}

double rep_score(const std::vector<std::vector<double>>& S,
                 const std::vector<std::vector<double>>& O) {
    if (S.empty()) throw PreconditionError("rep_score: empty representative set");
    if (O.empty()) throw PreconditionError("rep_score: empty observation set");
    double total = 0.0;
    for (const auto& o : O) {
        double best = -2.0;
        for (const auto& s : S) best = std::max(best, cosine_kernel(o, s));
        total += best;
    }
    return total;
}

double marginal_gain(std::span<const double> o, const std::vector<std::vector<double>>& S,
                     const std::vector<std::vector<double>>& O) {
    std::vector<std::vector<double>> extended = S;
    extended.emplace_back(o.begin(), o.end());
    if (S.empty()) return rep_score(extended, O);
    return rep_score(extended, O) - rep_score(S, O);
}

RepresentativeSet greedy_select(const std::vector<std::vector<double>>& pool, int n,
                                std::uint64_t level_ref) {
    RepresentativeSet reps;
    reps.level_ref = level_ref;
    if (pool.empty()) throw PreconditionError("greedy_select: empty candidate pool");

    const std::size_t m = pool.size();
    const std::size_t target = std::min<std::size_t>(static_cast<std::size_t>(std::max(n, 0)), m);

    // Kernel matrix once; each greedy round then only scans best-match
    // columns, which keeps a full selection at O(m^2 d + n m^2).
    std::vector<std::vector<double>> kernel(m, std::vector<double>(m));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j <= i; ++j)
            kernel[i][j] = kernel[j][i] = cosine_kernel(pool[i], pool[j]);

    std::vector<double> best_match(m, 0.0);  // max kernel vs selected set, valid once non-empty
    std::vector<char> chosen(m, 0);
    for (std::size_t round = 0; round < target; ++round) {
        int best_candidate = -1;
        double best_gain = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < m; ++c) {
            if (chosen[c]) continue;
            double gain = 0.0;
            if (round == 0) {
                // Empty-set baseline: the gain is the raw representative score.
                for (std::size_t i = 0; i < m; ++i) gain += kernel[c][i];
            } else {
                for (std::size_t i = 0; i < m; ++i)
                    gain += std::max(best_match[i], kernel[c][i]) - best_match[i];
            }
            if (gain > best_gain) {
                best_gain = gain;
                best_candidate = static_cast<int>(c);
            }
        }
        if (round == 0) {
            for (std::size_t i = 0; i < m; ++i) best_match[i] = kernel[best_candidate][i];
        } else {
            for (std::size_t i = 0; i < m; ++i)
                best_match[i] = std::max(best_match[i], kernel[best_candidate][i]);
        }
        chosen[best_candidate] = 1;
        reps.vectors.push_back(pool[best_candidate]);
    }
    return reps;
}

std::vector<std::vector<double>> uniform_subsample(const std::vector<std::vector<double>>& pool,
                                                   std::size_t count, Rng& rng) {
    const std::size_t m = pool.size();
    const std::size_t take = std::min(count, m);

    // Partial Fisher-Yates gives a uniform subsample without replacement.
    std::vector<std::size_t> indices(m);
    std::iota(indices.begin(), indices.end(), 0);
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j =
            i + static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(m - i) - 1));
        std::swap(indices[i], indices[j]);
    }
    std::vector<std::vector<double>> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back(pool[indices[i]]);
    return out;
}

RepresentativeSet select_representatives(const std::vector<std::vector<double>>& observations,
                                         const DiversityConfig& cfg, Rng& rng,
                                         std::uint64_t level_ref) {
    if (observations.empty())
        throw PreconditionError("select_representatives: no observations");
    const std::vector<std::vector<double>> subsample =
        uniform_subsample(observations, static_cast<std::size_t>(cfg.m_prime), rng);
    return greedy_select(subsample, cfg.n, level_ref);
}

double level_div_score(const RepresentativeSet& target,
                       std::span<const RepresentativeSet> others) {
    if (target.vectors.empty()) throw PreconditionError("level_div_score: empty target set");
    std::size_t pool_size = 0;
    for (const RepresentativeSet& s : others) pool_size += s.vectors.size();
    if (others.empty() || pool_size == 0)
        throw PreconditionError("level_div_score: empty comparison pool");

    double total = 0.0;
    for (const auto& v : target.vectors) {
        double best = -2.0;
        for (const RepresentativeSet& s : others)
            for (const auto& other : s.vectors) best = std::max(best, cosine_kernel(v, other));
        total += best;
    }
    return total;
}

double buffer_div_score(std::span<const RepresentativeSet> sets) {
    if (sets.size() < 2) throw PreconditionError("buffer_div_score: fewer than two sets");
    double total = 0.0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        std::vector<RepresentativeSet> rest;
        rest.reserve(sets.size() - 1);
        for (std::size_t j = 0; j < sets.size(); ++j)
            if (j != i) rest.push_back(sets[j]);
        total += level_div_score(sets[i], rest);
    }
    return total;
}

}  // namespace divsp
