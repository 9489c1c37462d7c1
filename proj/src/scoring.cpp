#include "pqrank/scoring.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "pqrank/topk.hpp"

namespace pqrank {

float dot_product(std::span<const float> a, std::span<const float> b) {
    const std::size_t n = a.size();
    const float* x = a.data();
    const float* y = b.data();
    float lane[8] = {0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 0.f};
    const std::size_t main = n & ~std::size_t{7};
    for (std::size_t i = 0; i < main; i += 8) {
        for (std::size_t l = 0; l < 8; ++l) {
            lane[l] += x[i + l] * y[i + l];
        }
    }
    float tail = 0.f;
    for (std::size_t i = main; i < n; ++i) {
        tail += x[i] * y[i];
    }
    return (((lane[0] + lane[1]) + (lane[2] + lane[3])) +
            ((lane[4] + lane[5]) + (lane[6] + lane[7]))) +
           tail;
}

SubScoreMatrix precompute_sub_scores(const Codebook& cb,
                                     std::span<const float> seq_embedding) {
    if (seq_embedding.size() != cb.dim) {
        throw std::invalid_argument(
            "precompute_sub_scores: sequence embedding length != codebook dim");
    }
    const std::uint32_t sub_dim = cb.sub_dim();
    SubScoreMatrix s;
    s.num_splits = cb.num_splits;
    s.num_subids = cb.num_subids;
    s.scores.resize(static_cast<std::size_t>(cb.num_splits) * cb.num_subids);
    for (std::uint32_t m = 0; m < cb.num_splits; ++m) {
        const auto phi_m = seq_embedding.subspan(
            static_cast<std::size_t>(m) * sub_dim, sub_dim);
        float* out = s.scores.data() + static_cast<std::size_t>(m) * cb.num_subids;
        for (std::uint32_t b = 0; b < cb.num_subids; ++b) {
            out[b] = dot_product(cb.sub_embedding(m, static_cast<sub_id>(b)), phi_m);
        }
    }
    return s;
}

namespace {

void fill_exhaustive_stats(ScoringStats* stats, std::uint64_t scored,
                           std::chrono::steady_clock::time_point t0) {
    if (stats == nullptr) {
        return;
    }
    stats->iterations = 1;
    stats->items_scored_total = scored;
    stats->items_scored_unique = scored;
    stats->elapsed = std::chrono::steady_clock::now() - t0;
}

}  // namespace

TopKResult dense_topk(const Codebook& cb, std::span<const float> seq_embedding,
                      std::uint32_t k, ScoringStats* stats) {
    if (seq_embedding.size() != cb.dim) {
        throw std::invalid_argument(
            "dense_topk: sequence embedding length != codebook dim");
    }
    if (k == 0) {
        throw std::invalid_argument("dense_topk: k must be >= 1");
    }
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint32_t sub_dim = cb.sub_dim();
    TopKAccumulator acc(k);
    for (item_id i = 0; i < cb.num_items; ++i) {
        const auto codes = cb.codes(i);
        float score = 0.f;
        for (std::uint32_t m = 0; m < cb.num_splits; ++m) {
            score += dot_product(
                cb.sub_embedding(m, codes[m]),
                seq_embedding.subspan(static_cast<std::size_t>(m) * sub_dim, sub_dim));
        }
        acc.push(i, score);
    }
    fill_exhaustive_stats(stats, cb.num_items, t0);
    return acc.take();
}

TopKResult pqtopk(const Codebook& cb, const SubScoreMatrix& s, std::uint32_t k,
                  ScoringStats* stats) {
    if (s.num_splits != cb.num_splits || s.num_subids != cb.num_subids) {
        throw std::invalid_argument("pqtopk: sub-score matrix shape mismatch");
    }
    if (k == 0) {
        throw std::invalid_argument("pqtopk: k must be >= 1");
    }
    const auto t0 = std::chrono::steady_clock::now();
    TopKAccumulator acc(k);
    for (item_id i = 0; i < cb.num_items; ++i) {
        acc.push(i, item_score(cb, s, i));
    }
    fill_exhaustive_stats(stats, cb.num_items, t0);
    return acc.take();
}

TopKResult pqtopk(const Codebook& cb, const SubScoreMatrix& s, std::uint32_t k,
                  std::span<const item_id> subset, ScoringStats* stats) {
    if (s.num_splits != cb.num_splits || s.num_subids != cb.num_subids) {
        throw std::invalid_argument("pqtopk: sub-score matrix shape mismatch");
    }
    if (k == 0) {
        throw std::invalid_argument("pqtopk: k must be >= 1");
    }
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<item_id> unique(subset.begin(), subset.end());
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    if (!unique.empty() && unique.back() >= cb.num_items) {
        throw std::invalid_argument("pqtopk: subset item id out of range");
    }
    TopKAccumulator acc(k);
    for (item_id i : unique) {
        acc.push(i, item_score(cb, s, i));
    }
    fill_exhaustive_stats(stats, unique.size(), t0);
    return acc.take();
}

}  // namespace pqrank
