#include "pqrank/prune.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "pqrank/topk.hpp"

namespace pqrank {

void PruneConfig::validate() const {
    if (k == 0) {
        throw std::invalid_argument("prune: k must be >= 1");
    }
    if (batch_size == 0) {
        throw std::invalid_argument("prune: batch size must be >= 1");
    }
    if (mode == PruneMode::max_iterations && iteration_limit == 0) {
        throw std::invalid_argument("prune: iteration limit must be >= 1");
    }
    if (mode == PruneMode::inflated_threshold && !(inflation > 1.0f)) {
        throw std::invalid_argument("prune: inflation factor must be > 1");
    }
}

std::vector<std::vector<sub_id>> sort_subids_by_score(const SubScoreMatrix& s) {
    std::vector<std::vector<sub_id>> sorted(s.num_splits);
    for (std::uint32_t m = 0; m < s.num_splits; ++m) {
        auto& order = sorted[m];
        order.resize(s.num_subids);
        std::iota(order.begin(), order.end(), sub_id{0});
        const auto row = s.row(m);
        std::sort(order.begin(), order.end(), [row](sub_id a, sub_id b) {
            if (row[a] != row[b]) {
                return row[a] > row[b];
            }
            return a < b;
        });
    }
    return sorted;
}

float score_upper_bound(const SubScoreMatrix& s,
                        const std::vector<std::vector<sub_id>>& sorted_subids,
                        std::span<const std::uint32_t> positions) {
    float sigma = 0.f;
    for (std::uint32_t m = 0; m < s.num_splits; ++m) {
        if (positions[m] >= s.num_subids) {
            return kNegInf;
        }
        // Same ascending-split association as item_score, so the float
        // bound dominates every unseen item's score bitwise.
        sigma += s.at(m, sorted_subids[m][positions[m]]);
    }
    return sigma;
}

TopKResult merge_topk(const TopKResult& current, const TopKResult& incoming,
                      std::uint32_t k) {
    const auto& a = current.entries;
    const auto& b = incoming.entries;
    TopKResult out;
    out.entries.reserve(std::min<std::size_t>(k, a.size() + b.size()));
    std::size_t i = 0;
    std::size_t j = 0;
    while (out.entries.size() < k && (i < a.size() || j < b.size())) {
        bool from_a;
        if (i == a.size()) {
            from_a = false;
        } else if (j == b.size()) {
            from_a = true;
        } else if (a[i].id == b[j].id) {
            // Same item reached through both lists; equal-score duplicates
            // surface at the heads simultaneously, keep one copy.
            from_a = true;
            ++j;
        } else {
            from_a = ranks_before(a[i], b[j]);
        }
        out.entries.push_back(from_a ? a[i++] : b[j++]);
    }
    return out;
}

PruneResult pruned_topk(const Codebook& cb, const InvertedIndexes& inv,
                        const SubScoreMatrix& s, const PruneConfig& cfg,
                        PruneTrace* trace) {
    cfg.validate();
    if (s.num_splits != cb.num_splits || s.num_subids != cb.num_subids) {
        throw std::invalid_argument("prune: sub-score matrix shape mismatch");
    }
    if (inv.num_items != cb.num_items || inv.num_splits != cb.num_splits ||
        inv.num_subids != cb.num_subids) {
        throw std::invalid_argument("prune: inverted index shape mismatch");
    }
    const auto t0 = std::chrono::steady_clock::now();

    const auto sorted_subids = sort_subids_by_score(s);
    std::vector<std::uint32_t> positions(cb.num_splits, 0);
    float sigma = score_upper_bound(s, sorted_subids, positions);
    if (trace != nullptr) {
        trace->sigma_initial = sigma;
        trace->iterations.clear();
    }

    PruneResult out;
    ScoringStats& stats = out.stats;
    std::vector<char> seen(cb.num_items, 0);
    float theta = kNegInf;

    const auto keep_going = [&] {
        switch (cfg.mode) {
            case PruneMode::safe:
                return sigma > theta;
            case PruneMode::max_iterations:
                return sigma > theta && stats.iterations < cfg.iteration_limit;
            case PruneMode::inflated_threshold:
                return theta > 0.f ? sigma > cfg.inflation * theta
                                   : sigma > theta;
        }
        return false;
    };

    TopKAccumulator acc(cfg.k);
    while (keep_going()) {
        // Split whose best unprocessed sub-id scores highest; ties keep the
        // lowest index. No split can be exhausted here or sigma were -inf.
        std::uint32_t pick = 0;
        float head = s.at(0, sorted_subids[0][positions[0]]);
        for (std::uint32_t m = 1; m < cb.num_splits; ++m) {
            const float h = s.at(m, sorted_subids[m][positions[m]]);
            if (h > head) {
                pick = m;
                head = h;
            }
        }

        const std::uint32_t take =
            std::min(cfg.batch_size, cb.num_subids - positions[pick]);
        PruneIteration rec;
        if (trace != nullptr) {
            rec.split = pick;
            rec.sigma_before = sigma;
            rec.consumed.assign(
                sorted_subids[pick].begin() + positions[pick],
                sorted_subids[pick].begin() + positions[pick] + take);
        }

        std::uint64_t gathered = 0;
        for (std::uint32_t t = 0; t < take; ++t) {
            const sub_id b = sorted_subids[pick][positions[pick] + t];
            for (const item_id i : inv.list(pick, b)) {
                acc.push(i, item_score(cb, s, i));
                ++gathered;
                if (seen[i] == 0) {
                    seen[i] = 1;
                    ++stats.items_scored_unique;
                }
            }
        }
        positions[pick] += take;
        stats.items_scored_total += gathered;
        ++stats.iterations;

        out.topk = merge_topk(out.topk, acc.take(), cfg.k);
        theta = out.topk.threshold(cfg.k);
        sigma = score_upper_bound(s, sorted_subids, positions);

        if (trace != nullptr) {
            rec.sigma_after = sigma;
            rec.theta_after = theta;
            rec.items_scored = gathered;
            trace->iterations.push_back(std::move(rec));
        }
    }

    stats.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(
        std::chrono::steady_clock::now() - t0);
    return out;
}

}  // namespace pqrank
