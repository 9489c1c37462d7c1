#include "pqrank/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "pqrank/inverted_index.hpp"
#include "pqrank/scoring.hpp"

namespace pqrank {

namespace {

using clock_type = std::chrono::steady_clock;

std::string g6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string mode_label(Method m, const BenchOptions& opt) {
    if (m != Method::prune) {
        return "-";
    }
    switch (opt.mode) {
        case PruneMode::safe:
            return "safe";
        case PruneMode::max_iterations:
            return "maxiter:" + std::to_string(opt.iteration_limit);
        case PruneMode::inflated_threshold:
            return "inflate:" + g6(opt.inflation);
    }
    return "?";
}

// One full scoring request: sub-score precomputation (where the method uses
// it), scoring and top-k selection. The caller owns the timer.
ScoringStats run_query(const Codebook& cb, const InvertedIndexes* inv,
                       std::span<const float> query, Method m,
                       std::uint32_t k, const PruneConfig& cfg) {
    ScoringStats st;
    switch (m) {
        case Method::dense:
            dense_topk(cb, query, k, &st);
            break;
        case Method::pqtopk: {
            const SubScoreMatrix s = precompute_sub_scores(cb, query);
            pqtopk(cb, s, k, &st);
            break;
        }
        case Method::prune: {
            const SubScoreMatrix s = precompute_sub_scores(cb, query);
            st = pruned_topk(cb, *inv, s, cfg).stats;
            break;
        }
    }
    return st;
}

double throughput_pass(const SyntheticWorkload& w, const InvertedIndexes* inv,
                       Method m, const BenchOptions& opt,
                       const PruneConfig& cfg) {
    std::vector<std::thread> pool;
    pool.reserve(opt.threads);
    const auto t0 = clock_type::now();
    for (std::uint32_t t = 0; t < opt.threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::uint32_t j = t; j < opt.num_queries; j += opt.threads) {
                run_query(w.codebook, inv, w.query(j % w.num_queries), m,
                          opt.k, cfg);
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    const double secs =
        std::chrono::duration<double>(clock_type::now() - t0).count();
    return secs > 0.0 ? opt.num_queries / secs : 0.0;
}

BenchRow run_method(const SyntheticWorkload& w, const InvertedIndexes* inv,
                    Method m, const BenchOptions& opt) {
    const Codebook& cb = w.codebook;
    const PruneConfig cfg = opt.prune_config();
    if (m == Method::prune) {
        cfg.validate();
    }

    std::vector<double> times;
    std::vector<double> iters;
    times.reserve(opt.num_queries);
    iters.reserve(opt.num_queries);
    double sum_total = 0.0;
    double sum_unique = 0.0;
    std::uint64_t iters_max = 0;
    const std::uint32_t runs = opt.warmup + opt.num_queries;
    for (std::uint32_t j = 0; j < runs; ++j) {
        const auto query = w.query(j % w.num_queries);
        const auto t0 = clock_type::now();
        const ScoringStats st = run_query(cb, inv, query, m, opt.k, cfg);
        const auto t1 = clock_type::now();
        if (j < opt.warmup) {
            continue;
        }
        times.push_back(
            std::chrono::duration<double, std::milli>(t1 - t0).count());
        iters.push_back(static_cast<double>(st.iterations));
        iters_max = std::max(iters_max, st.iterations);
        sum_total += static_cast<double>(st.items_scored_total);
        sum_unique += static_cast<double>(st.items_scored_unique);
    }

    BenchRow row;
    row.method = method_name(m);
    row.k = opt.k;
    row.batch_size = m == Method::prune ? opt.batch_size : 0;
    row.mode = mode_label(m, opt);
    row.queries = opt.num_queries;
    row.median_ms = percentile_nearest_rank(times, 50.0);
    row.p95_ms = percentile_nearest_rank(times, 95.0);
    const double denom = static_cast<double>(opt.num_queries) * cb.num_items;
    row.mean_items_total_pct = 100.0 * sum_total / denom;
    row.mean_items_unique_pct = 100.0 * sum_unique / denom;
    row.iters_p50 = percentile_nearest_rank(iters, 50.0);
    row.iters_p95 = percentile_nearest_rank(iters, 95.0);
    row.iters_max = iters_max;
    if (opt.threads > 1) {
        row.throughput_qps = throughput_pass(w, inv, m, opt, cfg);
    }
    return row;
}

bool wants_prune(const std::vector<Method>& methods) {
    return std::find(methods.begin(), methods.end(), Method::prune) !=
           methods.end();
}

}  // namespace

std::string method_name(Method m) {
    switch (m) {
        case Method::dense:
            return "dense";
        case Method::pqtopk:
            return "pqtopk";
        case Method::prune:
            return "prune";
    }
    return "?";
}

double percentile_nearest_rank(std::vector<double> samples, double pct) {
    if (samples.empty()) {
        throw std::invalid_argument("percentile of an empty sample set");
    }
    if (!(pct > 0.0 && pct <= 100.0)) {
        throw std::invalid_argument("percentile must be in (0, 100]");
    }
    std::sort(samples.begin(), samples.end());
    const auto n = static_cast<double>(samples.size());
    auto rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * n));
    rank = std::clamp<std::size_t>(rank, 1, samples.size());
    return samples[rank - 1];
}

BenchReport bench_methods(const SyntheticWorkload& w, const BenchOptions& opt) {
    w.codebook.validate();
    if (w.num_queries == 0 ||
        w.queries.size() !=
            static_cast<std::size_t>(w.num_queries) * w.codebook.dim) {
        throw std::invalid_argument("bench: workload without usable queries");
    }
    if (opt.num_queries == 0) {
        throw std::invalid_argument("bench: num_queries must be >= 1");
    }
    if (opt.methods.empty()) {
        throw std::invalid_argument("bench: no methods requested");
    }
    InvertedIndexes inv;
    if (wants_prune(opt.methods)) {
        inv = build_inverted_indexes(w.codebook);
    }
    BenchReport report;
    for (const Method m : opt.methods) {
        report.rows.push_back(run_method(w, &inv, m, opt));
    }
    return report;
}

BenchReport sweep_cutoff(const SyntheticWorkload& w,
                         const std::vector<std::uint32_t>& ks,
                         BenchOptions base) {
    if (ks.empty()) {
        throw std::invalid_argument("sweep_cutoff: empty cutoff list");
    }
    base.methods = {Method::pqtopk, Method::prune};
    BenchReport report;
    for (const std::uint32_t k : ks) {
        base.k = k;
        const BenchReport one = bench_methods(w, base);
        report.rows.insert(report.rows.end(), one.rows.begin(), one.rows.end());
    }
    return report;
}

BenchReport sweep_batch(const SyntheticWorkload& w,
                        const std::vector<std::uint32_t>& batch_sizes,
                        BenchOptions base) {
    if (batch_sizes.empty()) {
        throw std::invalid_argument("sweep_batch: empty batch size list");
    }
    base.methods = {Method::pqtopk};
    BenchReport report = bench_methods(w, base);
    base.methods = {Method::prune};
    for (const std::uint32_t bs : batch_sizes) {
        base.batch_size = bs;
        const BenchReport one = bench_methods(w, base);
        report.rows.insert(report.rows.end(), one.rows.begin(), one.rows.end());
    }
    return report;
}

HeatmapSummary export_heatmap(const SyntheticWorkload& w,
                              std::uint32_t query_index, std::ostream& out,
                              std::uint32_t k, std::uint32_t batch_size) {
    w.codebook.validate();
    if (query_index >= w.num_queries) {
        throw std::invalid_argument("export_heatmap: query index out of range");
    }
    const SubScoreMatrix s =
        precompute_sub_scores(w.codebook, w.query(query_index));
    const auto sorted = sort_subids_by_score(s);
    out << "split,rank,subid,score\n";
    for (std::uint32_t m = 0; m < s.num_splits; ++m) {
        for (std::uint32_t r = 0; r < s.num_subids; ++r) {
            const sub_id b = sorted[m][r];
            out << m << ',' << r << ',' << b << ',' << g6(s.at(m, b)) << '\n';
        }
    }

    const InvertedIndexes inv = build_inverted_indexes(w.codebook);
    const PruneResult res =
        pruned_topk(w.codebook, inv, s, PruneConfig::safe(k, batch_size));
    HeatmapSummary summary;
    summary.iterations = res.stats.iterations;
    summary.items_scored_total = res.stats.items_scored_total;
    summary.items_scored_unique = res.stats.items_scored_unique;
    summary.items_total_pct = 100.0 *
                              static_cast<double>(res.stats.items_scored_total) /
                              w.codebook.num_items;
    if (summary.iterations <= 3) {
        summary.difficulty = "fast";
    } else if (summary.iterations >= 20 || summary.items_total_pct >= 100.0) {
        summary.difficulty = "slow";
    } else {
        summary.difficulty = "average";
    }
    return summary;
}

void write_csv(const BenchReport& report, std::ostream& out) {
    out << "method,k,bs,mode,queries,median_ms,p95_ms,items_total_pct,"
           "items_unique_pct,iters_p50,iters_p95,iters_max,throughput_qps\n";
    for (const BenchRow& r : report.rows) {
        out << r.method << ',' << r.k << ',' << r.batch_size << ',' << r.mode
            << ',' << r.queries << ',' << g6(r.median_ms) << ','
            << g6(r.p95_ms) << ',' << g6(r.mean_items_total_pct) << ','
            << g6(r.mean_items_unique_pct) << ',' << g6(r.iters_p50) << ','
            << g6(r.iters_p95) << ',' << r.iters_max << ','
            << g6(r.throughput_qps) << '\n';
    }
}

}  // namespace pqrank
