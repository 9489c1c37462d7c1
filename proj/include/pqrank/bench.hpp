#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pqrank/builder.hpp"
#include "pqrank/prune.hpp"

namespace pqrank {

enum class Method { dense, pqtopk, prune };

std::string method_name(Method m);

struct BenchOptions {
    std::vector<Method> methods = {Method::dense, Method::pqtopk, Method::prune};
    std::uint32_t k = 10;
    std::uint32_t batch_size = 8;
    PruneMode mode = PruneMode::safe;
    std::uint64_t iteration_limit = 0;
    float inflation = 1.0f;
    // Measured queries per method; the workload's query stream is reused
    // round-robin when it is shorter than warmup + num_queries.
    std::uint32_t num_queries = 100;
    std::uint32_t warmup = 10;  // leading queries discarded per method
    // When > 1, an extra pass per method runs this many concurrent request
    // threads over the shared structures and reports throughput.
    std::uint32_t threads = 1;

    PruneConfig prune_config() const {
        PruneConfig cfg{k, batch_size, mode, iteration_limit, inflation};
        return cfg;
    }
};

struct BenchRow {
    std::string method;
    std::uint32_t k = 0;
    std::uint32_t batch_size = 0;  // 0 when not applicable
    std::string mode;
    std::uint32_t queries = 0;
    double median_ms = 0.0;
    double p95_ms = 0.0;
    double mean_items_total_pct = 0.0;   // scored items incl. repeats, % of |I|
    double mean_items_unique_pct = 0.0;  // distinct scored items, % of |I|
    double iters_p50 = 0.0;
    double iters_p95 = 0.0;
    std::uint64_t iters_max = 0;
    double throughput_qps = 0.0;  // 0 unless a threaded pass ran
};

struct BenchReport {
    std::vector<BenchRow> rows;
};

// Nearest-rank percentile: the sample at index ceil(pct/100 * n) of the
// sorted list (1-based). pct in (0, 100].
double percentile_nearest_rank(std::vector<double> samples, double pct);

// Runs every requested method over the identical query stream. Timing per
// request covers sub-score precomputation (for the methods that use it) and
// top-k selection; producing the sequence embedding is the workload's job
// and is never timed.
BenchReport bench_methods(const SyntheticWorkload& w, const BenchOptions& opt);

// Exhaustive pqtopk and pruning at each cutoff in ks.
BenchReport sweep_cutoff(const SyntheticWorkload& w,
                         const std::vector<std::uint32_t>& ks, BenchOptions base);

// Pruning at each batch size, plus one exhaustive pqtopk reference row.
BenchReport sweep_batch(const SyntheticWorkload& w,
                        const std::vector<std::uint32_t>& batch_sizes,
                        BenchOptions base);

struct HeatmapSummary {
    std::uint64_t iterations = 0;
    std::uint64_t items_scored_total = 0;
    std::uint64_t items_scored_unique = 0;
    double items_total_pct = 0.0;
    std::string difficulty;  // "fast", "average" or "slow"
};

// Writes one CSV row per (split, rank): the query's sub-id scores with
// sub-ids sorted by descending score within each split (M * B data rows).
// The returned summary classifies the query by how hard it is to prune
// under a safe run with the given cutoff and batch size.
HeatmapSummary export_heatmap(const SyntheticWorkload& w,
                              std::uint32_t query_index, std::ostream& out,
                              std::uint32_t k = 10, std::uint32_t batch_size = 8);

// CSV with a header row; floats use 6 significant digits, lines end in LF.
void write_csv(const BenchReport& report, std::ostream& out);

}  // namespace pqrank
