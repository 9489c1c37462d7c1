#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pqrank/bench.hpp"
#include "pqrank/builder.hpp"
#include "pqrank/io.hpp"

namespace {

pqrank::Method parse_method(const std::string& name) {
    if (name == "dense") {
        return pqrank::Method::dense;
    }
    if (name == "pqtopk") {
        return pqrank::Method::pqtopk;
    }
    if (name == "prune") {
        return pqrank::Method::prune;
    }
    throw std::invalid_argument("unknown method: " + name +
                                " (expected dense, pqtopk or prune)");
}

void apply_mode(const std::string& text, pqrank::BenchOptions& opt) {
    try {
        if (text == "safe") {
            opt.mode = pqrank::PruneMode::safe;
            return;
        }
        if (text.rfind("maxiter:", 0) == 0) {
            opt.mode = pqrank::PruneMode::max_iterations;
            opt.iteration_limit = std::stoull(text.substr(8));
            return;
        }
        if (text.rfind("inflate:", 0) == 0) {
            opt.mode = pqrank::PruneMode::inflated_threshold;
            opt.inflation = std::stof(text.substr(8));
            return;
        }
    } catch (const std::exception&) {
        // fall through to the shared error below
    }
    throw std::invalid_argument("bad mode: " + text +
                                " (expected safe, maxiter:L or inflate:F)");
}

// "-" keeps the report on stdout.
void emit_csv(const pqrank::BenchReport& report, const std::string& out) {
    if (out == "-") {
        pqrank::write_csv(report, std::cout);
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open for writing: " + out);
    }
    pqrank::write_csv(report, f);
    std::cout << "report written to " << out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Product-quantised top-k scoring benchmark"};
    app.require_subcommand(1);

    // gen
    std::uint32_t items = 100000;
    std::uint32_t users = 4096;
    std::uint32_t splits = 8;
    std::uint32_t subids = 256;
    std::uint32_t dim = 512;
    float skew = 0.0f;
    std::uint64_t seed = 42;
    std::uint32_t gen_queries = 128;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "generate a synthetic workload");
    gen->add_option("--items", items, "catalogue size");
    gen->add_option("--users", users, "synthetic users");
    gen->add_option("--splits", splits, "splits M");
    gen->add_option("--subids", subids, "sub-ids per split B");
    gen->add_option("--dim", dim, "embedding dimension");
    gen->add_option("--skew", skew, "score concentration in [0,1]");
    gen->add_option("--seed", seed, "rng seed");
    gen->add_option("--queries", gen_queries, "queries in the stream");
    gen->add_option("--out", gen_out, "output directory")->required();

    // shared bench-ish options
    std::string workload_dir;
    std::string methods_text = "dense,pqtopk,prune";
    std::uint32_t k = 10;
    std::uint32_t bs = 8;
    std::string mode_text = "safe";
    std::uint32_t queries = 100;
    std::uint32_t threads = 1;
    std::string out = "-";

    auto* bench = app.add_subcommand("bench", "compare scoring methods");
    bench->add_option("--workload", workload_dir, "workload directory")
        ->required();
    bench->add_option("--methods", methods_text, "comma list: dense,pqtopk,prune");
    bench->add_option("--k", k, "ranking cutoff");
    bench->add_option("--bs", bs, "pruning batch size");
    bench->add_option("--mode", mode_text, "safe | maxiter:L | inflate:F");
    bench->add_option("--queries", queries, "measured queries");
    bench->add_option("--threads", threads,
                      "extra throughput pass with this many request threads");
    bench->add_option("--out", out, "report csv path, - for stdout");

    std::vector<std::uint32_t> ks = {1, 10, 100, 256};
    auto* sweepk = app.add_subcommand("sweepk", "sweep the ranking cutoff");
    sweepk->add_option("--workload", workload_dir, "workload directory")
        ->required();
    sweepk->add_option("--ks", ks, "cutoffs")->delimiter(',');
    sweepk->add_option("--bs", bs, "pruning batch size");
    sweepk->add_option("--mode", mode_text, "safe | maxiter:L | inflate:F");
    sweepk->add_option("--queries", queries, "measured queries");
    sweepk->add_option("--out", out, "report csv path, - for stdout");

    std::vector<std::uint32_t> bss = {1, 2, 4, 8, 16, 64};
    auto* sweepbs = app.add_subcommand("sweepbs", "sweep the batch size");
    sweepbs->add_option("--workload", workload_dir, "workload directory")
        ->required();
    sweepbs->add_option("--bs", bss, "batch sizes")->delimiter(',');
    sweepbs->add_option("--k", k, "ranking cutoff");
    sweepbs->add_option("--mode", mode_text, "safe | maxiter:L | inflate:F");
    sweepbs->add_option("--queries", queries, "measured queries");
    sweepbs->add_option("--out", out, "report csv path, - for stdout");

    std::uint32_t query_index = 0;
    auto* heatmap =
        app.add_subcommand("heatmap", "per-split sub-id score profile of one query");
    heatmap->add_option("--workload", workload_dir, "workload directory")
        ->required();
    heatmap->add_option("--query", query_index, "query index");
    heatmap->add_option("--k", k, "ranking cutoff for the difficulty summary");
    heatmap->add_option("--bs", bs, "batch size for the difficulty summary");
    heatmap->add_option("--out", out, "csv path, - for stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            const auto w = pqrank::gen_workload(items, users, splits, subids,
                                                dim, skew, seed, gen_queries);
            pqrank::save_workload(w, gen_out);
            std::cout << "workload written to " << gen_out << " (items=" << items
                      << " splits=" << splits << " subids=" << subids
                      << " dim=" << dim << " skew=" << skew
                      << " queries=" << gen_queries << ")\n";
            return 0;
        }

        pqrank::BenchOptions opt;
        opt.k = k;
        opt.batch_size = bs;
        opt.num_queries = queries;
        opt.threads = threads;
        apply_mode(mode_text, opt);

        const auto w = pqrank::load_workload(workload_dir);
        if (bench->parsed()) {
            opt.methods.clear();
            std::stringstream ss(methods_text);
            std::string name;
            while (std::getline(ss, name, ',')) {
                if (!name.empty()) {
                    opt.methods.push_back(parse_method(name));
                }
            }
            emit_csv(pqrank::bench_methods(w, opt), out);
        } else if (sweepk->parsed()) {
            emit_csv(pqrank::sweep_cutoff(w, ks, opt), out);
        } else if (sweepbs->parsed()) {
            emit_csv(pqrank::sweep_batch(w, bss, opt), out);
        } else if (heatmap->parsed()) {
            pqrank::HeatmapSummary summary;
            if (out == "-") {
                summary = pqrank::export_heatmap(w, query_index, std::cout, k, bs);
            } else {
                std::ofstream f(out, std::ios::binary);
                if (!f) {
                    throw std::runtime_error("cannot open for writing: " + out);
                }
                summary = pqrank::export_heatmap(w, query_index, f, k, bs);
                std::cout << "heatmap written to " << out << "\n";
            }
            std::cout << "query=" << query_index
                      << " iterations=" << summary.iterations
                      << " items_scored_total=" << summary.items_scored_total
                      << " items_scored_unique=" << summary.items_scored_unique
                      << " items_total_pct=" << summary.items_total_pct
                      << " difficulty=" << summary.difficulty << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
