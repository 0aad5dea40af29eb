#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "starsketch/divergence.hpp"
#include "starsketch/generators.hpp"
#include "starsketch/harness.hpp"
#include "starsketch/hashing.hpp"
#include "starsketch/histogram.hpp"
#include "starsketch/ingest.hpp"
#include "starsketch/sketch.hpp"
#include "starsketch/star_metric.hpp"

namespace ss = starsketch;

namespace {

std::vector<std::string> split_names(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// Writes to `path`, or stdout when the path is empty or "-".
template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
    if (path.empty() || path == "-") {
        fn(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    fn(out);
}

std::string partition_label(const ss::StarMetricResult& r) {
    if (r.mode == ss::StarMode::approximate) return "row" + std::to_string(r.argmax_row());
    return "\"" + ss::to_string(r.argmax_partition()) + "\"";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Paired counter-matrix sketches and divergences between streams"};
    app.set_version_flag("--version", std::string(ss::kVersion));
    app.require_subcommand(1);

    // generate ---------------------------------------------------------------
    auto* generate = app.add_subcommand("generate", "Sample a synthetic stream file");
    std::string family_text = "uniform";
    double alpha = 1.0, r = 3.0, p = -1.0, lambda = -1.0;
    std::uint64_t n = 4000, m = 200000, seed = 1;
    std::optional<std::uint64_t> shuffle;
    std::string out_path;
    generate->add_option("--family", family_text,
                         "uniform|zipf|pascal|binomial|poisson, optionally with :key=value,...")
        ->capture_default_str();
    generate->add_option("--alpha", alpha, "zipf exponent");
    generate->add_option("--r", r, "pascal stopping count");
    generate->add_option("--p", p, "pascal/binomial probability (default keeps the mean at n/2)");
    generate->add_option("--lambda", lambda, "poisson mean (default n/2)");
    generate->add_option("--n", n, "universe size")->capture_default_str();
    generate->add_option("--m", m, "stream length")->capture_default_str();
    generate->add_option("--seed", seed)->capture_default_str();
    generate->add_option("--shuffle", shuffle, "permute probabilities over items with this seed");
    generate->add_option("--out", out_path)->required();
    generate->callback([&] {
        auto fam = ss::DistributionFamily::parse(family_text, n);
        // Explicit flags override descriptor defaults only when given.
        if (generate->count("--alpha")) fam.alpha = alpha;
        if (generate->count("--r")) fam.r = r;
        if (generate->count("--p")) fam.p = p;
        if (generate->count("--lambda")) fam.lambda = lambda;
        if (generate->count("--n")) fam.n = n;
        if (shuffle) fam.shuffle_seed = shuffle;
        fam.validate();
        ss::StreamFile file{fam.n, fam.describe(), ss::sample_stream(fam, m, seed)};
        ss::write_stream(out_path, file);
        std::cerr << "wrote " << m << " items of " << file.descriptor << " to " << out_path << '\n';
    });

    // ingest -----------------------------------------------------------------
    auto* ingest = app.add_subcommand("ingest", "Turn an access log into a stream file");
    std::string format = "clf", in_path, stats_path, freq_path, hist_path;
    ingest->add_option("--format", format)->check(CLI::IsMember({"clf"}))->capture_default_str();
    ingest->add_option("--in", in_path, "plain or gzip-compressed log")->required()->check(CLI::ExistingFile);
    ingest->add_option("--out", out_path, "stream file")->required();
    ingest->add_option("--stats", stats_path, "metric,value CSV");
    ingest->add_option("--freq", freq_path, "rank,frequency CSV");
    ingest->add_option("--histogram", hist_path, "item,count CSV");
    ingest->callback([&] {
        const auto result = ss::ingest_clf_file(in_path);
        ss::write_stream(out_path, ss::StreamFile{0, "clf:" + in_path, result.items});
        if (!stats_path.empty()) with_output(stats_path, [&](std::ostream& o) { ss::write_trace_stats_csv(o, result.stats); });
        if (!freq_path.empty()) with_output(freq_path, [&](std::ostream& o) { ss::write_rank_frequency_csv(o, result.histogram); });
        if (!hist_path.empty()) with_output(hist_path, [&](std::ostream& o) { ss::write_histogram_csv(o, result.histogram); });
        std::cerr << "lines " << result.stats.lines() << ", items " << result.stats.items << ", distinct "
                  << result.stats.distinct << ", max frequency " << result.stats.max_frequency
                  << ", malformed " << result.stats.malformed << '\n';
    });

    // sketch build -----------------------------------------------------------
    auto* sketch = app.add_subcommand("sketch", "Sketch operations");
    sketch->require_subcommand(1);
    auto* build = sketch->add_subcommand("build", "Sketch a stream file");
    std::uint64_t k = 200;
    std::size_t t = 4;
    build->add_option("--in", in_path, "stream file")->required()->check(CLI::ExistingFile);
    build->add_option("--k", k, "columns")->capture_default_str();
    build->add_option("--t", t, "rows")->capture_default_str();
    build->add_option("--seed", seed, "hash family seed; both sketches of a comparison need the same one")
        ->capture_default_str();
    build->add_option("--out", out_path)->required();
    build->callback([&] {
        const auto stream = ss::read_stream(in_path);
        const auto sk = ss::build_sketch(ss::HashFamily::create(t, k, seed), stream.items);
        sk.save(out_path);
    });
    auto* merge_cmd = sketch->add_subcommand("merge", "Add two sketches of the same family");
    std::string a_path, b_path;
    merge_cmd->add_option("--a", a_path)->required()->check(CLI::ExistingFile);
    merge_cmd->add_option("--b", b_path)->required()->check(CLI::ExistingFile);
    merge_cmd->add_option("--out", out_path)->required();
    merge_cmd->callback([&] {
        ss::merge(ss::SketchMatrix::load(a_path), ss::SketchMatrix::load(b_path)).save(out_path);
    });

    // distance ---------------------------------------------------------------
    auto* distance = app.add_subcommand("distance", "Divergence between two streams");
    std::string phi_names = "js", mode = "sketch";
    double alpha_smoothing = 0.0;
    std::uint64_t budget = ss::kDefaultPartitionBudget;
    unsigned threads = 1;
    distance->add_option("--a", a_path, "sketch file (mode sketch) or stream file")->required()->check(CLI::ExistingFile);
    distance->add_option("--b", b_path)->required()->check(CLI::ExistingFile);
    distance->add_option("--phi", phi_names, "comma-separated divergence names")->capture_default_str();
    distance->add_option("--mode", mode, "sketch: from two sketches; ref: full distributions; "
                                         "exact: max over every k-cell partition")
        ->check(CLI::IsMember({"sketch", "ref", "exact"}))
        ->capture_default_str();
    distance->add_option("--k", k, "cells for --mode exact")->capture_default_str();
    distance->add_option("--budget", budget, "partition budget for --mode exact")->capture_default_str();
    distance->add_option("--threads", threads)->capture_default_str();
    distance->add_option("--alpha-smoothing", alpha_smoothing, "additive smoothing per cell")->capture_default_str();
    distance->callback([&] {
        const auto names = split_names(phi_names);
        std::cout << "phi,mode,k,t,value,argmax,seed,alpha_smoothing\n";
        auto emit = [&](const std::string& phi, const std::string& md, std::uint64_t kk, std::size_t tt,
                        double value, const std::string& argmax, const std::string& sd) {
            std::cout << phi << ',' << md << ',' << kk << ',' << tt << ',' << ss::format_double(value) << ','
                      << argmax << ',' << sd << ',' << ss::format_double(alpha_smoothing) << '\n';
        };
        if (mode == "sketch") {
            const auto sa = ss::SketchMatrix::load(a_path);
            const auto sb = ss::SketchMatrix::load(b_path);
            for (const auto& name : names) {
                const auto res = ss::sketch_star_metric(ss::divergence_by_name(name), sa, sb, alpha_smoothing);
                emit(name, ss::to_string(res.mode), sa.columns(), sa.rows(), res.value, partition_label(res),
                     std::to_string(sa.family().seed()));
            }
            return;
        }
        const auto ha = ss::from_stream(ss::read_stream(a_path).items);
        const auto hb = ss::from_stream(ss::read_stream(b_path).items);
        if (mode == "ref") {
            for (const auto& name : names) {
                emit(name, "ref", 0, 0, ss::reference_distance(ss::divergence_by_name(name), ha, hb, alpha_smoothing),
                     "", "");
            }
            return;
        }
        const auto universe = ss::union_universe(ha, hb);
        const auto pa = ss::smooth(ss::normalize(ha, universe), alpha_smoothing);
        const auto pb = ss::smooth(ss::normalize(hb, universe), alpha_smoothing);
        for (const auto& name : names) {
            const auto res = ss::exact_star_metric(ss::divergence_by_name(name), pa, pb, k, {budget, threads});
            emit(name, ss::to_string(res.mode), k, 0, res.value, partition_label(res), "");
        }
    });

    // stats ------------------------------------------------------------------
    auto* stats = app.add_subcommand("stats", "Histogram and trace statistics of a stream file");
    stats->add_option("--in", in_path, "stream file")->required()->check(CLI::ExistingFile);
    stats->add_option("--out", out_path, "item,count CSV (default stdout)");
    stats->add_option("--stats", stats_path, "metric,value CSV");
    stats->callback([&] {
        const auto hist = ss::from_stream(ss::read_stream(in_path).items);
        with_output(out_path, [&](std::ostream& o) { ss::write_histogram_csv(o, hist); });
        if (!stats_path.empty()) with_output(stats_path, [&](std::ostream& o) { ss::write_trace_stats_csv(o, ss::trace_stats(hist)); });
    });

    // experiment -------------------------------------------------------------
    auto* experiment = app.add_subcommand("experiment", "Run or summarize a sweep");
    experiment->require_subcommand(1);
    auto* run = experiment->add_subcommand("run", "Run a plan file");
    std::string plan_path, out_dir;
    std::optional<unsigned> run_threads;
    run->add_option("--plan", plan_path)->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--threads", run_threads, "overrides the plan's threads");
    run->callback([&] {
        auto plan = ss::ExperimentPlan::parse_file(plan_path);
        if (run_threads) plan.threads = *run_threads;
        ss::run_plan_to_directory(plan, out_dir);
        std::cerr << "wrote " << out_dir << "/{results,summary,timing}.csv and manifest.txt\n";
    });
    auto* summarize = experiment->add_subcommand("summarize", "Summarize a results.csv");
    summarize->add_option("--in", in_path, "results.csv")->required()->check(CLI::ExistingFile);
    summarize->add_option("--out", out_path, "summary CSV (default stdout)");
    summarize->callback([&] {
        std::ifstream in(in_path);
        const auto rows = ss::read_results_csv(in);
        with_output(out_path, [&](std::ostream& o) { ss::write_summary_csv(o, ss::sweep_summary(rows)); });
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
