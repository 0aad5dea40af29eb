#include "starsketch/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "starsketch/hashing.hpp"
#include "starsketch/ingest.hpp"
#include "starsketch/sketch.hpp"
#include "starsketch/star_metric.hpp"

namespace starsketch {

const char* const kVersion = "1.0.0";

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
        throw std::invalid_argument("plan key '" + key + "': expected an unsigned integer, got '" + value + "'");
    }
    return v;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::logic_error&) {
        throw std::invalid_argument("plan key '" + key + "': expected a number, got '" + value + "'");
    }
}

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::vector<std::string> csv_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

double parse_csv_double(const std::string& s) {
    if (s == "inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
    if (s == "nan") return std::nan("");
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc()) throw FormatError("bad number '" + s + "' in results CSV");
    return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// Plan

StreamSource StreamSource::parse(const std::string& text, std::uint64_t default_n) {
    StreamSource s;
    const std::string t = trim(text);
    if (t.rfind("file:", 0) == 0) {
        s.file = t.substr(5);
        if (s.file.empty()) throw std::invalid_argument("empty stream file path");
    } else {
        s.family = DistributionFamily::parse(t, default_n);
    }
    return s;
}

std::string StreamSource::describe() const {
    return family ? family->describe() : "file:" + file.string();
}

std::string StreamPair::id() const { return first.describe() + " vs " + second.describe(); }

void ExperimentPlan::validate() const {
    if (pairs.empty()) throw std::invalid_argument("plan has no stream pairs");
    if (divergences.empty()) throw std::invalid_argument("plan has no divergences");
    if (k_values.empty() || t_values.empty()) throw std::invalid_argument("plan needs k and t values");
    for (auto k : k_values) {
        if (k == 0) throw std::invalid_argument("plan k values must be >= 1");
    }
    for (auto t : t_values) {
        if (t == 0) throw std::invalid_argument("plan t values must be >= 1");
    }
    if (trials == 0) throw std::invalid_argument("plan trials must be >= 1");
    if (!(alpha_smoothing >= 0.0)) throw std::invalid_argument("alpha_smoothing must be >= 0");
    for (const auto& name : divergences) divergence_by_name(name);
    for (const auto& pair : pairs) {
        for (const auto* src : {&pair.first, &pair.second}) {
            if (src->family) {
                src->family->validate();
            } else if (!std::filesystem::exists(src->file)) {
                throw FormatError("stream file not found: " + src->file.string());
            }
        }
    }
}

ExperimentPlan ExperimentPlan::parse(std::istream& in) {
    ExperimentPlan plan;
    plan.k_values.clear();
    plan.t_values.clear();
    std::vector<std::string> raw_pairs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw FormatError("plan line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "pair") {
            raw_pairs.push_back(value);
        } else if (key == "divergences") {
            plan.divergences = split(value, ',');
        } else if (key == "k") {
            for (const auto& v : split(value, ',')) plan.k_values.push_back(parse_u64(key, v));
        } else if (key == "t") {
            for (const auto& v : split(value, ',')) plan.t_values.push_back(parse_u64(key, v));
        } else if (key == "trials") {
            plan.trials = parse_u64(key, value);
        } else if (key == "m") {
            plan.m = parse_u64(key, value);
        } else if (key == "n") {
            plan.n = parse_u64(key, value);
        } else if (key == "seed") {
            plan.master_seed = parse_u64(key, value);
        } else if (key == "alpha_smoothing") {
            plan.alpha_smoothing = parse_double(key, value);
        } else if (key == "threads") {
            plan.threads = static_cast<unsigned>(parse_u64(key, value));
        } else {
            throw FormatError("plan line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    // Sources are resolved after `n` is known regardless of line order.
    for (const auto& raw : raw_pairs) {
        const auto vs = raw.find(" vs ");
        if (vs == std::string::npos) throw FormatError("pair '" + raw + "' must read '<source> vs <source>'");
        plan.pairs.push_back({StreamSource::parse(raw.substr(0, vs), plan.n),
                              StreamSource::parse(raw.substr(vs + 4), plan.n)});
    }
    return plan;
}

ExperimentPlan ExperimentPlan::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open plan " + path.string());
    return parse(in);
}

std::string ExperimentPlan::to_text() const {
    std::ostringstream out;
    for (const auto& p : pairs) out << "pair = " << p.id() << '\n';
    out << "divergences = ";
    for (std::size_t i = 0; i < divergences.size(); ++i) out << (i ? "," : "") << divergences[i];
    out << "\nk = ";
    for (std::size_t i = 0; i < k_values.size(); ++i) out << (i ? "," : "") << k_values[i];
    out << "\nt = ";
    for (std::size_t i = 0; i < t_values.size(); ++i) out << (i ? "," : "") << t_values[i];
    out << "\ntrials = " << trials << "\nm = " << m << "\nn = " << n << "\nseed = " << master_seed
        << "\nalpha_smoothing = " << format_double(alpha_smoothing) << "\nthreads = " << threads << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// Execution

bool ResultRow::infinite() const { return !std::isfinite(ref) || !std::isfinite(sketch); }

double ResultRow::updates_per_second() const {
    return build_seconds > 0.0 ? static_cast<double>(updates) / build_seconds : 0.0;
}

namespace {

struct Job {
    std::size_t pair = 0;
    std::size_t trial = 0;
};

struct KeyedRow {
    std::tuple<std::size_t, std::size_t, std::size_t, std::size_t, std::size_t> key;
    ResultRow row;
};

std::vector<ItemId> load_source(const StreamSource& source, std::uint64_t m, std::uint64_t seed) {
    if (source.family) return sample_stream(*source.family, m, seed);
    return read_stream(source.file).items;
}

std::vector<KeyedRow> run_job(const ExperimentPlan& plan, const Job& job,
                              const std::vector<const DivergenceSpec*>& specs) {
    using clock = std::chrono::steady_clock;
    const auto& pair = plan.pairs[job.pair];
    const std::uint64_t stream_seed = derive_seed(plan.master_seed, {1, job.pair, job.trial});
    const auto a = load_source(pair.first, plan.m, derive_seed(stream_seed, {0}));
    const auto b = load_source(pair.second, plan.m, derive_seed(stream_seed, {1}));
    if (a.empty() || b.empty()) throw std::invalid_argument("pair " + pair.id() + " has an empty stream");
    const auto ha = from_stream(a);
    const auto hb = from_stream(b);

    std::vector<double> refs;
    for (const auto* phi : specs) refs.push_back(reference_distance(*phi, ha, hb, plan.alpha_smoothing));

    std::vector<KeyedRow> out;
    for (std::size_t ki = 0; ki < plan.k_values.size(); ++ki) {
        for (std::size_t ti = 0; ti < plan.t_values.size(); ++ti) {
            const std::uint64_t k = plan.k_values[ki];
            const std::size_t t = plan.t_values[ti];
            const std::uint64_t family_seed = derive_seed(plan.master_seed, {2, job.trial, k, t});
            const auto family = HashFamily::create(t, k, family_seed);
            const auto start = clock::now();
            const auto sa = build_sketch(family, a);
            const auto sb = build_sketch(family, b);
            const double build = std::chrono::duration<double>(clock::now() - start).count();
            for (std::size_t fi = 0; fi < specs.size(); ++fi) {
                const auto q0 = clock::now();
                const auto est = sketch_star_metric(*specs[fi], sa, sb, plan.alpha_smoothing);
                const double query = std::chrono::duration<double>(clock::now() - q0).count();
                ResultRow row;
                row.pair = pair.id();
                row.phi = specs[fi]->name;
                row.k = k;
                row.t = t;
                row.trial = job.trial;
                row.seed = family_seed;
                row.ref = refs[fi];
                row.sketch = est.value;
                row.abs_error = row.infinite() ? std::nan("") : std::abs(row.ref - row.sketch);
                row.argmax_row = est.argmax_row();
                row.alpha_smoothing = plan.alpha_smoothing;
                row.build_seconds = build;
                row.query_seconds = query;
                row.updates = a.size() + b.size();
                const bool monotone = specs[fi]->flags.monotone || specs[fi]->flags.f_div;
                if (monotone && plan.alpha_smoothing == 0.0 &&
                    row.sketch > row.ref + 1e-9 * std::max(1.0, std::abs(row.ref))) {
                    throw SandwichViolation("sketch estimate " + format_double(row.sketch) +
                                            " exceeds reference " + format_double(row.ref) + " for " +
                                            row.phi + " on " + row.pair);
                }
                out.push_back({{job.pair, fi, ki, ti, job.trial}, std::move(row)});
            }
        }
    }
    return out;
}

}  // namespace

std::vector<ResultRow> run_plan(const ExperimentPlan& plan) {
    plan.validate();
    std::vector<const DivergenceSpec*> specs;
    for (const auto& name : plan.divergences) specs.push_back(&divergence_by_name(name));

    std::vector<Job> jobs;
    for (std::size_t p = 0; p < plan.pairs.size(); ++p) {
        for (std::size_t tr = 0; tr < plan.trials; ++tr) jobs.push_back({p, tr});
    }

    std::vector<KeyedRow> keyed;
    std::mutex mutex;
    std::exception_ptr error;
    std::size_t next = 0;
    auto worker = [&] {
        for (;;) {
            Job job;
            {
                std::lock_guard lock(mutex);
                if (error || next >= jobs.size()) return;
                job = jobs[next++];
            }
            try {
                auto rows = run_job(plan, job, specs);
                std::lock_guard lock(mutex);
                for (auto& r : rows) keyed.push_back(std::move(r));
            } catch (...) {
                std::lock_guard lock(mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(plan.threads, static_cast<unsigned>(jobs.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);

    std::sort(keyed.begin(), keyed.end(), [](const KeyedRow& x, const KeyedRow& y) { return x.key < y.key; });
    std::vector<ResultRow> rows;
    rows.reserve(keyed.size());
    for (auto& kr : keyed) rows.push_back(std::move(kr.row));
    return rows;
}

// ---------------------------------------------------------------------------
// Summary

std::vector<SummaryRow> sweep_summary(const std::vector<ResultRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("sweep_summary: no rows");
    // Group in first-appearance order so the summary follows the results.
    std::vector<SummaryRow> out;
    std::vector<std::vector<const ResultRow*>> groups;
    std::map<std::tuple<std::string, std::string, std::uint64_t, std::size_t>, std::size_t> index;
    for (const auto& r : rows) {
        const auto key = std::make_tuple(r.pair, r.phi, r.k, r.t);
        auto [it, inserted] = index.emplace(key, out.size());
        if (inserted) {
            SummaryRow s;
            s.pair = r.pair;
            s.phi = r.phi;
            s.k = r.k;
            s.t = r.t;
            out.push_back(s);
            groups.emplace_back();
        }
        groups[it->second].push_back(&r);
    }
    auto stdev = [](const std::vector<double>& v, double mean) {
        if (v.size() < 2) return 0.0;
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        return std::sqrt(ss / static_cast<double>(v.size() - 1));
    };
    auto mean = [](const std::vector<double>& v) {
        if (v.empty()) return std::nan("");
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    for (std::size_t g = 0; g < out.size(); ++g) {
        auto& s = out[g];
        std::vector<double> ref, sketch, diff, err;
        for (const auto* r : groups[g]) {
            ++s.rows;
            if (r->infinite()) {
                ++s.infinite_rows;
                continue;
            }
            ++s.finite_rows;
            ref.push_back(r->ref);
            sketch.push_back(r->sketch);
            diff.push_back(r->sketch - r->ref);
            err.push_back(r->abs_error);
        }
        s.mean_ref = mean(ref);
        s.mean_sketch = mean(sketch);
        s.mean_difference = mean(diff);
        s.mean_abs_error = mean(err);
        s.stdev_ref = stdev(ref, s.mean_ref);
        s.stdev_sketch = stdev(sketch, s.mean_sketch);
        s.stdev_abs_error = stdev(err, s.mean_abs_error);
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    out << "pair,phi,k,t,trial,seed,ref,sketch,abs_error,argmax_row,alpha_smoothing\n";
    for (const auto& r : rows) {
        out << csv_quote(r.pair) << ',' << r.phi << ',' << r.k << ',' << r.t << ',' << r.trial << ','
            << r.seed << ',' << format_double(r.ref) << ',' << format_double(r.sketch) << ','
            << format_double(r.abs_error) << ',' << r.argmax_row << ','
            << format_double(r.alpha_smoothing) << '\n';
    }
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
    std::vector<ResultRow> rows;
    std::string line;
    if (!std::getline(in, line) || line.rfind("pair,phi,k,t,trial", 0) != 0) {
        throw FormatError("results CSV is missing its header");
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = csv_fields(line);
        if (f.size() != 11) throw FormatError("results CSV line " + std::to_string(line_no) + ": expected 11 fields");
        ResultRow r;
        try {
            r.pair = f[0];
            r.phi = f[1];
            r.k = std::stoull(f[2]);
            r.t = std::stoull(f[3]);
            r.trial = std::stoull(f[4]);
            r.seed = std::stoull(f[5]);
            r.ref = parse_csv_double(f[6]);
            r.sketch = parse_csv_double(f[7]);
            r.abs_error = parse_csv_double(f[8]);
            r.argmax_row = std::stoull(f[9]);
            r.alpha_smoothing = parse_csv_double(f[10]);
        } catch (const std::logic_error&) {
            throw FormatError("results CSV line " + std::to_string(line_no) + ": bad integer");
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_timing_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    out << "pair,phi,k,t,trial,build_seconds,query_seconds,updates,updates_per_second\n";
    for (const auto& r : rows) {
        out << csv_quote(r.pair) << ',' << r.phi << ',' << r.k << ',' << r.t << ',' << r.trial << ','
            << format_double(r.build_seconds) << ',' << format_double(r.query_seconds) << ','
            << r.updates << ',' << format_double(r.updates_per_second()) << '\n';
    }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
    out << "pair,phi,k,t,rows,finite_rows,infinite_rows,mean_ref,mean_sketch,mean_difference,"
           "mean_abs_error,stdev_ref,stdev_sketch,stdev_abs_error\n";
    for (const auto& s : rows) {
        out << csv_quote(s.pair) << ',' << s.phi << ',' << s.k << ',' << s.t << ',' << s.rows << ','
            << s.finite_rows << ',' << s.infinite_rows << ',' << format_double(s.mean_ref) << ','
            << format_double(s.mean_sketch) << ',' << format_double(s.mean_difference) << ','
            << format_double(s.mean_abs_error) << ',' << format_double(s.stdev_ref) << ','
            << format_double(s.stdev_sketch) << ',' << format_double(s.stdev_abs_error) << '\n';
    }
}

void run_plan_to_directory(const ExperimentPlan& plan, const std::filesystem::path& dir) {
    const auto rows = run_plan(plan);
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream out(dir / name);
        if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
        return out;
    };
    {
        auto out = open("results.csv");
        write_results_csv(out, rows);
    }
    {
        auto out = open("summary.csv");
        write_summary_csv(out, sweep_summary(rows));
    }
    {
        auto out = open("timing.csv");
        write_timing_csv(out, rows);
    }
    {
        auto out = open("manifest.txt");
        out << "# starsketch experiment manifest\n"
            << "version = " << kVersion << '\n'
            << "sketch_file_version = " << SketchMatrix::kFileVersion << '\n'
            << "stream_file_version = " << StreamFile::kVersion << '\n'
            << "item_fingerprint_version = " << kItemFingerprintVersion << '\n'
            << "hash = carter-wegman mod 2^61-1, splitmix64 seeding\n"
            << "# plan\n"
            << plan.to_text();
    }
}

}  // namespace starsketch
