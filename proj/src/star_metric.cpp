#include "starsketch/star_metric.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "starsketch/generators.hpp"

namespace starsketch {

std::string to_string(StarMode mode) { return mode == StarMode::exact ? "exact" : "approximate"; }

std::string to_string(CheckStatus status) {
    switch (status) {
        case CheckStatus::passed: return "pass";
        case CheckStatus::failed: return "FAIL";
        case CheckStatus::skipped: return "skipped";
        case CheckStatus::reported: return "reported";
    }
    return "?";
}

namespace {

struct Candidate {
    double value = -kInfinity;
    std::uint64_t index = 0;
    std::vector<std::size_t> labels;
    bool seen = false;

    // Larger value wins; ties go to the smaller enumeration index.
    bool beats(const Candidate& other) const {
        if (!seen) return false;
        if (!other.seen) return true;
        if (value != other.value) return value > other.value;
        return index < other.index;
    }
};

Candidate scan(const DivergenceSpec& phi, const ProbabilityVector& p, const ProbabilityVector& q,
               std::size_t k, std::uint64_t budget, unsigned stride, unsigned offset) {
    PartitionEnumerator e(p.size(), k, budget);
    Candidate best;
    std::vector<double> pa(k), qa(k);
    do {
        if (e.index() % stride != offset) continue;
        std::fill(pa.begin(), pa.end(), 0.0);
        std::fill(qa.begin(), qa.end(), 0.0);
        const auto labels = e.labels();
        for (std::size_t i = 0; i < labels.size(); ++i) {
            pa[labels[i]] += p[i];
            qa[labels[i]] += q[i];
        }
        const double v = phi(ProbabilityVector(pa), ProbabilityVector(qa));
        if (!best.seen || v > best.value) {
            best.value = v;
            best.index = e.index();
            best.labels.assign(labels.begin(), labels.end());
            best.seen = true;
        }
    } while (e.next());
    return best;
}

}  // namespace

StarMetricResult exact_star_metric(const DivergenceSpec& phi, const ProbabilityVector& p,
                                   const ProbabilityVector& q, std::size_t k,
                                   const ExactOptions& options) {
    if (p.size() != q.size()) throw std::invalid_argument("exact_star_metric: length mismatch");
    if (k == 0) throw std::invalid_argument("exact_star_metric: k must be at least 1");
    const std::size_t n = p.size();
    StarMetricResult result;
    result.mode = StarMode::exact;
    result.k = k;
    if (k > n) {
        result.value = phi(p, q);
        result.argmax = Partition::singletons(n);
        return result;
    }
    // Validates the budget before any worker starts.
    const std::uint64_t count = PartitionEnumerator(n, k, options.budget).count();

    const unsigned threads = std::max(1u, std::min<unsigned>(options.threads,
                                          static_cast<unsigned>(std::min<std::uint64_t>(count, 64))));
    Candidate best;
    if (threads == 1) {
        best = scan(phi, p, q, k, options.budget, 1, 0);
    } else {
        std::vector<Candidate> partial(threads);
        std::vector<std::exception_ptr> errors(threads);
        std::vector<std::thread> workers;
        for (unsigned w = 0; w < threads; ++w) {
            workers.emplace_back([&, w] {
                try {
                    partial[w] = scan(phi, p, q, k, options.budget, threads, w);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& worker : workers) worker.join();
        for (auto& error : errors) {
            if (error) std::rethrow_exception(error);
        }
        for (auto& c : partial) {
            if (c.beats(best)) best = std::move(c);
        }
    }
    result.value = best.value;
    result.argmax = Partition::from_labels(best.labels);
    result.evaluated_partitions = count;
    return result;
}

StarMetricResult sketch_star_metric(const DivergenceSpec& phi, const SketchMatrix& first,
                                    const SketchMatrix& second, double alpha) {
    if (first.family_fingerprint() != second.family_fingerprint() ||
        !(first.family() == second.family())) {
        throw FamilyMismatch("sketches were built with different hash families");
    }
    if (first.total() == 0 || second.total() == 0) {
        throw std::invalid_argument("sketch_star_metric: empty sketch");
    }
    StarMetricResult result;
    result.mode = StarMode::approximate;
    result.k = first.columns();
    result.evaluated_partitions = first.rows();
    std::size_t best_row = 0;
    double best = -kInfinity;
    for (std::size_t i = 0; i < first.rows(); ++i) {
        const double v = phi(smooth(first.row_distribution(i), alpha),
                             smooth(second.row_distribution(i), alpha));
        if (i == 0 || v > best) {
            best = v;
            best_row = i;
        }
    }
    result.value = best;
    result.argmax = best_row;
    return result;
}

double reference_distance(const DivergenceSpec& phi, const EmpiricalDistribution& first,
                          const EmpiricalDistribution& second, double alpha) {
    if (first.total() == 0 || second.total() == 0) {
        throw std::invalid_argument("reference_distance: empty stream");
    }
    const auto universe = union_universe(first, second);
    return phi(smooth(normalize(first, universe), alpha), smooth(normalize(second, universe), alpha));
}

// ---------------------------------------------------------------------------
// Random inputs

ProbabilityVector random_distribution(std::size_t n, std::mt19937_64& rng) {
    std::vector<double> w(n);
    double total = 0.0;
    for (auto& v : w) {
        // Exponential(1) from (0, 1]; never zero so supports stay full.
        v = -std::log(1.0 - unit_interval(rng()));
        if (v == 0.0) v = 1e-300;
        total += v;
    }
    for (auto& v : w) v /= total;
    return ProbabilityVector(std::move(w));
}

Partition random_partition(std::size_t n, std::size_t c, std::mt19937_64& rng) {
    if (c == 0 || c > n) throw std::invalid_argument("random_partition needs 1 <= c <= n");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::size_t> labels(n);
    for (std::size_t j = 0; j < n; ++j) {
        labels[order[j]] = j < c ? j : static_cast<std::size_t>(rng() % c);
    }
    return Partition::from_labels(labels);
}

ProbabilityVector project_onto_marginals(const ProbabilityVector& shape,
                                         const ProbabilityVector& target, const Partition& mu) {
    if (shape.size() != target.size() || mu.universe_size() != shape.size()) {
        throw std::invalid_argument("project_onto_marginals: dimension mismatch");
    }
    const auto shape_cells = aggregate(shape, mu);
    const auto target_cells = aggregate(target, mu);
    std::vector<double> out(shape.size());
    for (std::size_t i = 0; i < shape.size(); ++i) {
        const std::size_t c = mu.cell_of(i);
        if (shape_cells[c] == 0.0) throw std::invalid_argument("project_onto_marginals: empty shape cell");
        out[i] = target_cells[c] * shape[i] / shape_cells[c];
    }
    return ProbabilityVector(std::move(out));
}

// ---------------------------------------------------------------------------
// Preservation suite

bool PreservationReport::passed() const {
    return std::none_of(checks.begin(), checks.end(),
                        [](const CheckResult& c) { return c.status == CheckStatus::failed; });
}

const CheckResult& PreservationReport::check(const std::string& name) const {
    for (const auto& c : checks) {
        if (c.name == name) return c;
    }
    throw std::out_of_range("no check named '" + name + "'");
}

namespace {

std::string describe(const ProbabilityVector& v) {
    std::ostringstream out;
    out.precision(6);
    out << '(';
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
    out << ')';
    return out.str();
}

ProbabilityVector mix(double lambda, const ProbabilityVector& a, const ProbabilityVector& b) {
    std::vector<double> w(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) w[i] = lambda * a[i] + (1.0 - lambda) * b[i];
    return ProbabilityVector(std::move(w));
}

// lambda a + (1 - lambda) b with zero weights dropping their term (no 0 * inf).
double weighted(double lambda, double a, double b) {
    double s = 0.0;
    if (lambda != 0.0) s += lambda * a;
    if (lambda != 1.0) s += (1.0 - lambda) * b;
    return s;
}

bool close(double a, double b, double tol) {
    if (a == b) return true;
    return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

void finish(CheckResult& c) {
    if (c.status == CheckStatus::skipped || c.status == CheckStatus::reported) return;
    c.status = c.violations == 0 ? CheckStatus::passed : CheckStatus::failed;
}

void violation(CheckResult& c, const std::string& witness) {
    if (c.violations++ == 0) c.witness = witness;
}

}  // namespace

PreservationReport preservation_suite(const DivergenceSpec& phi, std::size_t n, std::size_t k,
                                      std::size_t trials, std::uint64_t seed,
                                      const PreservationOptions& options) {
    if (n == 0 || k == 0) throw std::invalid_argument("preservation_suite needs n, k >= 1");
    if (k <= n && stirling_capped(n, k, options.budget) > options.budget) {
        throw BudgetExceeded("preservation_suite: S(n, k) exceeds the partition budget");
    }
    const double tol = options.tolerance;
    const ExactOptions exact{options.budget, 1};
    auto star = [&](const DivergenceSpec& d, const ProbabilityVector& a, const ProbabilityVector& b) {
        return exact_star_metric(d, a, b, k, exact);
    };
    std::mt19937_64 rng(seed);
    auto draw = [&] { return random_distribution(n, rng); };

    PreservationReport report;
    report.divergence = phi.name;
    report.n = n;
    report.k = k;
    const auto& flags = phi.flags;

    CheckResult nonneg{"non_negativity"};
    CheckResult identity{"identity"};
    CheckResult symmetry{flags.symmetric ? "symmetry" : "asymmetry_witness"};
    CheckResult triangle{"triangle"};
    if (!flags.nonneg) nonneg.status = CheckStatus::skipped; else nonneg.status = CheckStatus::passed;
    identity.status = flags.identity ? CheckStatus::passed : CheckStatus::skipped;
    symmetry.status = flags.symmetric ? CheckStatus::passed : CheckStatus::reported;
    triangle.status = flags.triangle ? CheckStatus::passed : CheckStatus::skipped;
    double widest_asymmetry = 0.0;

    for (std::size_t trial = 0; trial < trials; ++trial) {
        const auto p = draw();
        const auto q = draw();
        const auto r = draw();
        const double pq = star(phi, p, q).value;
        if (flags.nonneg) {
            ++nonneg.cases;
            if (!(pq >= -tol)) violation(nonneg, "phi_k" + describe(p) + describe(q) + " < 0");
        }
        if (flags.identity) {
            identity.cases += 2;
            const double pp = star(phi, p, p).value;
            if (!(std::abs(pp) <= tol)) violation(identity, "phi_k(p,p) != 0 for p=" + describe(p));
            if (!(pq > tol)) violation(identity, "phi_k(p,q) = 0 with p != q: " + describe(p) + describe(q));
        }
        const double qp = star(phi, q, p).value;
        ++symmetry.cases;
        if (flags.symmetric) {
            if (!close(pq, qp, tol)) violation(symmetry, "phi_k(p,q) != phi_k(q,p) for " + describe(p) + describe(q));
        } else if (std::abs(pq - qp) > widest_asymmetry) {
            widest_asymmetry = std::abs(pq - qp);
            std::ostringstream w;
            w << "phi_k(p,q)=" << pq << " phi_k(q,p)=" << qp << " p=" << describe(p) << " q=" << describe(q);
            symmetry.witness = w.str();
        }
        if (flags.triangle) {
            ++triangle.cases;
            const double pr = star(phi, p, r).value;
            const double rq = star(phi, r, q).value;
            if (pq > pr + rq + tol) {
                violation(triangle, "phi_k(p,q) > phi_k(p,r) + phi_k(r,q) for " + describe(p) + describe(q) + describe(r));
            }
        }
    }

    // Monotonicity under coarsening to c cells, both c >= k and c < k.
    CheckResult mono_coarse{"monotonicity_coarse"};
    CheckResult mono_fine{"monotonicity_fine"};
    const bool monotone = flags.monotone || flags.f_div;
    for (auto* c : {&mono_coarse, &mono_fine}) c->status = monotone ? CheckStatus::passed : CheckStatus::skipped;
    if (monotone && k >= n) mono_coarse.status = CheckStatus::skipped;  // no c with k <= c < n
    if (monotone && k < 2) mono_fine.status = CheckStatus::skipped;     // no c with 1 <= c < k
    if (monotone) {
        for (std::size_t trial = 0; trial < trials; ++trial) {
            const auto p = draw();
            const auto q = draw();
            const double full = star(phi, p, q).value;
            const double base = phi(p, q);
            for (auto* check : {&mono_coarse, &mono_fine}) {
                if (check->status == CheckStatus::skipped) continue;
                const bool coarse = check == &mono_coarse;
                const std::size_t lo = coarse ? k : 1;
                const std::size_t hi = coarse ? n - 1 : std::min(k - 1, n - 1);
                if (hi < lo) continue;
                const std::size_t c = lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
                const auto mu = random_partition(n, c, rng);
                const auto pm = aggregate(p, mu);
                const auto qm = aggregate(q, mu);
                ++check->cases;
                if (phi(pm, qm) > base + tol) {
                    violation(*check, "phi(aggregated) > phi for mu=" + to_string(mu));
                }
                if (star(phi, pm, qm).value > full + tol) {
                    violation(*check, "phi_k(aggregated) > phi_k for mu=" + to_string(mu) + " p=" + describe(p) + " q=" + describe(q));
                }
            }
        }
    }

    CheckResult convexity{"convexity", flags.f_div ? CheckStatus::passed : CheckStatus::skipped};
    if (flags.f_div) {
        for (std::size_t trial = 0; trial < trials; ++trial) {
            const auto p1 = draw();
            const auto p2 = draw();
            const auto q1 = draw();
            const auto q2 = draw();
            const double d1 = star(phi, p1, q1).value;
            const double d2 = star(phi, p2, q2).value;
            for (double lambda : options.lambdas) {
                ++convexity.cases;
                const double lhs = star(phi, mix(lambda, p1, p2), mix(lambda, q1, q2)).value;
                const double rhs = weighted(lambda, d1, d2);
                if (lhs > rhs + tol * std::max(1.0, std::abs(rhs))) {
                    std::ostringstream w;
                    w << "lambda=" << lambda << " lhs=" << lhs << " rhs=" << rhs;
                    violation(convexity, w.str());
                }
            }
        }
    }

    CheckResult pointwise{"bregman_pointwise_linearity", CheckStatus::skipped};
    CheckResult linearity{"bregman_linearity", CheckStatus::skipped};
    if (flags.bregman && phi.bregman_generator) {
        pointwise.status = CheckStatus::passed;
        linearity.status = CheckStatus::passed;
        const auto& f1 = *phi.bregman_generator;
        const auto f2 = squared_bregman_generator();
        auto as_spec = [](std::string name, BregmanGenerator g) {
            DivergenceSpec s;
            s.name = std::move(name);
            s.eval = [g](const ProbabilityVector& a, const ProbabilityVector& b) { return bregman(g, a, b); };
            s.flags.bregman = true;
            return s;
        };
        const auto spec1 = as_spec("F1", f1);
        const auto spec2 = as_spec("F2", f2);
        std::uint64_t equalities = 0;
        for (std::size_t trial = 0; trial < trials; ++trial) {
            const auto p = draw();
            const auto q = draw();
            const double b1 = bregman(f1, p, q);
            const double b2 = bregman(f2, p, q);
            const double s1 = star(spec1, p, q).value;
            const double s2 = star(spec2, p, q).value;
            for (double lambda : options.lambdas) {
                const auto combined = combine(f1, f2, lambda);
                ++pointwise.cases;
                const double lhs = bregman(combined, p, q);
                if (!close(lhs, b1 + lambda * b2, tol)) {
                    std::ostringstream w;
                    w << "lambda=" << lambda << " B_{F1+lF2}=" << lhs << " B_F1+lB_F2=" << b1 + lambda * b2;
                    violation(pointwise, w.str());
                }
                ++linearity.cases;
                const double star_lhs = star(as_spec("F1+lF2", combined), p, q).value;
                const double star_rhs = s1 + lambda * s2;
                if (star_lhs > star_rhs + tol * std::max(1.0, std::abs(star_rhs))) {
                    std::ostringstream w;
                    w << "lambda=" << lambda << " sketch B_{F1+lF2}=" << star_lhs << " > " << star_rhs;
                    violation(linearity, w.str());
                }
                if (close(star_lhs, star_rhs, tol)) ++equalities;
            }
        }
        if (linearity.violations == 0) {
            linearity.witness = "equality held in " + std::to_string(equalities) + "/" +
                                std::to_string(linearity.cases) + " cases (not asserted)";
        }
    }

    // Pythagorean transitivity for KL (the divergence that is both an
    // f-divergence and a Bregman divergence) on I-projection triples.
    CheckResult pythagorean{"pythagorean", CheckStatus::skipped};
    if (flags.bregman && flags.f_div && k <= n) {
        pythagorean.status = CheckStatus::passed;
        std::uint64_t applicable = 0;
        std::uint64_t held = 0;
        for (std::size_t trial = 0; trial < trials; ++trial) {
            const std::size_t c = 1 + static_cast<std::size_t>(rng() % k);
            const auto mu = random_partition(n, c, rng);
            const auto p = draw();
            const auto r = draw();
            const auto q = project_onto_marginals(r, p, mu);
            ++pythagorean.cases;
            if (!close(phi(p, r), phi(p, q) + phi(q, r), tol)) {
                violation(pythagorean, "base equality fails for mu=" + to_string(mu));
            }
            PartitionEnumerator e(n, k, options.budget);
            do {
                const auto rho = e.partition();
                if (!rho.refines(mu)) continue;
                const auto pr = aggregate(p, rho), qr = aggregate(q, rho), rr = aggregate(r, rho);
                if (!close(phi(pr, rr), phi(pr, qr) + phi(qr, rr), tol)) {
                    violation(pythagorean, "aggregated equality fails for rho=" + to_string(rho));
                }
            } while (e.next());
            const auto spr = star(phi, p, r);
            const auto spq = star(phi, p, q);
            const auto sqr = star(phi, q, r);
            if (spr.argmax_partition() == spq.argmax_partition() &&
                spq.argmax_partition() == sqr.argmax_partition() &&
                spr.argmax_partition().refines(mu)) {
                ++applicable;
                if (close(spr.value, spq.value + sqr.value, tol)) ++held;
            }
        }
        if (pythagorean.violations == 0) {
            pythagorean.witness = "shared-argmax triples: " + std::to_string(applicable) +
                                  ", sketch-level equality held in " + std::to_string(held);
        }
    }

    for (auto* c : {&nonneg, &identity, &symmetry, &triangle, &mono_coarse, &mono_fine, &convexity,
                    &pointwise, &linearity, &pythagorean}) {
        finish(*c);
        report.checks.push_back(std::move(*c));
    }
    if (!flags.symmetric) {
        auto& w = report.checks[2];
        w.witness = widest_asymmetry > 0.0 ? w.witness : "no asymmetry observed";
    }
    return report;
}

}  // namespace starsketch
