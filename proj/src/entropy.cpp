#include "stodyn/entropy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace stodyn {

BudgetError::BudgetError(std::size_t cap, int cells, int n)
    : std::runtime_error("block entropy enumeration exceeded the budget of " +
                         std::to_string(cap) + " leaf words (cells=" + std::to_string(cells) +
                         ", n=" + std::to_string(n) + ")"),
      cap_(cap) {}

namespace {

// Compensated accumulator: keeps branch sums independent of leaf count at
// machine precision, and bit-identical for every worker count because each
// branch carries its own state and branches combine in a fixed order.
struct KahanSum {
    double total = 0.0;
    double compensation = 0.0;

    void add(double x) {
        const double y = x - compensation;
        const double t = total + y;
        compensation = (t - total) - y;
        total = t;
    }
};

// Depth-first walk below one fixed word prefix. Zero-mass prefixes are
// pruned; monotonicity guarantees their extensions are zero. Positive leaves
// are counted against the cap and handed to the sink in lexicographic order.
template <class S, class LeafFn>
void descend(const BasicOracle<S>& mu, const std::vector<StateSet>& cells, int n,
             std::vector<StateSet>& word, std::size_t cap, std::atomic<std::size_t>& leaves,
             std::atomic<bool>& over, LeafFn& leaf) {
    if (over.load(std::memory_order_relaxed)) return;
    S m = mu.mass(std::span<const StateSet>(word));
    if (scalar_traits<S>::is_zero(m)) return;
    if (static_cast<int>(word.size()) == n) {
        const std::size_t seen = leaves.fetch_add(1, std::memory_order_relaxed) + 1;
        if (seen > cap) {
            over.store(true, std::memory_order_relaxed);
            return;
        }
        leaf(m);
        return;
    }
    for (const StateSet& cell : cells) {
        word.push_back(cell);
        descend(mu, cells, n, word, cap, leaves, over, leaf);
        word.pop_back();
        if (over.load(std::memory_order_relaxed)) return;
    }
}

template <class S, class LeafFn>
void walk_branch(const BasicOracle<S>& mu, const std::vector<StateSet>& cells, int n,
                 int first_cell, std::size_t cap, std::atomic<std::size_t>& leaves,
                 std::atomic<bool>& over, LeafFn leaf) {
    std::vector<StateSet> word;
    word.reserve(static_cast<std::size_t>(n));
    word.push_back(cells[static_cast<std::size_t>(first_cell)]);
    descend(mu, cells, n, word, cap, leaves, over, leaf);
}

}  // namespace

double block_entropy(const CylinderOracle& mu, const Partition& p, int n,
                     const EnumOptions& options) {
    if (n < 1) throw std::invalid_argument("block length must be >= 1");
    if (p.space() != mu.space()) {
        throw std::invalid_argument("partition is over a different state space than the oracle");
    }
    const std::vector<StateSet>& cells = p.cells();
    const int branches = p.cell_count();
    std::vector<double> branch_total(static_cast<std::size_t>(branches), 0.0);
    std::atomic<std::size_t> leaves{0};
    std::atomic<bool> over{false};

    const int workers = std::clamp(options.workers, 1, branches);
    if (workers <= 1) {
        for (int b = 0; b < branches; ++b) {
            KahanSum sum;
            walk_branch(mu, cells, n, b, options.max_leaves, leaves, over,
                        [&sum](const double& m) { sum.add(-phi(m)); });
            branch_total[static_cast<std::size_t>(b)] = sum.total;
            if (over.load()) break;
        }
    } else {
        std::atomic<int> next{0};
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(branches));
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&]() {
                for (int b = next.fetch_add(1); b < branches; b = next.fetch_add(1)) {
                    try {
                        KahanSum sum;
                        walk_branch(mu, cells, n, b, options.max_leaves, leaves, over,
                                    [&sum](const double& m) { sum.add(-phi(m)); });
                        branch_total[static_cast<std::size_t>(b)] = sum.total;
                    } catch (...) {
                        errors[static_cast<std::size_t>(b)] = std::current_exception();
                        over.store(true);
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        for (const auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }
    if (over.load()) throw BudgetError(options.max_leaves, branches, n);

    double total = 0.0;
    for (double s : branch_total) total += s;
    return total;
}

template <class S>
std::vector<S> block_masses(const BasicOracle<S>& mu, const Partition& p, int n,
                            const EnumOptions& options) {
    if (n < 1) throw std::invalid_argument("block length must be >= 1");
    if (p.space() != mu.space()) {
        throw std::invalid_argument("partition is over a different state space than the oracle");
    }
    std::vector<S> out;
    std::atomic<std::size_t> leaves{0};
    std::atomic<bool> over{false};
    for (int b = 0; b < p.cell_count(); ++b) {
        walk_branch(mu, p.cells(), n, b, options.max_leaves, leaves, over,
                    [&out](const S& m) { out.push_back(m); });
        if (over.load()) throw BudgetError(options.max_leaves, p.cell_count(), n);
    }
    return out;
}

template std::vector<double> block_masses<double>(const BasicOracle<double>&, const Partition&,
                                                  int, const EnumOptions&);
template std::vector<Rational> block_masses<Rational>(const BasicOracle<Rational>&,
                                                      const Partition&, int, const EnumOptions&);

EntropySeries entropy_series(const CylinderOracle& mu, const Partition& p, int N,
                             const EnumOptions& options) {
    if (N < 1) throw std::invalid_argument("horizon must be >= 1");
    EntropySeries series;
    series.horizon = N;
    series.source_stationary = mu.declared_stationary();
    series.block_values.reserve(static_cast<std::size_t>(N));
    series.values.reserve(static_cast<std::size_t>(N));
    for (int n = 1; n <= N; ++n) {
        double e = block_entropy(mu, p, n, options);
        series.block_values.push_back(e);
        series.values.push_back(e / static_cast<double>(n));
    }
    series.monotone_nonincreasing = true;
    for (std::size_t i = 1; i < series.values.size(); ++i) {
        if (series.values[i] > series.values[i - 1] + 1e-12) {
            series.monotone_nonincreasing = false;
            break;
        }
    }
    return series;
}

HsdEstimate hsd_estimate(const EntropySeries& series, EstimatePolicy policy) {
    if (series.values.empty()) throw std::invalid_argument("entropy series is empty");
    if (policy == EstimatePolicy::Auto) {
        policy = series.source_stationary ? EstimatePolicy::StationaryLast
                                          : EstimatePolicy::TailWindowMax;
    }
    HsdEstimate est;
    est.horizon = series.horizon;
    const int N = static_cast<int>(series.values.size());
    if (policy == EstimatePolicy::StationaryLast) {
        est.value = series.values.back();
        est.policy = "stationary_last(N=" + std::to_string(N) + ")";
        est.is_upper_bound = series.source_stationary;
        if (series.source_stationary) {
            est.note = "per-symbol block entropy of a stationary source is nonincreasing, "
                       "so the last value bounds the limit from above";
        }
    } else {
        const int window = (N + 2) / 3;  // ceil(N/3)
        double best = series.values[static_cast<std::size_t>(N - window)];
        for (int i = N - window + 1; i < N; ++i) {
            best = std::max(best, series.values[static_cast<std::size_t>(i)]);
        }
        est.value = best;
        est.policy = "tail_window_max(window=" + std::to_string(window) +
                     ",N=" + std::to_string(N) + ")";
        est.is_upper_bound = false;
    }
    return est;
}

HsdEstimate hsd_full(const CylinderOracle& mu, int N, const EnumOptions& options) {
    Partition fine = Partition::singletons(mu.space());
    EntropySeries series = entropy_series(mu, fine, N, options);
    HsdEstimate est = hsd_estimate(series);
    std::string why = "singleton partition refines every partition of a finite state space, "
                      "so by refinement monotonicity it attains the partition supremum";
    est.note = est.note.empty() ? why : est.note + "; " + why;
    return est;
}

double markov_closed_form(const MarkovSpec& spec) {
    if (!spec.stationary()) {
        throw std::invalid_argument(
            "markov closed form requires an invariant initial vector");
    }
    double h = 0.0;
    const int k = spec.space().size();
    for (int i = 0; i < k; ++i) {
        const double pi = spec.initial().weight(i);
        for (int j = 0; j < k; ++j) {
            h -= pi * phi(spec.transition()[static_cast<std::size_t>(i)]
                                           [static_cast<std::size_t>(j)]);
        }
    }
    return h;
}

double iid_closed_form(const Distribution& nu, const Partition& p) {
    if (nu.size() != p.space().size()) {
        throw std::invalid_argument("distribution size does not match the partition's space");
    }
    double h = 0.0;
    for (int c = 0; c < p.cell_count(); ++c) {
        h -= phi(nu.mass_of(p.cell(c)));
    }
    return h;
}

namespace {

// Join of the preimages of p under the first n iterates of the map.
Partition iterated_join(const StateSpace& space, const std::vector<int>& map,
                        const Partition& p, int n) {
    Partition joined = p;
    std::vector<int> iterate(map.begin(), map.end());  // T^i, starting at i = 1
    for (int i = 1; i < n; ++i) {
        joined = join(joined, preimage_partition(std::span<const int>(iterate), space, p));
        for (int& x : iterate) x = map[static_cast<std::size_t>(x)];
    }
    return joined;
}

}  // namespace

double transformation_block_entropy(const TransformationSpec& spec, const Partition& p, int n) {
    if (n < 1) throw std::invalid_argument("block length must be >= 1");
    if (p.space() != spec.space()) {
        throw std::invalid_argument("partition is over a different state space than the map");
    }
    Partition joined = iterated_join(spec.space(), spec.map(), p, n);
    double h = 0.0;
    for (int c = 0; c < joined.cell_count(); ++c) {
        h -= phi(spec.measure().mass_of(joined.cell(c)));
    }
    return h;
}

template <class S>
std::vector<S> transformation_block_masses(const BasicTransformationSpec<S>& spec,
                                           const Partition& p, int n) {
    if (n < 1) throw std::invalid_argument("block length must be >= 1");
    if (p.space() != spec.space()) {
        throw std::invalid_argument("partition is over a different state space than the map");
    }
    Partition joined = iterated_join(spec.space(), spec.map(), p, n);
    std::vector<S> masses;
    masses.reserve(static_cast<std::size_t>(joined.cell_count()));
    for (int c = 0; c < joined.cell_count(); ++c) {
        S m = spec.measure().mass_of(joined.cell(c));
        if (!scalar_traits<S>::is_zero(m)) masses.push_back(std::move(m));
    }
    std::sort(masses.begin(), masses.end());
    return masses;
}

template std::vector<double> transformation_block_masses<double>(
    const BasicTransformationSpec<double>&, const Partition&, int);
template std::vector<Rational> transformation_block_masses<Rational>(
    const BasicTransformationSpec<Rational>&, const Partition&, int);

double conditional_entropy_first_coord(const CylinderOracle& mu, const Partition& p,
                                       const Partition& q) {
    if (p.space() != q.space() || p.space() != mu.space()) {
        throw std::invalid_argument("conditional entropy needs both partitions over the "
                                    "oracle's state space");
    }
    double h = 0.0;
    for (int j = 0; j < q.cell_count(); ++j) {
        const double mj = mu.mass({q.cell(j)});
        if (mj <= 0.0) continue;
        for (int i = 0; i < p.cell_count(); ++i) {
            StateSet inter = p.cell(i) & q.cell(j);
            if (inter.none()) continue;
            const double mij = mu.mass({std::move(inter)});
            if (mij <= 0.0) continue;
            h -= mij * std::log(mij / mj);
        }
    }
    return h;
}

}  // namespace stodyn
