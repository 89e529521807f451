#include "stodyn/measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace stodyn {

template <class S>
BasicOracle<S>::BasicOracle(StateSpace space, MassFn fn, bool stationary)
    : space_(std::move(space)), fn_(std::move(fn)), stationary_(stationary) {
    if (!fn_) throw std::invalid_argument("oracle mass function must be set");
}

template <class S>
S BasicOracle<S>::mass(std::span<const StateSet> word) const {
    for (const auto& cell : word) {
        if (cell.size() != static_cast<std::size_t>(space_.size())) {
            throw std::invalid_argument("cylinder word cell sized to a different state space");
        }
    }
    return fn_(word);
}

template <class S>
S BasicOracle<S>::mass(std::initializer_list<StateSet> word) const {
    std::vector<StateSet> w(word);
    return mass(std::span<const StateSet>(w));
}

template <class S>
S BasicOracle<S>::mass(const CellWord& w) const {
    if (w.partition().space() != space_) {
        throw std::invalid_argument("cell word partition is over a different state space");
    }
    std::vector<StateSet> cells = w.cells();
    return mass(std::span<const StateSet>(cells));
}

template <class S>
BasicOracle<S> BasicOracle<S>::with_stationary_flag(bool stationary) const {
    return BasicOracle<S>(space_, fn_, stationary);
}

template class BasicOracle<double>;
template class BasicOracle<Rational>;

namespace {

template <class S>
bool weights_equal(const BasicDistribution<S>& a, const BasicDistribution<S>& b) {
    return a.weights() == b.weights();
}

// Row sums of a transition matrix against the declared tolerance regime.
template <class S>
void check_row_stochastic(const std::vector<std::vector<S>>& m, int k) {
    if (static_cast<int>(m.size()) != k) {
        throw std::invalid_argument("transition matrix must be k x k");
    }
    for (const auto& row : m) {
        if (static_cast<int>(row.size()) != k) {
            throw std::invalid_argument("transition matrix must be k x k");
        }
        S total = scalar_traits<S>::zero();
        for (const S& x : row) {
            if (x < scalar_traits<S>::zero()) {
                throw std::invalid_argument("transition entry is negative");
            }
            total += x;
        }
        if constexpr (scalar_traits<S>::exact) {
            if (total != scalar_traits<S>::one()) {
                throw std::invalid_argument("transition row must sum to exactly 1");
            }
        } else {
            if (std::abs(total - 1.0) > 1e-12) {
                throw std::invalid_argument("transition row sums to " + std::to_string(total) +
                                            ", expected 1 within 1e-12");
            }
        }
    }
}

}  // namespace

template <class S>
BasicMarkovSpec<S>::BasicMarkovSpec(StateSpace space, std::vector<std::vector<S>> transition,
                                    BasicDistribution<S> initial)
    : space_(std::move(space)), transition_(std::move(transition)), initial_(std::move(initial)) {
    const int k = space_.size();
    check_row_stochastic(transition_, k);
    if (initial_.size() != k) {
        throw std::invalid_argument("initial vector size does not match the state space");
    }
    stationary_ = true;
    for (int j = 0; j < k; ++j) {
        S together = scalar_traits<S>::zero();
        for (int i = 0; i < k; ++i) {
            together += initial_.weight(i) * transition_[static_cast<std::size_t>(i)]
                                                        [static_cast<std::size_t>(j)];
        }
        if constexpr (scalar_traits<S>::exact) {
            if (together != initial_.weight(j)) stationary_ = false;
        } else {
            if (std::abs(together - initial_.weight(j)) > 1e-10) stationary_ = false;
        }
    }
}

template class BasicMarkovSpec<double>;
template class BasicMarkovSpec<Rational>;

template <class S>
BasicTransformationSpec<S>::BasicTransformationSpec(StateSpace space, std::vector<int> map,
                                                    BasicDistribution<S> measure)
    : space_(std::move(space)), map_(std::move(map)), measure_(std::move(measure)) {
    const int k = space_.size();
    if (static_cast<int>(map_.size()) != k) {
        throw std::invalid_argument("transformation map size does not match the state space");
    }
    for (int y : map_) {
        if (y < 0 || y >= k) {
            throw std::invalid_argument("transformation map value out of range");
        }
    }
    if (measure_.size() != k) {
        throw std::invalid_argument("measure size does not match the state space");
    }
    measure_preserving_ = true;
    std::vector<S> pre(static_cast<std::size_t>(k), scalar_traits<S>::zero());
    for (int x = 0; x < k; ++x) {
        pre[static_cast<std::size_t>(map_[static_cast<std::size_t>(x)])] += measure_.weight(x);
    }
    for (int y = 0; y < k; ++y) {
        if constexpr (scalar_traits<S>::exact) {
            if (pre[static_cast<std::size_t>(y)] != measure_.weight(y)) measure_preserving_ = false;
        } else {
            if (std::abs(pre[static_cast<std::size_t>(y)] - measure_.weight(y)) > 1e-12) {
                measure_preserving_ = false;
            }
        }
    }
}

template class BasicTransformationSpec<double>;
template class BasicTransformationSpec<Rational>;

long IndexSequence::at(int i) const {
    if (i < 0) throw std::out_of_range("restriction index position must be nonnegative");
    const auto m = static_cast<std::size_t>(i);
    if (m < prefix.size()) return prefix[m];
    if (!tail_stride) {
        throw std::out_of_range("restriction index sequence has only " +
                                std::to_string(prefix.size()) + " entries and no tail stride");
    }
    return prefix.back() + *tail_stride * static_cast<long>(m - prefix.size() + 1);
}

bool IndexSequence::arithmetic() const {
    if (!tail_stride) return false;
    for (std::size_t i = 1; i < prefix.size(); ++i) {
        if (prefix[i] - prefix[i - 1] != *tail_stride) return false;
    }
    return true;
}

void IndexSequence::validate() const {
    if (prefix.empty()) {
        throw std::invalid_argument("restriction index sequence needs at least one entry");
    }
    if (prefix.front() < 0) {
        throw std::invalid_argument("restriction indices must be nonnegative");
    }
    for (std::size_t i = 1; i < prefix.size(); ++i) {
        if (prefix[i] <= prefix[i - 1]) {
            throw std::invalid_argument("restriction indices must be strictly increasing");
        }
    }
    if (tail_stride && *tail_stride < 1) {
        throw std::invalid_argument("restriction tail stride must be >= 1");
    }
}

template <class S>
BasicOracle<S> iid(const StateSpace& space, BasicDistribution<S> nu) {
    if (nu.size() != space.size()) {
        throw std::invalid_argument("distribution size does not match the state space");
    }
    auto fn = [nu = std::move(nu)](std::span<const StateSet> word) -> S {
        S total = scalar_traits<S>::one();
        for (const StateSet& cell : word) {
            total *= nu.mass_of(cell);
            if (scalar_traits<S>::is_zero(total)) return total;
        }
        return total;
    };
    return BasicOracle<S>(space, std::move(fn), true);
}

template <class S>
BasicOracle<S> product_sequence(const StateSpace& space,
                                std::vector<BasicDistribution<S>> prefix,
                                std::optional<BasicDistribution<S>> tail) {
    for (const auto& nu : prefix) {
        if (nu.size() != space.size()) {
            throw std::invalid_argument("marginal size does not match the state space");
        }
    }
    if (tail && tail->size() != space.size()) {
        throw std::invalid_argument("tail marginal size does not match the state space");
    }
    if (prefix.empty() && !tail) {
        throw std::invalid_argument("marginal sequence needs a prefix or a tail");
    }
    bool stationary = true;
    const BasicDistribution<S>* ref = tail ? &*tail : &prefix.front();
    for (const auto& nu : prefix) {
        if (!weights_equal(nu, *ref)) stationary = false;
    }
    auto fn = [prefix = std::move(prefix), tail = std::move(tail)](
                  std::span<const StateSet> word) -> S {
        S total = scalar_traits<S>::one();
        for (std::size_t j = 0; j < word.size(); ++j) {
            const BasicDistribution<S>* nu = nullptr;
            if (j < prefix.size()) {
                nu = &prefix[j];
            } else if (tail) {
                nu = &*tail;
            } else {
                throw std::out_of_range("word of length " + std::to_string(word.size()) +
                                        " exceeds the declared marginals (" +
                                        std::to_string(prefix.size()) + " entries, no tail)");
            }
            total *= nu->mass_of(word[j]);
            if (scalar_traits<S>::is_zero(total)) return total;
        }
        return total;
    };
    return BasicOracle<S>(space, std::move(fn), stationary);
}

template <class S>
BasicOracle<S> markov(BasicMarkovSpec<S> spec) {
    StateSpace space = spec.space();
    const bool stationary = spec.stationary();
    auto fn = [spec = std::move(spec)](std::span<const StateSet> word) -> S {
        if (word.empty()) return scalar_traits<S>::one();
        const int k = spec.space().size();
        std::vector<S> v(static_cast<std::size_t>(k), scalar_traits<S>::zero());
        for (auto s = word[0].find_first(); s != StateSet::npos; s = word[0].find_next(s)) {
            v[s] = spec.initial().weight(static_cast<int>(s));
        }
        std::vector<S> next(static_cast<std::size_t>(k));
        for (std::size_t j = 1; j < word.size(); ++j) {
            std::fill(next.begin(), next.end(), scalar_traits<S>::zero());
            for (int a = 0; a < k; ++a) {
                const S& va = v[static_cast<std::size_t>(a)];
                if (scalar_traits<S>::is_zero(va)) continue;
                const auto& row = spec.transition()[static_cast<std::size_t>(a)];
                for (auto b = word[j].find_first(); b != StateSet::npos; b = word[j].find_next(b)) {
                    next[b] += va * row[b];
                }
            }
            v.swap(next);
        }
        S total = scalar_traits<S>::zero();
        for (const S& x : v) total += x;
        return total;
    };
    return BasicOracle<S>(std::move(space), std::move(fn), stationary);
}

template <class S>
BasicOracle<S> from_transformation(BasicTransformationSpec<S> spec) {
    StateSpace space = spec.space();
    const bool stationary = spec.measure_preserving();
    auto fn = [spec = std::move(spec)](std::span<const StateSet> word) -> S {
        const int k = spec.space().size();
        S total = scalar_traits<S>::zero();
        for (int x = 0; x < k; ++x) {
            const S& w = spec.measure().weight(x);
            if (scalar_traits<S>::is_zero(w)) continue;
            int y = x;
            bool inside = true;
            for (const StateSet& cell : word) {
                if (!cell.test(static_cast<std::size_t>(y))) {
                    inside = false;
                    break;
                }
                y = spec.map()[static_cast<std::size_t>(y)];
            }
            if (inside) total += w;
        }
        return total;
    };
    return BasicOracle<S>(std::move(space), std::move(fn), stationary);
}

template <class S>
BasicOracle<S> convex_mix(const S& t, const BasicOracle<S>& mu, const BasicOracle<S>& rho) {
    if (t < scalar_traits<S>::zero() || t > scalar_traits<S>::one()) {
        throw std::invalid_argument("mixing weight must lie in [0,1]");
    }
    if (mu.space() != rho.space()) {
        throw std::invalid_argument("mixed oracles must share one state space");
    }
    const bool stationary = mu.declared_stationary() && rho.declared_stationary();
    S s = scalar_traits<S>::one() - t;
    auto fn = [t, s, mu, rho](std::span<const StateSet> word) -> S {
        return t * mu.mass(word) + s * rho.mass(word);
    };
    return BasicOracle<S>(mu.space(), std::move(fn), stationary);
}

int pair_index(int ix, int iy, int y_size) { return ix * y_size + iy; }

std::pair<int, int> pair_split(int idx, int y_size) { return {idx / y_size, idx % y_size}; }

int tuple_index(std::span<const int> digits, int base) {
    int idx = 0;
    for (int d : digits) idx = idx * base + d;
    return idx;
}

std::vector<int> tuple_split(int idx, int base, int k) {
    std::vector<int> digits(static_cast<std::size_t>(k));
    for (int d = k - 1; d >= 0; --d) {
        digits[static_cast<std::size_t>(d)] = idx % base;
        idx /= base;
    }
    return digits;
}

namespace {

// Disjoint rectangles A x B covering a subset of a pair space, grouping
// x-rows with identical y-slices.
std::vector<std::pair<StateSet, StateSet>> rectangle_decomposition(const StateSet& cell,
                                                                   int kx, int ky) {
    if (cell.count() == 1) {
        const int idx = static_cast<int>(cell.find_first());
        auto [x, y] = pair_split(idx, ky);
        StateSet a(static_cast<std::size_t>(kx));
        StateSet b(static_cast<std::size_t>(ky));
        a.set(static_cast<std::size_t>(x));
        b.set(static_cast<std::size_t>(y));
        return {{std::move(a), std::move(b)}};
    }
    std::map<StateSet, StateSet> by_slice;  // y-slice -> set of x's
    for (int x = 0; x < kx; ++x) {
        StateSet slice(static_cast<std::size_t>(ky));
        for (int y = 0; y < ky; ++y) {
            if (cell.test(static_cast<std::size_t>(pair_index(x, y, ky)))) {
                slice.set(static_cast<std::size_t>(y));
            }
        }
        if (slice.none()) continue;
        auto it = by_slice.try_emplace(slice, StateSet(static_cast<std::size_t>(kx))).first;
        it->second.set(static_cast<std::size_t>(x));
    }
    std::vector<std::pair<StateSet, StateSet>> out;
    out.reserve(by_slice.size());
    for (auto& [slice, xs] : by_slice) out.emplace_back(xs, slice);
    return out;
}

// Disjoint boxes (one cell per coordinate) covering a subset of a k-tuple
// space, grouping first digits with identical residual cells.
std::vector<std::vector<StateSet>> box_decomposition(const StateSet& cell, int base, int k) {
    if (k == 1) return {{cell}};
    if (cell.count() == 1) {
        std::vector<int> digits = tuple_split(static_cast<int>(cell.find_first()), base, k);
        std::vector<StateSet> box;
        box.reserve(static_cast<std::size_t>(k));
        for (int d : digits) {
            StateSet c(static_cast<std::size_t>(base));
            c.set(static_cast<std::size_t>(d));
            box.push_back(std::move(c));
        }
        return {std::move(box)};
    }
    std::size_t rest_size = 1;
    for (int i = 1; i < k; ++i) rest_size *= static_cast<std::size_t>(base);
    std::map<StateSet, StateSet> by_rest;  // residual cell -> first digits
    for (int d = 0; d < base; ++d) {
        StateSet rest(rest_size);
        for (std::size_t r = 0; r < rest_size; ++r) {
            if (cell.test(static_cast<std::size_t>(d) * rest_size + r)) rest.set(r);
        }
        if (rest.none()) continue;
        auto it = by_rest.try_emplace(rest, StateSet(static_cast<std::size_t>(base))).first;
        it->second.set(static_cast<std::size_t>(d));
    }
    std::vector<std::vector<StateSet>> out;
    for (auto& [rest, digits] : by_rest) {
        for (auto& sub : box_decomposition(rest, base, k - 1)) {
            std::vector<StateSet> box;
            box.reserve(static_cast<std::size_t>(k));
            box.push_back(digits);
            for (auto& c : sub) box.push_back(std::move(c));
            out.push_back(std::move(box));
        }
    }
    return out;
}

}  // namespace

template <class S>
BasicOracle<S> product_measure(const BasicOracle<S>& mu, const BasicOracle<S>& rho) {
    StateSpace prod = StateSpace::product(mu.space(), rho.space());
    const int kx = mu.space().size();
    const int ky = rho.space().size();
    const bool stationary = mu.declared_stationary() && rho.declared_stationary();
    auto fn = [mu, rho, kx, ky](std::span<const StateSet> word) -> S {
        const std::size_t n = word.size();
        std::vector<std::vector<std::pair<StateSet, StateSet>>> slots;
        slots.reserve(n);
        for (const StateSet& cell : word) {
            auto rects = rectangle_decomposition(cell, kx, ky);
            if (rects.empty()) return scalar_traits<S>::zero();
            slots.push_back(std::move(rects));
        }
        std::vector<StateSet> wx(n), wy(n);
        S total = scalar_traits<S>::zero();
        // Depth-first product over per-slot rectangle choices.
        std::vector<std::size_t> choice(n, 0);
        std::size_t depth = 0;
        while (true) {
            if (depth == n) {
                total += mu.mass(std::span<const StateSet>(wx)) *
                         rho.mass(std::span<const StateSet>(wy));
                if (n == 0) break;
                --depth;
                ++choice[depth];
            } else if (choice[depth] < slots[depth].size()) {
                wx[depth] = slots[depth][choice[depth]].first;
                wy[depth] = slots[depth][choice[depth]].second;
                ++depth;
                if (depth < n) choice[depth] = 0;
            } else {
                if (depth == 0) break;
                --depth;
                ++choice[depth];
            }
        }
        return total;
    };
    return BasicOracle<S>(std::move(prod), std::move(fn), stationary);
}

template <class S>
BasicOracle<S> shift_pushforward(const BasicOracle<S>& mu) {
    StateSet full = mu.space().full_set();
    auto fn = [mu, full](std::span<const StateSet> word) -> S {
        std::vector<StateSet> longer;
        longer.reserve(word.size() + 1);
        longer.push_back(full);
        longer.insert(longer.end(), word.begin(), word.end());
        return mu.mass(std::span<const StateSet>(longer));
    };
    return BasicOracle<S>(mu.space(), std::move(fn), mu.declared_stationary());
}

template <class S>
BasicOracle<S> restriction_pushforward(const BasicOracle<S>& mu, IndexSequence r) {
    r.validate();
    const bool stationary = mu.declared_stationary() && r.arithmetic();
    StateSet full = mu.space().full_set();
    auto fn = [mu, r = std::move(r), full](std::span<const StateSet> word) -> S {
        if (word.empty()) return scalar_traits<S>::one();
        const int n = static_cast<int>(word.size());
        const long length = r.at(n - 1) + 1;
        std::vector<StateSet> longer(static_cast<std::size_t>(length), full);
        for (int j = 0; j < n; ++j) {
            longer[static_cast<std::size_t>(r.at(j))] = word[static_cast<std::size_t>(j)];
        }
        return mu.mass(std::span<const StateSet>(longer));
    };
    return BasicOracle<S>(mu.space(), std::move(fn), stationary);
}

template <class S>
BasicOracle<S> dilation_pushforward(const BasicOracle<S>& mu, int k) {
    if (k < 1) throw std::invalid_argument("dilation factor must be >= 1");
    if (k == 1) return mu;
    auto fn = [mu, k](std::span<const StateSet> word) -> S {
        const std::size_t n = word.size();
        const std::size_t blocks = (n + static_cast<std::size_t>(k) - 1) / static_cast<std::size_t>(k);
        std::vector<StateSet> merged;
        merged.reserve(blocks);
        for (std::size_t b = 0; b < blocks; ++b) {
            StateSet cell = word[b * static_cast<std::size_t>(k)];
            const std::size_t end = std::min(n, (b + 1) * static_cast<std::size_t>(k));
            for (std::size_t j = b * static_cast<std::size_t>(k) + 1; j < end; ++j) {
                cell &= word[j];
            }
            if (cell.none()) return scalar_traits<S>::zero();
            merged.push_back(std::move(cell));
        }
        return mu.mass(std::span<const StateSet>(merged));
    };
    return BasicOracle<S>(mu.space(), std::move(fn), false);
}

template <class S>
BasicOracle<S> factor_pushforward(std::span<const int> f, const StateSpace& target,
                                  const BasicOracle<S>& mu) {
    if (f.size() != static_cast<std::size_t>(mu.space().size())) {
        throw std::invalid_argument("factor map size does not match the source space");
    }
    std::vector<int> map(f.begin(), f.end());
    for (int y : map) {
        if (y < 0 || y >= target.size()) {
            throw std::invalid_argument("factor map value outside the target space");
        }
    }
    const int kx = mu.space().size();
    auto fn = [mu, map = std::move(map), kx](std::span<const StateSet> word) -> S {
        std::vector<StateSet> pre;
        pre.reserve(word.size());
        for (const StateSet& cell : word) {
            StateSet p(static_cast<std::size_t>(kx));
            for (int x = 0; x < kx; ++x) {
                if (cell.test(static_cast<std::size_t>(map[static_cast<std::size_t>(x)]))) {
                    p.set(static_cast<std::size_t>(x));
                }
            }
            if (p.none()) return scalar_traits<S>::zero();
            pre.push_back(std::move(p));
        }
        return mu.mass(std::span<const StateSet>(pre));
    };
    return BasicOracle<S>(target, std::move(fn), mu.declared_stationary());
}

template <class S>
BasicOracle<S> block_recode(const BasicOracle<S>& mu, int k) {
    if (k < 1) throw std::invalid_argument("block length must be >= 1");
    if (k == 1) return mu;
    StateSpace tuple_space = StateSpace::power(mu.space(), k);
    const int base = mu.space().size();
    auto fn = [mu, base, k](std::span<const StateSet> word) -> S {
        const std::size_t n = word.size();
        std::vector<std::vector<std::vector<StateSet>>> slots;  // per slot: boxes of k cells
        slots.reserve(n);
        for (const StateSet& cell : word) {
            auto boxes = box_decomposition(cell, base, k);
            if (boxes.empty()) return scalar_traits<S>::zero();
            slots.push_back(std::move(boxes));
        }
        std::vector<StateSet> flat(n * static_cast<std::size_t>(k));
        S total = scalar_traits<S>::zero();
        std::vector<std::size_t> choice(n, 0);
        std::size_t depth = 0;
        while (true) {
            if (depth == n) {
                total += mu.mass(std::span<const StateSet>(flat));
                if (n == 0) break;
                --depth;
                ++choice[depth];
            } else if (choice[depth] < slots[depth].size()) {
                const auto& box = slots[depth][choice[depth]];
                for (int j = 0; j < k; ++j) {
                    flat[depth * static_cast<std::size_t>(k) + static_cast<std::size_t>(j)] =
                        box[static_cast<std::size_t>(j)];
                }
                ++depth;
                if (depth < n) choice[depth] = 0;
            } else {
                if (depth == 0) break;
                --depth;
                ++choice[depth];
            }
        }
        return total;
    };
    return BasicOracle<S>(std::move(tuple_space), std::move(fn), mu.declared_stationary());
}

#define STODYN_INSTANTIATE(S)                                                                  \
    template BasicOracle<S> iid<S>(const StateSpace&, BasicDistribution<S>);                   \
    template BasicOracle<S> product_sequence<S>(const StateSpace&,                             \
                                                std::vector<BasicDistribution<S>>,             \
                                                std::optional<BasicDistribution<S>>);          \
    template BasicOracle<S> markov<S>(BasicMarkovSpec<S>);                                     \
    template BasicOracle<S> from_transformation<S>(BasicTransformationSpec<S>);                \
    template BasicOracle<S> convex_mix<S>(const S&, const BasicOracle<S>&,                     \
                                          const BasicOracle<S>&);                              \
    template BasicOracle<S> product_measure<S>(const BasicOracle<S>&, const BasicOracle<S>&);  \
    template BasicOracle<S> shift_pushforward<S>(const BasicOracle<S>&);                       \
    template BasicOracle<S> restriction_pushforward<S>(const BasicOracle<S>&, IndexSequence);  \
    template BasicOracle<S> dilation_pushforward<S>(const BasicOracle<S>&, int);               \
    template BasicOracle<S> factor_pushforward<S>(std::span<const int>, const StateSpace&,     \
                                                  const BasicOracle<S>&);                      \
    template BasicOracle<S> block_recode<S>(const BasicOracle<S>&, int);

STODYN_INSTANTIATE(double)
STODYN_INSTANTIATE(Rational)

#undef STODYN_INSTANTIATE

}  // namespace stodyn
