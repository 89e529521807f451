#include "stodyn/core.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

namespace stodyn {

double phi(double x) {
    if (x < 0.0) {
        throw std::domain_error("phi: negative argument " + std::to_string(x));
    }
    if (x == 0.0) return 0.0;
    return x * std::log(x);
}

StateSpace::StateSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) {
        throw std::invalid_argument("state space must have at least one state");
    }
    std::unordered_set<std::string> seen;
    for (const auto& l : labels_) {
        if (!seen.insert(l).second) {
            throw std::invalid_argument("duplicate state label '" + l + "'");
        }
    }
}

StateSpace StateSpace::with_size(int k) {
    if (k < 1) throw std::invalid_argument("state space size must be >= 1");
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) labels.push_back(std::to_string(i));
    return StateSpace(std::move(labels));
}

StateSpace StateSpace::product(const StateSpace& x, const StateSpace& y) {
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(x.size()) * static_cast<std::size_t>(y.size()));
    for (int i = 0; i < x.size(); ++i) {
        for (int j = 0; j < y.size(); ++j) {
            labels.push_back("(" + x.label(i) + "," + y.label(j) + ")");
        }
    }
    return StateSpace(std::move(labels));
}

StateSpace StateSpace::power(const StateSpace& x, int k) {
    if (k < 1) throw std::invalid_argument("power space exponent must be >= 1");
    if (k == 1) return x;
    std::size_t total = 1;
    for (int i = 0; i < k; ++i) total *= static_cast<std::size_t>(x.size());
    std::vector<std::string> labels;
    labels.reserve(total);
    std::vector<int> digits(static_cast<std::size_t>(k), 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rest = idx;
        for (int d = k - 1; d >= 0; --d) {
            digits[static_cast<std::size_t>(d)] = static_cast<int>(rest % static_cast<std::size_t>(x.size()));
            rest /= static_cast<std::size_t>(x.size());
        }
        std::string l = "(";
        for (int d = 0; d < k; ++d) {
            if (d > 0) l += ",";
            l += x.label(digits[static_cast<std::size_t>(d)]);
        }
        l += ")";
        labels.push_back(std::move(l));
    }
    return StateSpace(std::move(labels));
}

const std::string& StateSpace::label(int i) const {
    if (i < 0 || i >= size()) {
        throw std::out_of_range("state index " + std::to_string(i) + " out of range");
    }
    return labels_[static_cast<std::size_t>(i)];
}

int StateSpace::index_of(const std::string& label) const {
    for (int i = 0; i < size(); ++i) {
        if (labels_[static_cast<std::size_t>(i)] == label) return i;
    }
    return -1;
}

StateSet StateSpace::singleton(int i) const {
    if (i < 0 || i >= size()) {
        throw std::out_of_range("state index " + std::to_string(i) + " out of range");
    }
    StateSet s(labels_.size());
    s.set(static_cast<std::size_t>(i));
    return s;
}

Partition::Partition(StateSpace space, std::vector<StateSet> cells)
    : space_(std::move(space)), cells_(std::move(cells)) {
    if (cells_.empty()) throw std::invalid_argument("partition must have at least one cell");
    cell_of_.assign(static_cast<std::size_t>(space_.size()), -1);
    for (std::size_t c = 0; c < cells_.size(); ++c) {
        const StateSet& cell = cells_[c];
        if (cell.size() != static_cast<std::size_t>(space_.size())) {
            throw std::invalid_argument("partition cell sized to a different state space");
        }
        if (cell.none()) throw std::invalid_argument("partition cell is empty");
        for (auto s = cell.find_first(); s != StateSet::npos; s = cell.find_next(s)) {
            if (cell_of_[s] != -1) {
                throw std::invalid_argument("state '" + space_.label(static_cast<int>(s)) +
                                            "' appears in more than one cell");
            }
            cell_of_[s] = static_cast<int>(c);
        }
    }
    for (std::size_t s = 0; s < cell_of_.size(); ++s) {
        if (cell_of_[s] == -1) {
            throw std::invalid_argument("state '" + space_.label(static_cast<int>(s)) +
                                        "' is not covered by any cell");
        }
    }
}

Partition Partition::trivial(const StateSpace& space) {
    return Partition(space, {space.full_set()});
}

Partition Partition::singletons(const StateSpace& space) {
    std::vector<StateSet> cells;
    cells.reserve(static_cast<std::size_t>(space.size()));
    for (int i = 0; i < space.size(); ++i) cells.push_back(space.singleton(i));
    return Partition(space, std::move(cells));
}

Partition Partition::from_labels(const StateSpace& space,
                                 const std::vector<std::vector<std::string>>& cells) {
    std::vector<StateSet> sets;
    sets.reserve(cells.size());
    for (const auto& cell : cells) {
        StateSet s = space.empty_set();
        for (const auto& label : cell) {
            int i = space.index_of(label);
            if (i < 0) throw std::invalid_argument("unknown state label '" + label + "'");
            s.set(static_cast<std::size_t>(i));
        }
        sets.push_back(std::move(s));
    }
    return Partition(space, std::move(sets));
}

const StateSet& Partition::cell(int i) const {
    if (i < 0 || i >= cell_count()) {
        throw std::out_of_range("cell index " + std::to_string(i) + " out of range");
    }
    return cells_[static_cast<std::size_t>(i)];
}

int Partition::cell_of_state(int s) const {
    if (s < 0 || s >= space_.size()) {
        throw std::out_of_range("state index " + std::to_string(s) + " out of range");
    }
    return cell_of_[static_cast<std::size_t>(s)];
}

bool Partition::same_cells(const Partition& other) const {
    if (space_ != other.space_ || cells_.size() != other.cells_.size()) return false;
    std::set<std::vector<bool>> mine, theirs;
    auto key = [](const StateSet& s) {
        std::vector<bool> v(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) v[i] = s.test(i);
        return v;
    };
    for (const auto& c : cells_) mine.insert(key(c));
    for (const auto& c : other.cells_) theirs.insert(key(c));
    return mine == theirs;
}

std::string Partition::to_string() const {
    std::ostringstream out;
    out << "{";
    for (std::size_t c = 0; c < cells_.size(); ++c) {
        if (c > 0) out << " | ";
        bool first = true;
        for (auto s = cells_[c].find_first(); s != StateSet::npos; s = cells_[c].find_next(s)) {
            if (!first) out << " ";
            out << space_.label(static_cast<int>(s));
            first = false;
        }
    }
    out << "}";
    return out.str();
}

CellWord::CellWord(Partition partition, std::vector<int> indices)
    : partition_(std::move(partition)), indices_(std::move(indices)) {
    for (int i : indices_) {
        if (i < 0 || i >= partition_.cell_count()) {
            throw std::invalid_argument("cell index " + std::to_string(i) +
                                        " out of range for partition");
        }
    }
}

std::vector<StateSet> CellWord::cells() const {
    std::vector<StateSet> out;
    out.reserve(indices_.size());
    for (int i : indices_) out.push_back(partition_.cell(i));
    return out;
}

std::string CellWord::to_string() const {
    std::ostringstream out;
    out << "[";
    for (std::size_t i = 0; i < indices_.size(); ++i) {
        if (i > 0) out << " ";
        out << indices_[i];
    }
    out << "]";
    return out.str();
}

template <class S>
BasicDistribution<S>::BasicDistribution(std::vector<S> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw std::invalid_argument("distribution must have at least one weight");
    S total = scalar_traits<S>::zero();
    for (const S& w : weights_) {
        if (w < scalar_traits<S>::zero() || w > scalar_traits<S>::one()) {
            throw std::invalid_argument("distribution weight outside [0,1]");
        }
        total += w;
    }
    if constexpr (scalar_traits<S>::exact) {
        if (total != scalar_traits<S>::one()) {
            throw std::invalid_argument("distribution weights must sum to exactly 1");
        }
    } else {
        if (std::abs(total - 1.0) > scalar_traits<S>::sum_tolerance()) {
            throw std::invalid_argument("distribution weights sum to " + std::to_string(total) +
                                        ", expected 1 within 1e-12");
        }
    }
}

template <class S>
BasicDistribution<S> BasicDistribution<S>::uniform(int k) {
    if (k < 1) throw std::invalid_argument("uniform distribution needs k >= 1");
    std::vector<S> w;
    w.reserve(static_cast<std::size_t>(k));
    if constexpr (scalar_traits<S>::exact) {
        for (int i = 0; i < k; ++i) w.push_back(S(1) / S(k));
    } else {
        for (int i = 0; i < k; ++i) w.push_back(1.0 / static_cast<double>(k));
    }
    return BasicDistribution<S>(std::move(w));
}

template <class S>
BasicDistribution<S> BasicDistribution<S>::point_mass(int k, int i) {
    if (i < 0 || i >= k) throw std::invalid_argument("point mass index out of range");
    std::vector<S> w(static_cast<std::size_t>(k), scalar_traits<S>::zero());
    w[static_cast<std::size_t>(i)] = scalar_traits<S>::one();
    return BasicDistribution<S>(std::move(w));
}

template <class S>
S BasicDistribution<S>::mass_of(const StateSet& a) const {
    if (a.size() != weights_.size()) {
        throw std::invalid_argument("state set sized to a different state space");
    }
    S total = scalar_traits<S>::zero();
    for (auto s = a.find_first(); s != StateSet::npos; s = a.find_next(s)) {
        total += weights_[s];
    }
    return total;
}

template class BasicDistribution<double>;
template class BasicDistribution<Rational>;

double dist_entropy(const Distribution& d) {
    double h = 0.0;
    for (double w : d.weights()) h -= phi(w);
    return h;
}

Partition join(const Partition& p, const Partition& q) {
    if (p.space() != q.space()) {
        throw std::invalid_argument("join: partitions over different state spaces");
    }
    std::vector<StateSet> cells;
    for (int i = 0; i < p.cell_count(); ++i) {
        for (int j = 0; j < q.cell_count(); ++j) {
            StateSet c = p.cell(i) & q.cell(j);
            if (c.any()) cells.push_back(std::move(c));
        }
    }
    return Partition(p.space(), std::move(cells));
}

bool refines(const Partition& q, const Partition& p) {
    if (p.space() != q.space()) {
        throw std::invalid_argument("refines: partitions over different state spaces");
    }
    // p is a union of q-cells iff no q-cell straddles two p-cells.
    for (int j = 0; j < q.cell_count(); ++j) {
        const StateSet& cell = q.cell(j);
        auto first = cell.find_first();
        int target = p.cell_of_state(static_cast<int>(first));
        for (auto s = cell.find_next(first); s != StateSet::npos; s = cell.find_next(s)) {
            if (p.cell_of_state(static_cast<int>(s)) != target) return false;
        }
    }
    return true;
}

Partition preimage_partition(std::span<const int> f, const StateSpace& domain,
                             const Partition& q) {
    if (f.size() != static_cast<std::size_t>(domain.size())) {
        throw std::invalid_argument("map size does not match domain size");
    }
    for (int y : f) {
        if (y < 0 || y >= q.space().size()) {
            throw std::invalid_argument("map value " + std::to_string(y) +
                                        " outside the target space");
        }
    }
    std::vector<StateSet> cells;
    for (int j = 0; j < q.cell_count(); ++j) {
        StateSet pre = domain.empty_set();
        for (std::size_t x = 0; x < f.size(); ++x) {
            if (q.cell(j).test(static_cast<std::size_t>(f[x]))) pre.set(x);
        }
        if (pre.any()) cells.push_back(std::move(pre));
    }
    return Partition(domain, std::move(cells));
}

Partition product_partition(const Partition& p, const Partition& q) {
    StateSpace prod = StateSpace::product(p.space(), q.space());
    const int ky = q.space().size();
    std::vector<StateSet> cells;
    cells.reserve(static_cast<std::size_t>(p.cell_count()) *
                  static_cast<std::size_t>(q.cell_count()));
    for (int i = 0; i < p.cell_count(); ++i) {
        for (int j = 0; j < q.cell_count(); ++j) {
            StateSet c = prod.empty_set();
            const StateSet& a = p.cell(i);
            const StateSet& b = q.cell(j);
            for (auto x = a.find_first(); x != StateSet::npos; x = a.find_next(x)) {
                for (auto y = b.find_first(); y != StateSet::npos; y = b.find_next(y)) {
                    c.set(static_cast<std::size_t>(static_cast<int>(x) * ky + static_cast<int>(y)));
                }
            }
            cells.push_back(std::move(c));
        }
    }
    return Partition(prod, std::move(cells));
}

}  // namespace stodyn
