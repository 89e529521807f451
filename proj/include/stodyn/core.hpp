#pragma once

#include <boost/dynamic_bitset.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace stodyn {

/// Exact scalar used by the rational evaluation mode.
using Rational = boost::multiprecision::cpp_rational;

/// Subset of state indices, sized to the owning state space.
using StateSet = boost::dynamic_bitset<>;

/// x * ln(x) extended by 0 at x = 0. Throws std::domain_error for x < 0.
double phi(double x);

/// A finite set of labeled states. Immutable after construction.
class StateSpace {
public:
    explicit StateSpace(std::vector<std::string> labels);

    /// States labeled "0", "1", ..., "k-1".
    static StateSpace with_size(int k);

    /// Pair space with labels "(a,b)"; index of (i,j) is i*|y| + j.
    static StateSpace product(const StateSpace& x, const StateSpace& y);

    /// k-tuple space with labels "(a,b,...)"; big-endian base-|x| indices.
    static StateSpace power(const StateSpace& x, int k);

    int size() const { return static_cast<int>(labels_.size()); }
    const std::string& label(int i) const;
    const std::vector<std::string>& labels() const { return labels_; }

    /// Index of a label, or -1 if absent.
    int index_of(const std::string& label) const;

    StateSet empty_set() const { return StateSet(labels_.size()); }
    StateSet full_set() const { return ~StateSet(labels_.size()); }
    StateSet singleton(int i) const;

    bool operator==(const StateSpace& other) const { return labels_ == other.labels_; }
    bool operator!=(const StateSpace& other) const { return !(*this == other); }

private:
    std::vector<std::string> labels_;
};

/// Ordered partition of a state space into nonempty disjoint cells covering it.
/// Cell order matters for reproducible output; entropy values never depend on it.
class Partition {
public:
    Partition(StateSpace space, std::vector<StateSet> cells);

    static Partition trivial(const StateSpace& space);
    static Partition singletons(const StateSpace& space);

    /// Cells given as lists of state labels, e.g. {{"a","b"},{"c"}}.
    static Partition from_labels(const StateSpace& space,
                                 const std::vector<std::vector<std::string>>& cells);

    const StateSpace& space() const { return space_; }
    int cell_count() const { return static_cast<int>(cells_.size()); }
    const StateSet& cell(int i) const;
    const std::vector<StateSet>& cells() const { return cells_; }
    int cell_of_state(int s) const;

    /// Equality of cell sets regardless of cell order.
    bool same_cells(const Partition& other) const;

    std::string to_string() const;

private:
    StateSpace space_;
    std::vector<StateSet> cells_;
    std::vector<int> cell_of_;
};

/// A finite sequence of cell indices of one partition; names a cylinder set.
/// Length 0 denotes the full-space cylinder.
class CellWord {
public:
    CellWord(Partition partition, std::vector<int> indices);

    int length() const { return static_cast<int>(indices_.size()); }
    const Partition& partition() const { return partition_; }
    const std::vector<int>& indices() const { return indices_; }

    /// Materializes the cells for oracle evaluation.
    std::vector<StateSet> cells() const;

    std::string to_string() const;

private:
    Partition partition_;
    std::vector<int> indices_;
};

template <class S>
struct scalar_traits;

template <>
struct scalar_traits<double> {
    static constexpr bool exact = false;
    static double zero() { return 0.0; }
    static double one() { return 1.0; }
    static bool is_zero(double x) { return x == 0.0; }
    static bool near(double a, double b, double tol) { return a <= b + tol && b <= a + tol; }
    static double sum_tolerance() { return 1e-12; }
};

template <>
struct scalar_traits<Rational> {
    static constexpr bool exact = true;
    static Rational zero() { return Rational(0); }
    static Rational one() { return Rational(1); }
    static bool is_zero(const Rational& x) { return x == 0; }
    static bool near(const Rational& a, const Rational& b, double) { return a == b; }
};

/// Probability weights over an index set. Weights are nonnegative, in [0,1],
/// and sum to 1 (exactly for Rational, within 1e-12 for double).
template <class S>
class BasicDistribution {
public:
    explicit BasicDistribution(std::vector<S> weights);

    static BasicDistribution uniform(int k);
    static BasicDistribution point_mass(int k, int i);

    int size() const { return static_cast<int>(weights_.size()); }
    const S& weight(int i) const { return weights_.at(static_cast<std::size_t>(i)); }
    const std::vector<S>& weights() const { return weights_; }

    /// Total weight of a state subset.
    S mass_of(const StateSet& a) const;

private:
    std::vector<S> weights_;
};

using Distribution = BasicDistribution<double>;
using RationalDistribution = BasicDistribution<Rational>;

/// Shannon entropy -sum phi(w_i) in nats; lies in [0, ln(size)].
double dist_entropy(const Distribution& d);

/// Common refinement {A_i n B_j} with empty intersections dropped.
/// Cells ordered by (i, j) of the factors.
Partition join(const Partition& p, const Partition& q);

/// True iff every cell of p is a union of cells of q (p is coarser or equal).
bool refines(const Partition& q, const Partition& p);

/// Partition of the domain by nonempty preimages of q's cells under f.
/// f maps domain state indices to q's state indices.
Partition preimage_partition(std::span<const int> f, const StateSpace& domain,
                             const Partition& q);

/// Partition {A_i x B_j} of the product space, indexed by (i, j) row-major.
Partition product_partition(const Partition& p, const Partition& q);

}  // namespace stodyn
