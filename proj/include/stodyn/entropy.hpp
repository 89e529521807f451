#pragma once

#include "stodyn/core.hpp"
#include "stodyn/measures.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace stodyn {

/// Controls for cylinder-word enumeration. Enumeration is depth-first over
/// cell words, pruning branches whose prefix has zero mass; leaves visited
/// after pruning count against max_leaves. Workers split the first-symbol
/// branches; results are identical for every worker count because branch
/// subtotals are combined in a fixed order.
struct EnumOptions {
    std::size_t max_leaves = 2'000'000;
    int workers = 1;
};

/// Thrown when an enumeration would visit more leaf words than the cap.
class BudgetError : public std::runtime_error {
public:
    BudgetError(std::size_t cap, int cells, int n);
    std::size_t cap() const { return cap_; }

private:
    std::size_t cap_;
};

/// Block entropy E(mu, n-fold refinement of p) = -sum phi(mass(w)) over all
/// length-n cell words w, in nats.
double block_entropy(const CylinderOracle& mu, const Partition& p, int n,
                     const EnumOptions& options = {});

/// All positive leaf masses of the length-n refinement, in depth-first order.
/// The exact instantiation backs multiset identity checks in the test suite.
template <class S>
std::vector<S> block_masses(const BasicOracle<S>& mu, const Partition& p, int n,
                            const EnumOptions& options = {});

/// The sequence n -> (1/n) E(mu, p-blocks of length n) with diagnostics.
struct EntropySeries {
    std::vector<double> block_values;   ///< E_1..E_N (nats)
    std::vector<double> values;         ///< a_n = E_n / n
    int horizon = 0;
    bool monotone_nonincreasing = false;  ///< a_n nonincreasing within 1e-12
    bool source_stationary = false;
};

EntropySeries entropy_series(const CylinderOracle& mu, const Partition& p, int N,
                             const EnumOptions& options = {});

enum class EstimatePolicy {
    Auto,           ///< StationaryLast when the source is stationary, else TailWindowMax
    TailWindowMax,  ///< max over the last ceil(N/3) entries
    StationaryLast  ///< a_N; an upper bound for stationary sources
};

struct HsdEstimate {
    double value = 0.0;
    std::string policy;  ///< descriptor of the applied tail policy
    int horizon = 0;
    bool is_upper_bound = false;
    std::string note;
};

/// Finite-horizon surrogate for the limsup of the series.
HsdEstimate hsd_estimate(const EntropySeries& series,
                         EstimatePolicy policy = EstimatePolicy::Auto);

/// Partition-supremum entropy estimate. On a finite state space the singleton
/// partition refines every partition, so by refinement monotonicity the
/// supremum over partitions is attained there; only that partition is used.
HsdEstimate hsd_full(const CylinderOracle& mu, int N, const EnumOptions& options = {});

/// -sum_i p_i sum_j phi(p_ij) for a stationary chain. Throws
/// std::invalid_argument when the initial vector is not invariant.
double markov_closed_form(const MarkovSpec& spec);

/// Entropy of nu aggregated over the cells of p.
double iid_closed_form(const Distribution& nu, const Partition& p);

/// E(measure, join of T^-i-preimages of p for i < n), built from the joined
/// partition directly. Equals block_entropy(from_transformation(spec), p, n).
double transformation_block_entropy(const TransformationSpec& spec, const Partition& p,
                                    int n);

/// Cell masses of the joined partition behind transformation_block_entropy,
/// sorted; exact route for multiset identity checks.
template <class S>
std::vector<S> transformation_block_masses(const BasicTransformationSpec<S>& spec,
                                           const Partition& p, int n);

/// Conditional entropy of p given q at the first coordinate:
/// -sum_ij m_ij ln(m_ij / m_j) with m_j = mass([B_j]), m_ij = mass([A_i n B_j]).
/// Zero-mass terms contribute zero.
double conditional_entropy_first_coord(const CylinderOracle& mu, const Partition& p,
                                       const Partition& q);

}  // namespace stodyn
