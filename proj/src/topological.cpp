#include "stodyn/topological.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace stodyn {

Sft::Sft(StateSpace space, std::vector<std::vector<int>> allowed)
    : space_(std::move(space)), allowed_(std::move(allowed)) {
    const int k = space_.size();
    if (static_cast<int>(allowed_.size()) != k) {
        throw std::invalid_argument("transition matrix must be k x k");
    }
    for (const auto& row : allowed_) {
        if (static_cast<int>(row.size()) != k) {
            throw std::invalid_argument("transition matrix must be k x k");
        }
        for (int x : row) {
            if (x != 0 && x != 1) {
                throw std::invalid_argument("transition matrix entries must be 0 or 1");
            }
        }
    }
    // States without an allowed continuation in both directions cannot lie on
    // any point of the subshift; drop them until the matrix stabilizes.
    std::vector<bool> alive(static_cast<std::size_t>(k), true);
    bool changed = true;
    while (changed) {
        changed = false;
        for (int s = 0; s < k; ++s) {
            if (!alive[static_cast<std::size_t>(s)]) continue;
            bool out = false, in = false;
            for (int t = 0; t < k; ++t) {
                if (!alive[static_cast<std::size_t>(t)]) continue;
                if (allowed_[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)]) out = true;
                if (allowed_[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)]) in = true;
            }
            if (!out || !in) {
                alive[static_cast<std::size_t>(s)] = false;
                warnings_.push_back("state '" + space_.label(s) + "' trimmed: no allowed " +
                                    (out ? "incoming" : "outgoing") + " continuation");
                changed = true;
            }
        }
    }
    for (int s = 0; s < k; ++s) {
        if (alive[static_cast<std::size_t>(s)]) kept_.push_back(s);
    }
    trimmed_.assign(kept_.size(), std::vector<int>(kept_.size(), 0));
    for (std::size_t a = 0; a < kept_.size(); ++a) {
        for (std::size_t b = 0; b < kept_.size(); ++b) {
            trimmed_[a][b] = allowed_[static_cast<std::size_t>(kept_[a])]
                                     [static_cast<std::size_t>(kept_[b])];
        }
    }
}

bool Sft::state_kept(int s) const {
    return std::binary_search(kept_.begin(), kept_.end(), s);
}

bool Sft::transition_allowed(int a, int b) const {
    if (a < 0 || b < 0 || a >= space_.size() || b >= space_.size()) return false;
    return allowed_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] == 1 &&
           state_kept(a) && state_kept(b);
}

std::uint64_t word_complexity(const Sft& s, int n) {
    if (n < 1) throw std::invalid_argument("word length must be >= 1");
    const std::size_t m = s.kept_states().size();
    if (m == 0) return 0;
    // Row sums of trimmed^{n-1}: iterate the count vector, O(n m^2).
    std::vector<std::uint64_t> counts(m, 1);
    for (int step = 1; step < n; ++step) {
        std::vector<std::uint64_t> next(m, 0);
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t b = 0; b < m; ++b) {
                if (s.trimmed()[a][b]) next[a] += counts[b];
            }
        }
        counts.swap(next);
    }
    std::uint64_t total = 0;
    for (std::uint64_t c : counts) total += c;
    return total;
}

SpectralRadiusResult spectral_radius(const std::vector<std::vector<double>>& m,
                                     double rel_tol, int max_iterations) {
    const std::size_t k = m.size();
    if (k == 0) throw std::invalid_argument("matrix must be nonempty");
    for (const auto& row : m) {
        if (row.size() != k) throw std::invalid_argument("matrix must be square");
        for (double x : row) {
            if (x < 0.0 || !std::isfinite(x)) {
                throw std::invalid_argument("matrix entries must be finite and nonnegative");
            }
        }
    }
    // Iterate on m + I: adding the identity makes every irreducible matrix
    // primitive, so periodic transition structures still converge. The
    // spectral radius shifts by exactly 1.
    SpectralRadiusResult result;
    std::vector<double> v(k, 1.0 / static_cast<double>(k));
    std::vector<double> w(k);
    for (int it = 1; it <= max_iterations; ++it) {
        for (std::size_t i = 0; i < k; ++i) {
            double acc = v[i];  // the +I term
            for (std::size_t j = 0; j < k; ++j) acc += m[i][j] * v[j];
            w[i] = acc;
        }
        double lambda = 0.0;
        for (double x : w) lambda += x;  // sum(v) == 1, so sum(w) estimates the eigenvalue
        double residual = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            residual = std::max(residual, std::abs(w[i] - lambda * v[i]));
        }
        for (std::size_t i = 0; i < k; ++i) v[i] = w[i] / lambda;
        result.iterations = it;
        result.value = lambda - 1.0;
        if (residual <= rel_tol * lambda) {
            result.converged = true;
            break;
        }
    }
    result.eigenvector = std::move(v);
    return result;
}

HtEstimate ht_estimate(const Sft& s, int N) {
    if (N < 2) throw std::invalid_argument("horizon must be >= 2");
    HtEstimate est;
    if (s.empty()) {
        est.empty = true;
        est.exact = -std::numeric_limits<double>::infinity();
        est.converged = true;
        est.note = "no state admits a biinfinite path; the subshift is empty";
        return est;
    }
    est.per_n.reserve(static_cast<std::size_t>(N));
    for (int n = 1; n <= N; ++n) {
        est.per_n.push_back(std::log(static_cast<double>(word_complexity(s, n))) /
                            static_cast<double>(n));
    }
    std::vector<std::vector<double>> md(s.trimmed().size(),
                                        std::vector<double>(s.trimmed().size(), 0.0));
    for (std::size_t a = 0; a < md.size(); ++a) {
        for (std::size_t b = 0; b < md.size(); ++b) {
            md[a][b] = static_cast<double>(s.trimmed()[a][b]);
        }
    }
    SpectralRadiusResult sr = spectral_radius(md);
    est.exact = std::log(sr.value);
    est.converged = sr.converged;
    est.note = "singleton cover is the finest open cover of a finite discrete alphabet "
               "and attains the supremum over covers";
    return est;
}

std::vector<std::vector<int>> strongly_connected_components(
    const std::vector<std::vector<int>>& allowed) {
    const int k = static_cast<int>(allowed.size());
    std::vector<int> index(static_cast<std::size_t>(k), -1);
    std::vector<int> low(static_cast<std::size_t>(k), 0);
    std::vector<bool> on_stack(static_cast<std::size_t>(k), false);
    std::vector<int> stack;
    std::vector<std::vector<int>> components;
    int counter = 0;

    std::function<void(int)> strongconnect = [&](int v) {
        index[static_cast<std::size_t>(v)] = low[static_cast<std::size_t>(v)] = counter++;
        stack.push_back(v);
        on_stack[static_cast<std::size_t>(v)] = true;
        for (int w = 0; w < k; ++w) {
            if (!allowed[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)]) continue;
            if (index[static_cast<std::size_t>(w)] < 0) {
                strongconnect(w);
                low[static_cast<std::size_t>(v)] =
                    std::min(low[static_cast<std::size_t>(v)], low[static_cast<std::size_t>(w)]);
            } else if (on_stack[static_cast<std::size_t>(w)]) {
                low[static_cast<std::size_t>(v)] =
                    std::min(low[static_cast<std::size_t>(v)], index[static_cast<std::size_t>(w)]);
            }
        }
        if (low[static_cast<std::size_t>(v)] == index[static_cast<std::size_t>(v)]) {
            std::vector<int> comp;
            while (true) {
                int w = stack.back();
                stack.pop_back();
                on_stack[static_cast<std::size_t>(w)] = false;
                comp.push_back(w);
                if (w == v) break;
            }
            std::sort(comp.begin(), comp.end());
            components.push_back(std::move(comp));
        }
    };
    for (int v = 0; v < k; ++v) {
        if (index[static_cast<std::size_t>(v)] < 0) strongconnect(v);
    }
    return components;
}

MarkovSpec parry_measure(const Sft& s) {
    const int k = s.space().size();
    auto components = strongly_connected_components(s.allowed());
    const bool single_loop_missing = (k == 1 && s.allowed()[0][0] == 0);
    if (components.size() != 1 || single_loop_missing) {
        std::ostringstream msg;
        msg << "maximal-entropy chain needs an irreducible transition matrix; "
            << "strongly connected components:";
        for (const auto& comp : components) {
            msg << " {";
            for (std::size_t i = 0; i < comp.size(); ++i) {
                if (i) msg << ",";
                msg << s.space().label(comp[i]);
            }
            msg << "}";
        }
        throw std::invalid_argument(msg.str());
    }

    std::vector<std::vector<double>> m(static_cast<std::size_t>(k),
                                       std::vector<double>(static_cast<std::size_t>(k), 0.0));
    std::vector<std::vector<double>> mt = m;
    for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
            double x = static_cast<double>(s.allowed()[static_cast<std::size_t>(a)]
                                                      [static_cast<std::size_t>(b)]);
            m[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = x;
            mt[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = x;
        }
    }
    SpectralRadiusResult right = spectral_radius(m, 1e-13, 50000);
    SpectralRadiusResult left = spectral_radius(mt, 1e-13, 50000);
    if (!right.converged || !left.converged) {
        throw std::runtime_error("power iteration for the maximal-entropy chain did not converge");
    }
    const double lambda = right.value;
    const std::vector<double>& v = right.eigenvector;
    const std::vector<double>& u = left.eigenvector;

    std::vector<std::vector<double>> p(static_cast<std::size_t>(k),
                                       std::vector<double>(static_cast<std::size_t>(k), 0.0));
    for (int i = 0; i < k; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < k; ++j) {
            double x = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                       v[static_cast<std::size_t>(j)] /
                       (lambda * v[static_cast<std::size_t>(i)]);
            p[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = x;
            row_sum += x;
        }
        for (int j = 0; j < k; ++j) {
            p[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] /= row_sum;
        }
    }
    std::vector<double> pi(static_cast<std::size_t>(k));
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
        pi[static_cast<std::size_t>(i)] =
            u[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
        total += pi[static_cast<std::size_t>(i)];
    }
    for (double& x : pi) x /= total;

    MarkovSpec spec(s.space(), std::move(p), Distribution(std::move(pi)));
    if (!spec.stationary()) {
        throw std::runtime_error("maximal-entropy chain initial vector failed the "
                                 "stationarity tolerance");
    }
    const double h = markov_closed_form(spec);
    if (std::abs(h - std::log(lambda)) > 1e-9) {
        throw std::runtime_error("maximal-entropy chain entropy " + std::to_string(h) +
                                 " deviates from ln(spectral radius) beyond 1e-9");
    }
    return spec;
}

SupportCheckResult support_check(const CylinderOracle& mu, const Sft& s, int n,
                                 const EnumOptions& options) {
    if (n < 1) throw std::invalid_argument("horizon must be >= 1");
    if (mu.space() != s.space()) {
        throw std::invalid_argument("oracle and subshift must share one state space");
    }
    const int k = s.space().size();
    std::vector<int> word;
    std::vector<StateSet> cells;
    word.reserve(static_cast<std::size_t>(n));
    cells.reserve(static_cast<std::size_t>(n));
    std::size_t visited = 0;

    SupportCheckResult result;
    std::function<bool()> dfs = [&]() -> bool {
        if (static_cast<int>(word.size()) == n) return true;
        for (int t = 0; t < k; ++t) {
            word.push_back(t);
            cells.push_back(s.space().singleton(t));
            const double mass = mu.mass(std::span<const StateSet>(cells));
            if (mass > 0.0) {
                if (++visited > options.max_leaves) {
                    throw BudgetError(options.max_leaves, k, n);
                }
                const bool admissible =
                    word.size() == 1 ? s.state_kept(t)
                                     : s.transition_allowed(word[word.size() - 2], t);
                if (!admissible) {
                    result.supported = false;
                    result.witness = word;
                    return false;
                }
                if (!dfs()) return false;
            }
            word.pop_back();
            cells.pop_back();
        }
        return true;
    };
    dfs();
    return result;
}

}  // namespace stodyn
