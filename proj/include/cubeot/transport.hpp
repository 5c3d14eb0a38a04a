#pragma once
// Exact Wasserstein-1 distance under the Hamming metric.
//
// Measures enter as rationals (empirical counts k/N, uniform 1/2^n, dense
// tables rationalized at a bounded denominator), masses are scaled to
// integers by the common denominator, and costs are integer Hamming
// distances, so the optimal value is an exact rational and the two
// solvers below must agree bit for bit:
//
//   * wasserstein_exact - primal network simplex with a strongly feasible
//     spanning-tree basis on the bipartite support graph;
//   * wasserstein_ssp   - successive shortest paths with Johnson
//     potentials, kept deliberately separate as a cross-check.
//
// The simplex solution also carries a Kantorovich dual witness: a
// 1-Lipschitz potential table with zero duality gap.

#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "cubeot/cube.hpp"
#include "cubeot/fourier.hpp"
#include "cubeot/rational.hpp"

namespace cubeot {

struct ResourceError : std::runtime_error {
    explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

struct TransportOptions {
    std::size_t max_nodes = 16384;
    std::size_t max_edges = std::size_t(1) << 25;
    std::size_t max_ssp_edges = std::size_t(1) << 22;
    // Keeps cost * scaled mass inside 64 bits (diameter <= 30).
    long long max_common_denominator = 4'000'000'000'000'000LL;
    long long dense_denominator = 1'000'000'000LL;
};

// A probability measure with rational masses: sorted positive atoms
// num/den with sum num = den.
struct RationalMeasure {
    int n = 1;
    long long den = 1;
    std::vector<std::pair<std::uint32_t, long long>> atoms;

    static RationalMeasure uniform(int n_) {
        detail::require(n_ >= 1 && n_ <= kMaxDim, "RationalMeasure: dimension out of range");
        if (n_ > 20) throw ResourceError("uniform measure support too large to materialize");
        RationalMeasure m;
        m.n = n_;
        m.den = (long long)1 << n_;
        m.atoms.reserve((std::size_t)1 << n_);
        for (std::uint32_t x = 0; x < (std::uint32_t(1) << n_); ++x) m.atoms.emplace_back(x, 1);
        return m;
    }

    static RationalMeasure dirac(CubePoint x) {
        RationalMeasure m;
        m.n = x.n;
        m.den = 1;
        m.atoms.emplace_back(x.bits, 1);
        return m;
    }

    static RationalMeasure from_empirical(const EmpiricalMeasure& e) {
        RationalMeasure m;
        m.n = e.n;
        m.den = e.total;
        m.atoms = e.counts;
        return m;
    }

    // Largest-remainder rounding at a fixed denominator; the result is an
    // exactly normalized rational measure.
    static RationalMeasure from_dense(const DenseMeasure& d, long long denominator = 1'000'000'000LL) {
        detail::require(denominator >= 1, "from_dense: denominator must be positive");
        RationalMeasure m;
        m.n = d.n;
        m.den = denominator;
        std::vector<std::pair<double, std::uint32_t>> remainders;
        long long assigned = 0;
        std::vector<long long> num(d.mass.size(), 0);
        for (std::uint32_t x = 0; x < d.mass.size(); ++x) {
            const double scaled = d.mass[x] * (double)denominator;
            const long long base = (long long)std::floor(scaled);
            num[x] = base;
            assigned += base;
            remainders.push_back({scaled - (double)base, x});
        }
        long long leftover = denominator - assigned;
        std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        for (std::size_t i = 0; leftover > 0 && i < remainders.size(); ++i, --leftover)
            num[remainders[i].second] += 1;
        for (std::uint32_t x = 0; x < num.size(); ++x)
            if (num[x] > 0) m.atoms.emplace_back(x, num[x]);
        return m;
    }

    double mass(std::uint32_t bits) const {
        auto it = std::lower_bound(atoms.begin(), atoms.end(), bits,
                                   [](const auto& e, std::uint32_t b) { return e.first < b; });
        return (it != atoms.end() && it->first == bits) ? double(it->second) / double(den) : 0.0;
    }
};

inline double expectation(const CubeFunction& f, const RationalMeasure& m) {
    detail::require(f.n == m.n, "expectation: dimension mismatch");
    double s = 0.0;
    for (const auto& [bits, num] : m.atoms) s += f.values[bits] * (double)num;
    return s / (double)m.den;
}

struct PlanEntry {
    std::uint32_t source = 0;
    std::uint32_t target = 0;
    Rational mass;
};

struct TransportSolution {
    int n = 1;
    double value = 0.0;
    Rational exact_value;
    std::vector<PlanEntry> plan;
    // The Kantorovich potential on the union of the two supports,
    // 1-Lipschitz with zero duality gap against exact_value.
    std::vector<std::pair<std::uint32_t, double>> potentials;

    double potential(std::uint32_t bits) const {
        auto it = std::lower_bound(potentials.begin(), potentials.end(), bits,
                                   [](const auto& e, std::uint32_t b) { return e.first < b; });
        detail::require(it != potentials.end() && it->first == bits,
                        "potential: point not in support union");
        return it->second;
    }
};

namespace detail {

inline long long common_denominator(long long a, long long b, long long limit) {
    const long long g = std::gcd(a, b);
    const __int128 l = (__int128)(a / g) * b;
    if (l > (__int128)limit)
        throw ResourceError("transport: common denominator exceeds configured limit");
    return (long long)l;
}

// Scaled integer instance over the two supports with the shared mass
// cancelled. For a metric cost the common part can ride the diagonal at
// zero cost, which shrinks the simplex instance without changing the
// optimal value; the plan gets the diagonal entries back afterwards.
struct TransportInstance {
    int n = 1;
    long long scale = 1;
    std::vector<std::uint32_t> src_bits, dst_bits;
    std::vector<long long> supply, demand;
    std::vector<std::pair<std::uint32_t, long long>> diagonal;
};

inline void validate_measure(const RationalMeasure& m) {
    require(m.n >= 1 && m.n <= kMaxDim, "transport: measure dimension out of range");
    require(m.den >= 1, "transport: nonpositive denominator");
    long long total = 0;
    std::uint32_t prev = 0;
    bool first = true;
    for (const auto& [bits, num] : m.atoms) {
        require(num > 0, "transport: nonpositive atom mass");
        require((std::uint64_t)bits < (std::uint64_t(1) << m.n), "transport: atom outside the cube");
        require(first || bits > prev, "transport: atoms not sorted");
        prev = bits;
        first = false;
        total += num;
    }
    require(total == m.den, "transport: masses do not sum to 1");
}

inline TransportInstance build_instance(const RationalMeasure& a, const RationalMeasure& b,
                                        const TransportOptions& opts, bool cancel_common) {
    require(a.n == b.n, "transport: dimension mismatch");
    validate_measure(a);
    validate_measure(b);
    TransportInstance inst;
    inst.n = a.n;
    inst.scale = common_denominator(a.den, b.den, opts.max_common_denominator);
    const long long fa = inst.scale / a.den, fb = inst.scale / b.den;
    std::size_t ia = 0, ib = 0;
    while (ia < a.atoms.size() || ib < b.atoms.size()) {
        const bool take_a = ib == b.atoms.size() ||
                            (ia < a.atoms.size() && a.atoms[ia].first < b.atoms[ib].first);
        const bool take_b = ia == a.atoms.size() ||
                            (ib < b.atoms.size() && b.atoms[ib].first < a.atoms[ia].first);
        if (take_a) {
            inst.src_bits.push_back(a.atoms[ia].first);
            inst.supply.push_back(a.atoms[ia].second * fa);
            ++ia;
        } else if (take_b) {
            inst.dst_bits.push_back(b.atoms[ib].first);
            inst.demand.push_back(b.atoms[ib].second * fb);
            ++ib;
        } else {
            const std::uint32_t bits = a.atoms[ia].first;
            const long long ca = a.atoms[ia].second * fa;
            const long long cb = b.atoms[ib].second * fb;
            if (cancel_common) {
                const long long kept = std::min(ca, cb);
                inst.diagonal.emplace_back(bits, kept);
                if (ca > kept) {
                    inst.src_bits.push_back(bits);
                    inst.supply.push_back(ca - kept);
                } else if (cb > kept) {
                    inst.dst_bits.push_back(bits);
                    inst.demand.push_back(cb - kept);
                }
            } else {
                inst.src_bits.push_back(bits);
                inst.supply.push_back(ca);
                inst.dst_bits.push_back(bits);
                inst.demand.push_back(cb);
            }
            ++ia;
            ++ib;
        }
    }
    return inst;
}

// Primal network simplex for the uncapacitated transportation problem.
// Arcs are implicit (complete bipartite, popcount costs); only the
// spanning tree carries state. The basis is kept strongly feasible: ties
// for the leaving arc are broken by the last blocking arc met when
// walking the pivot cycle from the apex along the entering direction,
// which rules out cycling under degeneracy.
class TransportSimplex {
public:
    TransportSimplex(const std::vector<std::uint32_t>& src_bits, const std::vector<long long>& supply,
                     const std::vector<std::uint32_t>& dst_bits, const std::vector<long long>& demand,
                     int n)
        : sb_(src_bits), db_(dst_bits), m_((int)src_bits.size()), k_((int)dst_bits.size()), n_(n) {
        const int v = m_ + k_ + 1;
        root_ = m_ + k_;
        parent_.assign(v, -1);
        up_.assign(v, false);
        tflow_.assign(v, 0);
        depth_.assign(v, 0);
        pi_.assign(v, 0);
        first_child_.assign(v, -1);
        next_sib_.assign(v, -1);
        prev_sib_.assign(v, -1);
        const long long big = n_ + 1;  // exceeds every real arc cost
        for (int i = 0; i < m_; ++i) {
            parent_[i] = root_;
            up_[i] = true;  // artificial arc i -> root
            tflow_[i] = supply[i];
            depth_[i] = 1;
            pi_[i] = big;
            attach_child(root_, i);
        }
        for (int j = 0; j < k_; ++j) {
            const int v2 = m_ + j;
            parent_[v2] = root_;
            up_[v2] = false;  // artificial arc root -> sink
            tflow_[v2] = demand[j];
            depth_[v2] = 1;
            pi_[v2] = -big;
            attach_child(root_, v2);
        }
        arc_count_ = (std::size_t)m_ * (std::size_t)k_;
        block_ = std::max<std::size_t>(64, (std::size_t)std::sqrt((double)arc_count_) + 1);
    }

    void solve() {
        // Strong feasibility rules out cycling; the cap only trips on a
        // genuine bug, with generous headroom over observed pivot counts.
        const std::size_t pivot_cap = 2000ULL * (std::size_t)(m_ + k_ + 1) + 100000ULL;
        int u, w;
        while (find_entering(u, w)) {
            pivot(u, w);
            if (++pivot_count > pivot_cap)
                throw std::logic_error("network simplex failed to converge");
        }
        for (int c = first_child_[root_]; c != -1; c = next_sib_[c]) {
            if (tflow_[c] != 0)
                throw std::logic_error("network simplex left artificial flow");
        }
    }

    __int128 total_cost() const {
        __int128 total = 0;
        for (int v = 0; v < m_ + k_; ++v) {
            const int p = parent_[v];
            if (p == root_ || tflow_[v] == 0) continue;
            total += (__int128)tflow_[v] * arc_cost(v, p);
        }
        return total;
    }

    struct ArcFlow {
        int src, dst;
        long long flow;
    };

    std::vector<ArcFlow> flows() const {
        std::vector<ArcFlow> out;
        for (int v = 0; v < m_ + k_; ++v) {
            const int p = parent_[v];
            if (p == root_ || tflow_[v] == 0) continue;
            const int src = v < m_ ? v : p;
            const int dst = v < m_ ? p : v;
            out.push_back({src, dst - m_, tflow_[v]});
        }
        return out;
    }

    long long sink_potential(int j) const { return pi_[m_ + j]; }
    long long source_potential(int i) const { return pi_[i]; }

    std::size_t pivot_count = 0;

private:
    long long arc_cost(int x, int y) const {
        const int i = x < m_ ? x : y;
        const int j = x < m_ ? y : x;
        return std::popcount(sb_[i] ^ db_[j - m_]);
    }

    void attach_child(int p, int c) {
        prev_sib_[c] = -1;
        next_sib_[c] = first_child_[p];
        if (first_child_[p] != -1) prev_sib_[first_child_[p]] = c;
        first_child_[p] = c;
    }

    void detach_child(int p, int c) {
        if (prev_sib_[c] != -1)
            next_sib_[prev_sib_[c]] = next_sib_[c];
        else
            first_child_[p] = next_sib_[c];
        if (next_sib_[c] != -1) prev_sib_[next_sib_[c]] = prev_sib_[c];
        prev_sib_[c] = next_sib_[c] = -1;
    }

    bool find_entering(int& eu, int& ew) {
        std::size_t scanned = 0;
        long long best_rc = 0;
        std::size_t best = arc_count_;
        std::size_t a = scan_ptr_;
        int i = (int)(a / (std::size_t)k_);
        int j = (int)(a % (std::size_t)k_);
        while (scanned < arc_count_) {
            const std::size_t chunk = std::min(block_, arc_count_ - scanned);
            for (std::size_t t = 0; t < chunk; ++t) {
                const long long rc =
                    (long long)std::popcount(sb_[i] ^ db_[j]) - pi_[i] + pi_[m_ + j];
                if (rc < best_rc) {
                    best_rc = rc;
                    best = a;
                }
                ++a;
                if (++j == k_) {
                    j = 0;
                    if (++i == m_) {
                        i = 0;
                        a = 0;
                    }
                }
            }
            scanned += chunk;
            if (best != arc_count_) {
                scan_ptr_ = a;
                eu = (int)(best / (std::size_t)k_);
                ew = m_ + (int)(best % (std::size_t)k_);
                return true;
            }
        }
        return false;
    }

    void pivot(int u, int w) {
        const long long rc = (long long)std::popcount(sb_[u] ^ db_[w - m_]) - pi_[u] + pi_[w];
        // Apex of the cycle closed by the entering arc u -> w.
        int a = u, b = w;
        while (a != b) {
            if (depth_[a] >= depth_[b])
                a = parent_[a];
            else
                b = parent_[b];
        }
        const int apex = a;
        upath_.clear();
        for (int v = u; v != apex; v = parent_[v]) upath_.push_back(v);
        wpath_.clear();
        for (int v = w; v != apex; v = parent_[v]) wpath_.push_back(v);

        // theta = smallest residual among arcs the cycle traverses against
        // their orientation; ties resolved by the last such arc in cycle
        // order (apex -> u -> entering -> w -> apex).
        long long theta = std::numeric_limits<long long>::max();
        int leave = -1;
        bool leave_on_u_side = false;
        for (std::size_t t = upath_.size(); t-- > 0;) {
            const int v = upath_[t];
            if (up_[v] && tflow_[v] <= theta) {
                theta = tflow_[v];
                leave = v;
                leave_on_u_side = true;
            }
        }
        for (const int v : wpath_) {
            if (!up_[v] && tflow_[v] <= theta) {
                theta = tflow_[v];
                leave = v;
                leave_on_u_side = false;
            }
        }
        if (leave == -1) throw std::logic_error("network simplex: unbounded pivot cycle");

        for (const int v : upath_) tflow_[v] += up_[v] ? -theta : theta;
        for (const int v : wpath_) tflow_[v] += up_[v] ? theta : -theta;

        // Re-root the cut-off subtree at the entering arc's endpoint and
        // hang it back under the other endpoint.
        const int enter_child = leave_on_u_side ? u : w;
        const int enter_parent = leave_on_u_side ? w : u;
        chain_.clear();
        for (int v = enter_child;; v = parent_[v]) {
            chain_.push_back(v);
            if (v == leave) break;
        }
        old_up_.clear();
        old_flow_.clear();
        for (std::size_t t = 0; t + 1 < chain_.size(); ++t) {
            old_up_.push_back(up_[chain_[t]]);
            old_flow_.push_back(tflow_[chain_[t]]);
        }
        for (const int v : chain_) detach_child(parent_[v], v);
        parent_[enter_child] = enter_parent;
        up_[enter_child] = leave_on_u_side;  // arc oriented source -> sink
        tflow_[enter_child] = theta;
        attach_child(enter_parent, enter_child);
        for (std::size_t t = 0; t + 1 < chain_.size(); ++t) {
            const int child = chain_[t + 1];
            parent_[child] = chain_[t];
            up_[child] = !old_up_[t];
            tflow_[child] = old_flow_[t];
            attach_child(chain_[t], child);
        }

        // Constant potential shift over the re-rooted subtree makes the
        // entering arc's reduced cost zero.
        const long long delta = leave_on_u_side ? rc : -rc;
        stack_.clear();
        stack_.push_back(enter_child);
        while (!stack_.empty()) {
            const int v = stack_.back();
            stack_.pop_back();
            depth_[v] = depth_[parent_[v]] + 1;
            pi_[v] += delta;
            for (int c = first_child_[v]; c != -1; c = next_sib_[c]) stack_.push_back(c);
        }
    }

    std::vector<std::uint32_t> sb_, db_;
    int m_, k_, n_, root_;
    std::size_t arc_count_ = 0, block_ = 64, scan_ptr_ = 0;
    std::vector<int> parent_, depth_, first_child_, next_sib_, prev_sib_;
    std::vector<bool> up_;
    std::vector<long long> tflow_, pi_;
    std::vector<int> upath_, wpath_, chain_, stack_;
    std::vector<bool> old_up_;
    std::vector<long long> old_flow_;
};

}  // namespace detail

// Exact optimal transport by network simplex, with plan and dual witness.
inline TransportSolution wasserstein_exact(const RationalMeasure& a, const RationalMeasure& b,
                                           const TransportOptions& opts = {}) {
    detail::TransportInstance inst = detail::build_instance(a, b, opts, /*cancel_common=*/true);
    const std::size_t m = inst.src_bits.size(), k = inst.dst_bits.size();
    if (m + k + 1 > opts.max_nodes)
        throw ResourceError("transport: instance exceeds node budget");
    if (m * k > opts.max_edges)
        throw ResourceError("transport: instance exceeds edge budget");

    TransportSolution sol;
    sol.n = inst.n;

    // Union of the original supports, for the potential table.
    std::vector<std::uint32_t> support;
    support.reserve(a.atoms.size() + b.atoms.size());
    for (const auto& [bits, num] : a.atoms) support.push_back(bits);
    for (const auto& [bits, num] : b.atoms) support.push_back(bits);
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());

    for (const auto& [bits, kept] : inst.diagonal)
        sol.plan.push_back({bits, bits, Rational(kept, inst.scale)});

    if (m == 0) {
        // Identical measures: identity plan, flat potential.
        sol.exact_value = Rational(0, 1);
        sol.value = 0.0;
        for (const std::uint32_t bits : support) sol.potentials.emplace_back(bits, 0.0);
        return sol;
    }

    detail::TransportSimplex simplex(inst.src_bits, inst.supply, inst.dst_bits, inst.demand, inst.n);
    simplex.solve();

    sol.exact_value = Rational::make(simplex.total_cost(), inst.scale);
    sol.value = sol.exact_value.to_double();
    for (const auto& f : simplex.flows())
        sol.plan.push_back({inst.src_bits[f.src], inst.dst_bits[f.dst], Rational(f.flow, inst.scale)});
    std::sort(sol.plan.begin(), sol.plan.end(), [](const PlanEntry& x, const PlanEntry& y) {
        return x.source != y.source ? x.source < y.source : x.target < y.target;
    });

    // Kantorovich potential: the lower envelope of sink cones,
    // f(z) = min_j d(z, y_j) + pi_j. A minimum of 1-Lipschitz functions is
    // 1-Lipschitz on the whole cube, and complementary slackness makes the
    // duality gap vanish exactly. Shifted so the smallest value is zero.
    std::vector<long long> raw(support.size());
    long long low = std::numeric_limits<long long>::max();
    for (std::size_t s = 0; s < support.size(); ++s) {
        long long best = std::numeric_limits<long long>::max();
        for (std::size_t j = 0; j < k; ++j) {
            const long long cand =
                std::popcount(support[s] ^ inst.dst_bits[j]) + simplex.sink_potential((int)j);
            best = std::min(best, cand);
        }
        raw[s] = best;
        low = std::min(low, best);
    }
    sol.potentials.reserve(support.size());
    for (std::size_t s = 0; s < support.size(); ++s)
        sol.potentials.emplace_back(support[s], double(raw[s] - low));
    return sol;
}

// Successive shortest paths on the same bipartite instance, no common-mass
// cancellation, exact integer arithmetic throughout. Must agree with
// wasserstein_exact on every instance.
inline Rational wasserstein_ssp(const RationalMeasure& a, const RationalMeasure& b,
                                const TransportOptions& opts = {}) {
    detail::TransportInstance inst = detail::build_instance(a, b, opts, /*cancel_common=*/false);
    const std::size_t m = inst.src_bits.size(), k = inst.dst_bits.size();
    if (m * k > opts.max_ssp_edges)
        throw ResourceError("transport: instance exceeds ssp edge budget");
    if (m == 0) return Rational(0, 1);

    const std::size_t nodes = m + k;
    constexpr long long kInf = std::numeric_limits<long long>::max() / 4;
    std::vector<long long> flow(m * k, 0);
    std::vector<long long> rs = inst.supply, rd = inst.demand;
    std::vector<long long> h(nodes, 0), dist(nodes, 0);
    std::vector<int> pred(nodes, -1);
    std::vector<bool> done(nodes, false);

    auto cost = [&](std::size_t i, std::size_t j) -> long long {
        return std::popcount(inst.src_bits[i] ^ inst.dst_bits[j]);
    };

    long long remaining = 0;
    for (const long long s : inst.supply) remaining += s;

    while (remaining > 0) {
        std::fill(dist.begin(), dist.end(), kInf);
        std::fill(pred.begin(), pred.end(), -1);
        std::fill(done.begin(), done.end(), false);
        for (std::size_t i = 0; i < m; ++i)
            if (rs[i] > 0) dist[i] = 0;
        for (std::size_t it = 0; it < nodes; ++it) {
            std::size_t v = nodes;
            long long best = kInf;
            for (std::size_t x = 0; x < nodes; ++x)
                if (!done[x] && dist[x] < best) {
                    best = dist[x];
                    v = x;
                }
            if (v == nodes) break;
            done[v] = true;
            if (v < m) {
                for (std::size_t j = 0; j < k; ++j) {
                    const long long w = cost(v, j) + h[v] - h[m + j];
                    if (dist[v] + w < dist[m + j]) {
                        dist[m + j] = dist[v] + w;
                        pred[m + j] = (int)v;
                    }
                }
            } else {
                const std::size_t j = v - m;
                for (std::size_t i = 0; i < m; ++i) {
                    if (flow[i * k + j] <= 0) continue;
                    const long long w = -cost(i, j) + h[v] - h[i];
                    if (dist[v] + w < dist[i]) {
                        dist[i] = dist[v] + w;
                        pred[i] = (int)v;
                    }
                }
            }
        }
        std::size_t target = nodes;
        long long best = kInf;
        for (std::size_t j = 0; j < k; ++j)
            if (rd[j] > 0 && dist[m + j] < best) {
                best = dist[m + j];
                target = m + j;
            }
        if (target == nodes) throw std::logic_error("ssp: no augmenting path");
        for (std::size_t v = 0; v < nodes; ++v)
            if (dist[v] < kInf) h[v] += dist[v];

        long long push = rd[target - m];
        for (std::size_t v = target; pred[v] != -1; v = (std::size_t)pred[v]) {
            const std::size_t p = (std::size_t)pred[v];
            if (p < m && v >= m) continue;  // forward arc, unbounded
            push = std::min(push, flow[v * k + (p - m)]);
        }
        {
            std::size_t v = target;
            while (pred[v] != -1) v = (std::size_t)pred[v];
            push = std::min(push, rs[v]);
        }
        for (std::size_t v = target; pred[v] != -1; v = (std::size_t)pred[v]) {
            const std::size_t p = (std::size_t)pred[v];
            if (p < m)
                flow[p * k + (v - m)] += push;
            else
                flow[v * k + (p - m)] -= push;
        }
        {
            std::size_t v = target;
            while (pred[v] != -1) v = (std::size_t)pred[v];
            rs[v] -= push;
        }
        rd[target - m] -= push;
        remaining -= push;
    }

    __int128 total = 0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < k; ++j)
            if (flow[i * k + j] > 0) total += (__int128)flow[i * k + j] * cost(i, j);
    return Rational::make(total, inst.scale);
}

// Total variation distance, exact.
inline Rational total_variation_exact(const RationalMeasure& a, const RationalMeasure& b,
                                      const TransportOptions& opts = {}) {
    detail::require(a.n == b.n, "total_variation: dimension mismatch");
    const long long scale = detail::common_denominator(a.den, b.den, opts.max_common_denominator);
    const long long fa = scale / a.den, fb = scale / b.den;
    __int128 positive = 0;
    std::size_t ia = 0, ib = 0;
    while (ia < a.atoms.size()) {
        while (ib < b.atoms.size() && b.atoms[ib].first < a.atoms[ia].first) ++ib;
        const long long ca = a.atoms[ia].second * fa;
        const long long cb = (ib < b.atoms.size() && b.atoms[ib].first == a.atoms[ia].first)
                                 ? b.atoms[ib].second * fb
                                 : 0;
        if (ca > cb) positive += ca - cb;
        ++ia;
    }
    return Rational::make(positive, scale);
}

inline double total_variation(const RationalMeasure& a, const RationalMeasure& b,
                              const TransportOptions& opts = {}) {
    return total_variation_exact(a, b, opts).to_double();
}

inline double total_variation(const DenseMeasure& a, const DenseMeasure& b) {
    detail::require(a.n == b.n, "total_variation: dimension mismatch");
    double positive = 0.0;
    for (std::size_t x = 0; x < a.mass.size(); ++x)
        positive += std::max(a.mass[x] - b.mass[x], 0.0);
    return positive;
}

// Kantorovich dual objective for a 1-Lipschitz candidate. Always a lower
// bound on the Wasserstein distance; equal to it for optimal potentials.
template <typename MeasureA, typename MeasureB>
inline double dual_lower_bound(const CubeFunction& f, const MeasureA& a, const MeasureB& b) {
    detail::require(lipschitz_violation(f) <= 1e-9, "dual_lower_bound: function is not 1-Lipschitz");
    return expectation(f, a) - expectation(f, b);
}

struct PlanCheckReport {
    bool pass = true;
    std::string first_violation;
    bool marginals_ok = true;
    bool cost_ok = true;
    bool lipschitz_ok = true;
    bool gap_ok = true;
    double duality_gap = 0.0;
    double max_lipschitz_violation = 0.0;
};

// Re-derives every certificate of a solution from scratch: marginals in
// exact arithmetic, the cost sum, 1-Lipschitz feasibility of the
// potentials over the support union, and the duality gap.
inline PlanCheckReport verify_plan(const TransportSolution& sol, const RationalMeasure& a,
                                   const RationalMeasure& b) {
    PlanCheckReport rep;
    auto fail = [&rep](bool& flag, const std::string& what) {
        flag = false;
        rep.pass = false;
        if (rep.first_violation.empty()) rep.first_violation = what;
    };

    std::vector<std::pair<std::uint32_t, Rational>> out_mass, in_mass;
    Rational cost(0, 1);
    for (const PlanEntry& e : sol.plan) {
        out_mass.emplace_back(e.source, e.mass);
        in_mass.emplace_back(e.target, e.mass);
        cost = cost + e.mass * (long long)std::popcount(e.source ^ e.target);
    }
    auto aggregate = [](std::vector<std::pair<std::uint32_t, Rational>>& v) {
        std::sort(v.begin(), v.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
        std::vector<std::pair<std::uint32_t, Rational>> out;
        for (const auto& [bits, mass] : v) {
            if (!out.empty() && out.back().first == bits)
                out.back().second = out.back().second + mass;
            else
                out.emplace_back(bits, mass);
        }
        return out;
    };
    auto matches = [](const std::vector<std::pair<std::uint32_t, Rational>>& plan_side,
                      const RationalMeasure& m) {
        if (plan_side.size() != m.atoms.size()) return false;
        for (std::size_t i = 0; i < plan_side.size(); ++i) {
            if (plan_side[i].first != m.atoms[i].first) return false;
            if (!(plan_side[i].second == Rational(m.atoms[i].second, m.den))) return false;
        }
        return true;
    };
    if (!matches(aggregate(out_mass), a) || !matches(aggregate(in_mass), b))
        fail(rep.marginals_ok, "plan marginals do not reproduce the measures");

    if (!(cost == sol.exact_value) || std::abs(sol.value - sol.exact_value.to_double()) > 1e-12)
        fail(rep.cost_ok, "plan cost does not match the reported value");

    // Pairwise Lipschitz check over the support union; exhaustive at the
    // sizes the exact solver admits.
    const auto& pot = sol.potentials;
    for (std::size_t i = 0; i < pot.size() && rep.lipschitz_ok; ++i) {
        for (std::size_t j = i + 1; j < pot.size(); ++j) {
            const double gap = std::abs(pot[i].second - pot[j].second);
            const double d = std::popcount(pot[i].first ^ pot[j].first);
            rep.max_lipschitz_violation = std::max(rep.max_lipschitz_violation, gap - d);
            if (gap - d > 1e-9) {
                fail(rep.lipschitz_ok, "potentials violate the 1-Lipschitz condition");
                break;
            }
        }
    }

    long double dual = 0.0L;
    for (const auto& [bits, value] : pot)
        dual += (long double)value * ((long double)a.mass(bits) - (long double)b.mass(bits));
    rep.duality_gap = std::abs((double)dual - sol.value);
    if (rep.duality_gap > 1e-9) fail(rep.gap_ok, "duality gap exceeds tolerance");
    return rep;
}

}  // namespace cubeot
