#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pantograph/graph.hpp"
#include "pantograph/rng.hpp"
#include "pantograph/spectrum.hpp"

namespace pantograph::ensemble {

using defexp::DensityParam;
using spectrum::RootSource;
using spectrum::WeightSequence;

/// Explicit vertex partition attached to a constructed graph. Parts are
/// listed in weight order; the optional dust part carries the truncated
/// tail mass of an entire-source weight sequence.
struct PartitionWitness {
    std::vector<std::vector<int>> parts;
    std::vector<std::string> weight_decimals;
    std::optional<int> dust_index;

    std::vector<size_t> part_sizes() const {
        std::vector<size_t> out;
        out.reserve(parts.size());
        for (const auto& p : parts) out.push_back(p.size());
        return out;
    }

    int largest_part() const {
        int best = 0;
        for (size_t i = 1; i < parts.size(); ++i)
            if (parts[i].size() > parts[best].size()) best = static_cast<int>(i);
        return best;
    }
};

namespace detail {

/// Largest-remainder apportionment of n units to the given weights: floor
/// each w_i * n, then hand the remaining units to the largest fractional
/// parts, ties broken by lower index. Guarantees sum == n and
/// |size_i - w_i n| < 1.
inline std::vector<long> largest_remainder_sizes(const std::vector<Real>& weights,
                                                 long n) {
    const mpfr_prec_t prec =
        weights.empty() ? 128 : weights.front().prec();
    Real total = Real::of(0L, prec);
    for (const auto& w : weights) total += w;
    if ((total - Real::of(1L, prec)).abs() >
        Real::pow2(-static_cast<long>(prec) / 4, prec))
        throw InvalidParameterError("weights (plus tail) must sum to 1");

    std::vector<long> sizes(weights.size());
    std::vector<Real> fracs;
    fracs.reserve(weights.size());
    long assigned = 0;
    for (size_t i = 0; i < weights.size(); ++i) {
        Real t = weights[i] * Real::of(n, prec);
        sizes[i] = t.to_long_floor();
        fracs.push_back(t - Real::of(sizes[i], prec));
        assigned += sizes[i];
    }
    long rem = n - assigned;
    std::vector<size_t> order(weights.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return fracs[a] > fracs[b];
    });
    for (size_t r = 0; r < order.size() && rem > 0; ++r) {
        if (fracs[order[r]].is_zero()) break;  // exact fits never move
        ++sizes[order[r]];
        --rem;
    }
    if (rem != 0)
        throw InvalidParameterError("apportionment failed; weights do not sum to 1");
    return sizes;
}

inline std::string weight_decimal(const Real& w) { return w.to_string(); }

}  // namespace detail

struct MultipartiteOptions {
    bool allow_empty_parts = false;
};

/// Complete multipartite graph with part sizes apportioned from the weights;
/// the largest part is an independent set of size >= c_1 n - 1.
inline std::pair<Graph, PartitionWitness> build_multipartite(
    const WeightSequence& ws, long n, const MultipartiteOptions& opts = {}) {
    if (n < static_cast<long>(ws.weights.size()))
        throw InvalidParameterError(
            "n must be at least the number of parts (got n=" +
            std::to_string(n) + " for " + std::to_string(ws.weights.size()) +
            " parts)");

    std::vector<Real> weights = ws.weights;
    bool has_dust = ws.source == RootSource::entire && ws.tail_mass > 0.0;
    if (has_dust) weights.push_back(ws.tail_mass);

    std::vector<long> sizes = detail::largest_remainder_sizes(weights, n);
    if (has_dust && sizes.back() == 0) {
        sizes.pop_back();
        weights.pop_back();
        has_dust = false;
    }
    if (!opts.allow_empty_parts)
        for (size_t i = 0; i < sizes.size(); ++i)
            if (sizes[i] == 0)
                throw InvalidParameterError("part " + std::to_string(i + 1) +
                                            " would be empty; pass "
                                            "allow_empty_parts to permit this");

    PartitionWitness witness;
    std::vector<int> part_of(n);
    int v = 0;
    for (size_t i = 0; i < sizes.size(); ++i) {
        std::vector<int> part;
        part.reserve(sizes[i]);
        for (long t = 0; t < sizes[i]; ++t) {
            part_of[v] = static_cast<int>(i);
            part.push_back(v++);
        }
        witness.parts.push_back(std::move(part));
        witness.weight_decimals.push_back(detail::weight_decimal(weights[i]));
    }
    if (has_dust) witness.dust_index = static_cast<int>(sizes.size()) - 1;

    Graph g = Graph::complete_multipartite(
        part_of, "multipartite(p=" + ws.p.decimal() +
                     ",k=" + std::to_string(ws.weights.size()) +
                     ",n=" + std::to_string(n) + ")");
    return {std::move(g), std::move(witness)};
}

/// Induced subgraph of the step object on n uniform vertices: each sample
/// point falls in the interval of length c_i (dust interval last), and two
/// vertices are adjacent iff their intervals differ.
inline std::pair<Graph, PartitionWitness> sample_graphon_graph(
    const WeightSequence& ws, long n, SeededRng rng,
    double tail_tolerance = 1e-9) {
    if (ws.source != RootSource::entire)
        throw InvalidParameterError("graphon sampling needs entire-source weights");
    if (n < 1) throw InvalidParameterError("n must be >= 1");
    if (ws.tail_mass.to_double() > tail_tolerance)
        throw CertificationError(
            "tail_mass " + ws.tail_mass.to_string(6) + " exceeds tolerance " +
            std::to_string(tail_tolerance) + "; raise m");

    const int m = static_cast<int>(ws.weights.size());
    std::vector<double> bounds(m);
    {
        const mpfr_prec_t prec = ws.precision_bits;
        Real acc = Real::of(0L, prec);
        for (int i = 0; i < m; ++i) {
            acc += ws.weights[i];
            bounds[i] = std::min(1.0, acc.to_double());
            if (i > 0) bounds[i] = std::max(bounds[i], bounds[i - 1]);
        }
    }

    std::vector<int> part_of(n);
    for (long v = 0; v < n; ++v) {
        double u = rng.uniform01();
        int idx = static_cast<int>(
            std::upper_bound(bounds.begin(), bounds.end(), u) - bounds.begin());
        part_of[v] = idx;  // idx == m is the dust interval
    }

    PartitionWitness witness;
    witness.parts.assign(m + 1, {});
    for (long v = 0; v < n; ++v) witness.parts[part_of[v]].push_back(static_cast<int>(v));
    for (const auto& w : ws.weights)
        witness.weight_decimals.push_back(detail::weight_decimal(w));
    witness.weight_decimals.push_back(detail::weight_decimal(ws.tail_mass));
    witness.dust_index = m;

    Graph g = Graph::complete_multipartite(
        part_of, "graphon(p=" + ws.p.decimal() + ",m=" + std::to_string(m) +
                     ",n=" + std::to_string(n) +
                     ",seed=" + std::to_string(rng.seed()) + ")");
    return {std::move(g), std::move(witness)};
}

/// Binomial random graph: every unordered pair independently with
/// probability p. Deterministic per (seed, stream).
inline Graph gnp(int n, double p, SeededRng rng) {
    if (n < 1) throw InvalidParameterError("n must be >= 1");
    if (p < 0.0 || p > 1.0) throw InvalidParameterError("p must be in [0, 1]");
    Graph g(n, "gnp(n=" + std::to_string(n) + ",p=" + std::to_string(p) +
                   ",seed=" + std::to_string(rng.seed()) + ")");
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (rng.bernoulli(p)) g.add_edge(u, v);
    return g;
}

namespace detail {

inline bool is_prime(long q) {
    if (q < 2) return false;
    for (long d = 2; d * d <= q; ++d)
        if (q % d == 0) return false;
    return true;
}

}  // namespace detail

/// Quadratic-residue graph on Z_q for a prime q = 1 (mod 4): x ~ y iff
/// x - y is a nonzero square mod q. Regular of degree (q-1)/2.
inline Graph paley(long q) {
    if (!detail::is_prime(q))
        throw InvalidParameterError(std::to_string(q) + " is not prime");
    if (q % 4 != 1)
        throw InvalidParameterError(
            std::to_string(q) + " != 1 (mod 4); x-y and y-x would disagree");
    std::vector<bool> residue(q, false);
    for (long x = 1; x <= (q - 1) / 2; ++x) residue[(x * x) % q] = true;
    Graph g(static_cast<int>(q), "paley(q=" + std::to_string(q) + ")");
    for (long u = 0; u < q; ++u)
        for (long v = u + 1; v < q; ++v)
            if (residue[v - u]) g.add_edge(static_cast<int>(u), static_cast<int>(v));
    return g;
}

/// Clique on floor(p n) vertices plus isolated vertices. The clique size is
/// computed in exact rational arithmetic so decimal p never misrounds.
inline Graph clique_plus_isolated(int n, const DensityParam& p) {
    if (n < 1) throw InvalidParameterError("n must be >= 1");
    mpz_class scaled_num = p.rational().get_num() * n;
    mpz_class clique_sz_z;
    mpz_fdiv_q(clique_sz_z.get_mpz_t(), scaled_num.get_mpz_t(),
               p.rational().get_den().get_mpz_t());
    long clique_sz = clique_sz_z.get_si();
    Graph g(n, "clique_plus_isolated(n=" + std::to_string(n) +
                   ",p=" + p.decimal() + ")");
    for (long u = 0; u < clique_sz; ++u)
        for (long v = u + 1; v < clique_sz; ++v)
            g.add_edge(static_cast<int>(u), static_cast<int>(v));
    return g;
}

/// Complete bipartite graph with both parts of size n/2.
inline Graph complete_bipartite(int n) {
    if (n < 2 || n % 2 != 0)
        throw InvalidParameterError("n must be even and >= 2");
    std::vector<int> part_of(n);
    for (int v = n / 2; v < n; ++v) part_of[v] = 1;
    Graph g = Graph::complete_multipartite(
        part_of, "complete_bipartite(n=" + std::to_string(n) + ")");
    return g;
}

}  // namespace pantograph::ensemble
