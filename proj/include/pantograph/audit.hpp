#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "pantograph/defexp.hpp"
#include "pantograph/ensemble.hpp"
#include "pantograph/graph.hpp"
#include "pantograph/rng.hpp"

namespace pantograph::audit {

using defexp::DensityParam;
using ensemble::Graph;
using ensemble::PartitionWitness;

using Count = unsigned __int128;

inline std::string count_to_string(Count c) {
    if (c == 0) return "0";
    std::string out;
    while (c > 0) {
        out.push_back(static_cast<char>('0' + static_cast<int>(c % 10)));
        c /= 10;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

inline double count_to_double(Count c) {
    return static_cast<double>(static_cast<uint64_t>(c >> 64)) * 0x1.0p64 +
           static_cast<double>(static_cast<uint64_t>(c));
}

namespace detail {

inline Count factorial(int j) {
    Count f = 1;
    for (int i = 2; i <= j; ++i) f *= static_cast<unsigned>(i);
    return f;
}

/// Min-degree peel order (degeneracy order) via a bucket queue.
inline std::vector<int> peel_order(const Graph& g) {
    const int n = g.n();
    std::vector<int> deg(n), order;
    order.reserve(n);
    int maxdeg = 0;
    for (int v = 0; v < n; ++v) {
        deg[v] = g.degree(v);
        maxdeg = std::max(maxdeg, deg[v]);
    }
    std::vector<std::vector<int>> bucket(maxdeg + 1);
    for (int v = 0; v < n; ++v) bucket[deg[v]].push_back(v);
    std::vector<bool> removed(n, false);
    std::vector<int> pos_in_bucket;  // lazy deletion: entries may be stale
    int cur = 0;
    for (int iter = 0; iter < n; ++iter) {
        while (cur > 0 && !bucket[cur - 1].empty()) --cur;
        while (cur <= maxdeg && bucket[cur].empty()) ++cur;
        int v = -1;
        while (cur <= maxdeg) {
            auto& b = bucket[cur];
            while (!b.empty() &&
                   (removed[b.back()] || deg[b.back()] != cur))
                b.pop_back();
            if (!b.empty()) {
                v = b.back();
                b.pop_back();
                break;
            }
            ++cur;
        }
        removed[v] = true;
        order.push_back(v);
        for (int w : g.neighbors(v)) {
            if (removed[w]) continue;
            bucket[--deg[w]].push_back(w);
            if (deg[w] < cur) cur = deg[w];
        }
    }
    return order;
}

/// Forward adjacency in a relabeled vertex order: bit j of row i is set iff
/// the graph joins them and j > i.
struct ForwardDag {
    int n = 0, words = 0;
    std::vector<uint64_t> rows;   // n * words
    std::vector<int> outdeg;
    // masks[t] marks vertices with outdeg >= t (t <= j-2 is enough)
    std::vector<std::vector<uint64_t>> masks;

    std::span<const uint64_t> row(int i) const {
        return {rows.data() + static_cast<size_t>(i) * words,
                static_cast<size_t>(words)};
    }
};

inline ForwardDag build_forward_dag(const Graph& g, int max_need) {
    const int n = g.n();
    std::vector<int> peel = peel_order(g);
    std::vector<int> pos(n);
    // process in reverse peel order so low-degree vertices come last and
    // prune via the outdeg masks
    for (int i = 0; i < n; ++i) pos[peel[n - 1 - i]] = i;

    ForwardDag d;
    d.n = n;
    d.words = (n + 63) / 64;
    d.rows.assign(static_cast<size_t>(n) * d.words, 0);
    d.outdeg.assign(n, 0);
    for (int u = 0; u < n; ++u) {
        const int i = pos[u];
        uint64_t* row = d.rows.data() + static_cast<size_t>(i) * d.words;
        for (int w : g.neighbors(u)) {
            const int j = pos[w];
            if (j > i) {
                row[j / 64] |= 1ULL << (j % 64);
                ++d.outdeg[i];
            }
        }
    }
    d.masks.assign(std::max(1, max_need), std::vector<uint64_t>(d.words, 0));
    for (int t = 0; t < static_cast<int>(d.masks.size()); ++t)
        for (int i = 0; i < n; ++i)
            if (d.outdeg[i] >= t) d.masks[t][i / 64] |= 1ULL << (i % 64);
    return d;
}

inline uint64_t popcount_and(std::span<const uint64_t> a,
                             std::span<const uint64_t> b) {
    uint64_t c = 0;
    for (size_t w = 0; w < a.size(); ++w) c += std::popcount(a[w] & b[w]);
    return c;
}

/// Count cliques on `need` more vertices drawn from `cand`.
inline void clique_rec(const ForwardDag& d, const uint64_t* cand, int need,
                       std::vector<std::vector<uint64_t>>& scratch, Count& total) {
    const int words = d.words;
    if (need == 1) {
        uint64_t c = 0;
        for (int w = 0; w < words; ++w) c += std::popcount(cand[w]);
        total += c;
        return;
    }
    const uint64_t* gate = d.masks[need - 1].data();
    for (int w = 0; w < words; ++w) {
        uint64_t bits = cand[w] & gate[w];
        while (bits) {
            const int v = w * 64 + std::countr_zero(bits);
            bits &= bits - 1;
            const uint64_t* frow = d.rows.data() + static_cast<size_t>(v) * words;
            if (need == 2) {
                uint64_t c = 0;
                for (int t = 0; t < words; ++t) c += std::popcount(cand[t] & frow[t]);
                total += c;
            } else {
                uint64_t* next = scratch[need - 1].data();
                for (int t = 0; t < words; ++t) next[t] = cand[t] & frow[t];
                clique_rec(d, next, need - 1, scratch, total);
            }
        }
    }
}

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace detail

/// Labeled K_j copies: j! times the number of j-cliques, counted exactly by
/// ordered backtracking over forward adjacency rows.
inline Count count_labeled_cliques(const Graph& g, int j, int threads = 0) {
    if (j < 2 || j > g.n()) {
        if (j >= 2) return 0;  // j > n: no copies
        throw InvalidParameterError("clique order must be >= 2");
    }
    detail::ForwardDag d = detail::build_forward_dag(g, j - 1);
    const int nthreads = detail::resolve_threads(threads);
    std::vector<Count> partial(nthreads, 0);
    auto work = [&](int tid) {
        std::vector<std::vector<uint64_t>> scratch(
            j, std::vector<uint64_t>(d.words, 0));
        Count local = 0;
        const uint64_t* gate = d.masks[j - 2].data();
        for (int i = tid; i < d.n; i += nthreads) {
            if (!((gate[i / 64] >> (i % 64)) & 1ULL)) continue;
            detail::clique_rec(d, d.row(i).data(), j - 1, scratch, local);
        }
        partial[tid] = local;
    };
    if (nthreads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }
    Count cliques = 0;
    for (Count c : partial) cliques += c;
    return cliques * detail::factorial(j);
}

/// Structured count for a complete multipartite witness:
/// j! * e_j(part sizes), via the coefficient recurrence on prod(1 + s_i t).
inline Count count_labeled_cliques_multipartite(const PartitionWitness& witness,
                                                int j) {
    if (j < 2) throw InvalidParameterError("clique order must be >= 2");
    std::vector<Count> e(j + 1, 0);
    e[0] = 1;
    for (const auto& part : witness.parts)
        for (int t = j; t >= 1; --t)
            e[t] += e[t - 1] * static_cast<unsigned long long>(part.size());
    return e[j] * detail::factorial(j);
}

/// Labeled C4 copies from the closed-walk identity
/// tr(A^4) - 2 sum(deg^2) + 2|E|, with tr(A^4) accumulated as
/// sum over vertex pairs of squared common-neighbor counts.
inline Count count_labeled_c4(const Graph& g, int threads = 0) {
    const int n = g.n();
    Count sum_deg_sq = 0;
    for (int v = 0; v < n; ++v) {
        Count dv = static_cast<unsigned>(g.degree(v));
        sum_deg_sq += dv * dv;
    }
    const int nthreads = detail::resolve_threads(threads);
    std::vector<Count> partial(nthreads, 0);
    auto work = [&](int tid) {
        Count local = 0;
        for (int u = tid; u < n; u += nthreads) {
            auto ru = g.row(u);
            for (int v = u + 1; v < n; ++v) {
                uint64_t codeg = detail::popcount_and(ru, g.row(v));
                local += static_cast<Count>(codeg) * codeg;
            }
        }
        partial[tid] = local;
    };
    if (nthreads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }
    Count pair_sq = 0;
    for (Count c : partial) pair_sq += c;
    const Count trace_a4 = sum_deg_sq + 2 * pair_sq;
    return trace_a4 - 2 * sum_deg_sq + 2 * static_cast<Count>(g.edge_count());
}

/// Exhaustive oracle: counts injective maps of h into g that send every edge
/// of h to an edge of g. Exponential; oracle scale only.
inline Count count_labeled_copies_bruteforce(const Graph& g, const Graph& h) {
    if (h.n() > 8 || g.n() > 64)
        throw InvalidParameterError("oracle limits: |V(h)| <= 8, n <= 64");
    const int hn = h.n(), gn = g.n();
    std::vector<int> image(hn, -1);
    uint64_t used = 0;
    Count total = 0;
    auto rec = [&](auto&& self, int i) -> void {
        if (i == hn) {
            ++total;
            return;
        }
        for (int v = 0; v < gn; ++v) {
            if ((used >> v) & 1ULL) continue;
            bool ok = true;
            for (int i2 = 0; i2 < i && ok; ++i2)
                if (h.has_edge(i, i2) && !g.has_edge(v, image[i2])) ok = false;
            if (!ok) continue;
            image[i] = v;
            used |= 1ULL << v;
            self(self, i + 1);
            used &= ~(1ULL << v);
        }
    };
    rec(rec, 0);
    return total;
}

struct P3Sample {
    size_t subset_size = 0;
    uint64_t labeled_edges_within = 0;  // 2x unordered edges inside S
    double expected = 0.0;              // p |S|^2
    double rel_dev = 0.0;
    bool from_witness = false;
};

namespace detail {

inline P3Sample p3_sample_for(const Graph& g, const std::vector<int>& subset,
                              double p, bool from_witness) {
    const int words = g.words_per_row();
    std::vector<uint64_t> mask(words, 0);
    for (int v : subset) mask[v / 64] |= 1ULL << (v % 64);
    uint64_t labeled = 0;
    for (int v : subset) labeled += popcount_and(g.row(v), mask);
    P3Sample s;
    s.subset_size = subset.size();
    s.labeled_edges_within = labeled;
    s.expected = p * static_cast<double>(subset.size()) *
                 static_cast<double>(subset.size());
    s.rel_dev = s.expected == 0.0
                    ? 0.0
                    : static_cast<double>(labeled) / s.expected - 1.0;
    s.from_witness = from_witness;
    return s;
}

}  // namespace detail

/// Edge density of random (or explicit) vertex subsets of size ceil(c n)
/// against the expected p |S|^2 labeled edges.
inline std::vector<P3Sample> p3_check(
    const Graph& g, double c, const DensityParam& p, int trials, SeededRng rng,
    const std::vector<std::vector<int>>* explicit_subsets = nullptr) {
    if (c <= 0.0 || c > 1.0) throw InvalidParameterError("c must be in (0, 1]");
    if (trials < 1 && !explicit_subsets)
        throw InvalidParameterError("trials must be >= 1");
    const double pd = p.rational().get_d();
    std::vector<P3Sample> out;
    if (explicit_subsets) {
        for (const auto& s : *explicit_subsets)
            out.push_back(detail::p3_sample_for(g, s, pd, true));
    }
    const int n = g.n();
    const auto s = static_cast<size_t>(
        std::ceil(c * static_cast<double>(n) - 1e-9));
    std::vector<int> pool(n);
    for (int t = 0; t < trials; ++t) {
        for (int v = 0; v < n; ++v) pool[v] = v;
        for (size_t i = 0; i < s; ++i) {
            size_t k = i + static_cast<size_t>(rng.uniform_below(n - i));
            std::swap(pool[i], pool[k]);
        }
        std::vector<int> subset(pool.begin(), pool.begin() + s);
        out.push_back(detail::p3_sample_for(g, subset, pd, false));
    }
    return out;
}

enum class Verdict {
    consistent_with_quasirandom,
    clique_consistent_but_p3_fail,
    inconsistent,
};

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::consistent_with_quasirandom:
            return "consistent_with_quasirandom";
        case Verdict::clique_consistent_but_p3_fail:
            return "clique_consistent_but_p3_fail";
        default:
            return "inconsistent";
    }
}

struct CountRow {
    std::string kind;  // "K2".."Kj" or "C4"
    int vertices = 0;
    Count labeled_count = 0;
    double expected = 0.0;  // p^|E| n^|V|
    double rel_dev = 0.0;
    double tolerance = 0.0;
    bool within = false;
};

struct IndependentSetRow {
    int part_index = 0;
    size_t size = 0;
    uint64_t labeled_edges_within = 0;
};

struct AuditConfig {
    double clique_tol_base = 0.02;
    double clique_tol_coeff = 3.0;  // tolerance = max(base, coeff j^2 / n)
    double p3_fail_threshold = -0.5;
    double p3_consistent_tol = 0.05;
    double p3_subset_fraction = 0.5;
    int p3_trials = 20;
    double witness_part_min_fraction = 0.1;
    uint64_t seed = 0;
    int threads = 0;
};

struct AuditReport {
    std::string graph_label;
    std::string p_decimal;
    long n = 0;
    std::vector<CountRow> clique_rows;
    CountRow c4_row;
    std::vector<P3Sample> p3_samples;
    std::optional<IndependentSetRow> independent_set;
    Verdict verdict = Verdict::inconsistent;
};

namespace detail {

inline double expected_count(const DensityParam& p, int edges, int vertices,
                             long n) {
    // p^edges n^vertices at 256 bits, then down to double for reporting
    Real pe = p.real(256).pow_si(edges);
    Real nv = Real::of(n, 256).pow_si(vertices);
    return (pe * nv).to_double();
}

inline double clique_tolerance(const AuditConfig& cfg, int j, long n) {
    return std::max(cfg.clique_tol_base,
                    cfg.clique_tol_coeff * j * j / static_cast<double>(n));
}

}  // namespace detail

/// Full deviation report: labeled clique counts for j = 2..k_max, the C4
/// count, random P3 subsets plus any witness parts, and the verdict.
inline AuditReport quasirandomness_report(
    const Graph& g, const DensityParam& p, int k_max, const AuditConfig& cfg = {},
    const PartitionWitness* witness = nullptr) {
    if (k_max < 2) throw InvalidParameterError("k_max must be >= 2");
    AuditReport rep;
    rep.graph_label = g.label();
    rep.p_decimal = p.decimal();
    rep.n = g.n();
    const long n = g.n();

    for (int j = 2; j <= k_max; ++j) {
        CountRow row;
        row.kind = "K" + std::to_string(j);
        row.vertices = j;
        row.labeled_count = count_labeled_cliques(g, j, cfg.threads);
        row.expected = detail::expected_count(p, j * (j - 1) / 2, j, n);
        row.rel_dev = count_to_double(row.labeled_count) / row.expected - 1.0;
        row.tolerance = detail::clique_tolerance(cfg, j, n);
        row.within = std::abs(row.rel_dev) <= row.tolerance;
        rep.clique_rows.push_back(std::move(row));
    }
    {
        CountRow row;
        row.kind = "C4";
        row.vertices = 4;
        row.labeled_count = count_labeled_c4(g, cfg.threads);
        row.expected = detail::expected_count(p, 4, 4, n);
        row.rel_dev = count_to_double(row.labeled_count) / row.expected - 1.0;
        row.tolerance = detail::clique_tolerance(cfg, 4, n);
        row.within = std::abs(row.rel_dev) <= row.tolerance;
        rep.c4_row = std::move(row);
    }

    std::vector<std::vector<int>> witness_subsets;
    if (witness) {
        const auto min_size = static_cast<size_t>(
            std::max(2.0, cfg.witness_part_min_fraction * static_cast<double>(n)));
        for (const auto& part : witness->parts)
            if (part.size() >= min_size) witness_subsets.push_back(part);
        const auto& big = witness->parts[witness->largest_part()];
        IndependentSetRow isr;
        isr.part_index = witness->largest_part();
        isr.size = big.size();
        isr.labeled_edges_within =
            detail::p3_sample_for(g, big, 0.5, true).labeled_edges_within;
        rep.independent_set = isr;
    }
    rep.p3_samples = p3_check(g, cfg.p3_subset_fraction, p, cfg.p3_trials,
                              SeededRng(cfg.seed, /*stream=*/1),
                              witness ? &witness_subsets : nullptr);

    bool cliques_ok = rep.c4_row.within;
    for (const auto& row : rep.clique_rows) cliques_ok = cliques_ok && row.within;
    bool p3_fail = false, p3_ok = true;
    for (const auto& s : rep.p3_samples) {
        if (s.rel_dev < cfg.p3_fail_threshold) p3_fail = true;
        if (std::abs(s.rel_dev) > cfg.p3_consistent_tol) p3_ok = false;
    }
    if (cliques_ok && p3_ok)
        rep.verdict = Verdict::consistent_with_quasirandom;
    else if (cliques_ok && p3_fail)
        rep.verdict = Verdict::clique_consistent_but_p3_fail;
    else
        rep.verdict = Verdict::inconsistent;
    return rep;
}

}  // namespace pantograph::audit
