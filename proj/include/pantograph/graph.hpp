#pragma once

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pantograph/errors.hpp"

namespace pantograph::ensemble {

/// Finite simple undirected graph over [0, n) with bitset adjacency rows,
/// sized for O(n/64)-word row intersection during subgraph counting.
class Graph {
  public:
    explicit Graph(int n, std::string label = "")
        : n_(n), words_((n + 63) / 64), bits_(static_cast<size_t>(n) * words_, 0),
          label_(std::move(label)) {
        if (n < 0) throw InvalidParameterError("vertex count must be >= 0");
    }

    /// Complete multipartite graph on a part assignment: u ~ v iff their
    /// parts differ. Fills rows word-wise instead of edge by edge.
    static Graph complete_multipartite(const std::vector<int>& part_of,
                                       std::string label = "") {
        const int n = static_cast<int>(part_of.size());
        Graph g(n, std::move(label));
        int nparts = 0;
        for (int pid : part_of) {
            if (pid < 0) throw InvalidParameterError("negative part id");
            nparts = std::max(nparts, pid + 1);
        }
        std::vector<uint64_t> part_mask(static_cast<size_t>(nparts) * g.words_, 0);
        std::vector<size_t> part_size(nparts, 0);
        for (int v = 0; v < n; ++v) {
            part_mask[static_cast<size_t>(part_of[v]) * g.words_ + v / 64] |=
                1ULL << (v % 64);
            ++part_size[part_of[v]];
        }
        const uint64_t last_word_mask =
            (n % 64) ? ((1ULL << (n % 64)) - 1) : ~0ULL;
        for (int v = 0; v < n; ++v) {
            uint64_t* row = g.bits_.data() + static_cast<size_t>(v) * g.words_;
            const uint64_t* mask =
                part_mask.data() + static_cast<size_t>(part_of[v]) * g.words_;
            for (int w = 0; w < g.words_; ++w) row[w] = ~mask[w];
            row[g.words_ - 1] &= last_word_mask;
        }
        size_t sq = 0;
        for (size_t s : part_size) sq += s * s;
        g.m_ = (static_cast<size_t>(n) * n - sq) / 2;
        return g;
    }

    int n() const { return n_; }
    int words_per_row() const { return words_; }
    size_t edge_count() const { return m_; }
    const std::string& label() const { return label_; }
    void set_label(std::string l) { label_ = std::move(l); }

    void add_edge(int u, int v) {
        check_vertex(u);
        check_vertex(v);
        if (u == v) throw InvalidParameterError("self-loops are not allowed");
        if (has_edge(u, v)) return;
        bits_[static_cast<size_t>(u) * words_ + v / 64] |= 1ULL << (v % 64);
        bits_[static_cast<size_t>(v) * words_ + u / 64] |= 1ULL << (u % 64);
        ++m_;
    }

    bool has_edge(int u, int v) const {
        return (bits_[static_cast<size_t>(u) * words_ + v / 64] >>
                (v % 64)) & 1ULL;
    }

    std::span<const uint64_t> row(int u) const {
        return {bits_.data() + static_cast<size_t>(u) * words_,
                static_cast<size_t>(words_)};
    }

    int degree(int u) const {
        int d = 0;
        for (uint64_t w : row(u)) d += std::popcount(w);
        return d;
    }

    std::vector<int> neighbors(int u) const {
        std::vector<int> out;
        auto r = row(u);
        for (int w = 0; w < words_; ++w) {
            uint64_t bitsw = r[w];
            while (bitsw) {
                int b = std::countr_zero(bitsw);
                out.push_back(w * 64 + b);
                bitsw &= bitsw - 1;
            }
        }
        return out;
    }

    /// Sorted "u v" lines under an "n m" header; bit-exact round trip.
    void write_edge_list(std::ostream& os) const {
        os << n_ << ' ' << m_ << '\n';
        for (int u = 0; u < n_; ++u)
            for (int v : neighbors(u))
                if (v > u) os << u << ' ' << v << '\n';
    }

    static Graph read_edge_list(std::istream& is, std::string label = "") {
        std::string line;
        long line_no = 0;
        auto next_line = [&]() -> bool {
            while (std::getline(is, line)) {
                ++line_no;
                if (!line.empty()) return true;
            }
            ++line_no;
            return false;
        };
        if (!next_line()) throw ParseError("missing header", line_no);
        std::istringstream hdr(line);
        long n = -1, m = -1;
        if (!(hdr >> n >> m) || n < 0 || m < 0)
            throw ParseError("header must be 'n m'", line_no);
        Graph g(static_cast<int>(n), std::move(label));
        for (long i = 0; i < m; ++i) {
            if (!next_line()) throw ParseError("unexpected end of edge list", line_no);
            std::istringstream es(line);
            long u, v;
            std::string rest;
            if (!(es >> u >> v) || (es >> rest))
                throw ParseError("edge line must be 'u v'", line_no);
            if (u < 0 || v < 0 || u >= n || v >= n)
                throw ParseError("vertex id out of range", line_no);
            if (u == v) throw ParseError("self-loop", line_no);
            if (g.has_edge(static_cast<int>(u), static_cast<int>(v)))
                throw ParseError("duplicate edge", line_no);
            g.add_edge(static_cast<int>(u), static_cast<int>(v));
        }
        return g;
    }

    friend bool operator==(const Graph& a, const Graph& b) {
        return a.n_ == b.n_ && a.bits_ == b.bits_;
    }

  private:
    void check_vertex(int u) const {
        if (u < 0 || u >= n_)
            throw InvalidParameterError("vertex " + std::to_string(u) +
                                        " out of range [0, " +
                                        std::to_string(n_) + ")");
    }

    int n_;
    int words_;
    std::vector<uint64_t> bits_;
    std::string label_;
    size_t m_ = 0;
};

}  // namespace pantograph::ensemble
