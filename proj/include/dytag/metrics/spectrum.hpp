#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "dytag/core/graph.hpp"
#include "dytag/util/rng.hpp"

namespace dytag {

struct SpectrumOptions {
    /// Dense eigensolver up to this many non-isolated nodes.
    std::size_t dense_limit = 5000;
    /// Beyond dense_limit: this many smallest and this many largest Ritz values.
    std::size_t extreme_count = 512;
};

namespace detail {

/// Undirected simple projection over non-isolated nodes: adjacency lists of
/// compact indices, self-loops and parallel edges dropped.
struct SimpleProjection {
    std::vector<std::vector<int>> adj;
    std::size_t isolated = 0;
};

inline SimpleProjection simple_projection(const DyTag& g)
{
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(g.num_edges());
    for (const auto& e : g.edges()) {
        int a = static_cast<int>(*g.index_of(e.src));
        int b = static_cast<int>(*g.index_of(e.dst));
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        pairs.emplace_back(a, b);
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

    std::vector<int> compact(g.num_nodes(), -1);
    int next = 0;
    for (auto [a, b] : pairs) {
        if (compact[a] < 0) compact[a] = next++;
        if (compact[b] < 0) compact[b] = next++;
    }
    SimpleProjection p;
    p.adj.resize(static_cast<std::size_t>(next));
    for (auto [a, b] : pairs) {
        p.adj[compact[a]].push_back(compact[b]);
        p.adj[compact[b]].push_back(compact[a]);
    }
    p.isolated = g.num_nodes() - static_cast<std::size_t>(next);
    return p;
}

inline Eigen::SparseMatrix<double> normalized_laplacian(const SimpleProjection& p)
{
    const auto n = static_cast<Eigen::Index>(p.adj.size());
    std::vector<Eigen::Triplet<double>> t;
    for (Eigen::Index i = 0; i < n; ++i) {
        t.emplace_back(i, i, 1.0);
        const double di = static_cast<double>(p.adj[i].size());
        for (int j : p.adj[i])
            t.emplace_back(i, j, -1.0 / std::sqrt(di * static_cast<double>(p.adj[j].size())));
    }
    Eigen::SparseMatrix<double> L(n, n);
    L.setFromTriplets(t.begin(), t.end());
    return L;
}

/// Ritz values of a symmetric operator after m Lanczos steps with full
/// reorthogonalization, sorted ascending.
inline std::vector<double> lanczos_ritz_values(const Eigen::SparseMatrix<double>& A, std::size_t m, std::uint64_t seed)
{
    const auto n = A.rows();
    m = std::min<std::size_t>(m, static_cast<std::size_t>(n));
    Eigen::MatrixXd Q(n, static_cast<Eigen::Index>(m));
    std::vector<double> alpha, beta;

    Eigen::VectorXd q(n);
    for (Eigen::Index i = 0; i < n; ++i) q[i] = counter_normal(hash_combine(seed, static_cast<std::uint64_t>(i)));
    q.normalize();

    for (std::size_t k = 0; k < m; ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        Q.col(kk) = q;
        Eigen::VectorXd w = A * q;
        const double a = q.dot(w);
        alpha.push_back(a);
        // Two passes of classical Gram-Schmidt against the whole basis.
        for (int pass = 0; pass < 2; ++pass) {
            const Eigen::VectorXd h = Q.leftCols(kk + 1).transpose() * w;
            w -= Q.leftCols(kk + 1) * h;
        }
        const double b = w.norm();
        if (k + 1 == m || b < 1e-12) break; // invariant subspace found
        beta.push_back(b);
        q = w / b;
    }

    const auto steps = static_cast<Eigen::Index>(alpha.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(steps, steps);
    for (Eigen::Index i = 0; i < steps; ++i) {
        T(i, i) = alpha[static_cast<std::size_t>(i)];
        if (i + 1 < steps) T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("Lanczos tridiagonal eigensolver failed");
    std::vector<double> ritz(es.eigenvalues().data(), es.eigenvalues().data() + steps);
    return ritz;
}

} // namespace detail

/// Eigenvalues of the symmetric normalized Laplacian I - D^-1/2 A D^-1/2 of the
/// graph's undirected simple projection, ascending. Isolated nodes contribute
/// eigenvalue 0. Above opts.dense_limit non-isolated nodes only the
/// opts.extreme_count smallest and largest Lanczos Ritz values are returned
/// (plus the isolated zeros).
inline std::vector<double> laplacian_spectrum(const DyTag& g, const SpectrumOptions& opts = {},
                                              std::string_view graph_name = "graph")
{
    const auto proj = detail::simple_projection(g);
    const auto n = proj.adj.size();
    std::vector<double> eig(proj.isolated, 0.0);
    if (n == 0) return eig;

    const auto L = detail::normalized_laplacian(proj);
    if (n <= opts.dense_limit) {
        Eigen::MatrixXd dense(L);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success)
            throw NumericError("eigendecomposition failed for " + std::string(graph_name));
        const auto& ev = es.eigenvalues();
        eig.insert(eig.end(), ev.data(), ev.data() + ev.size());
    } else {
        auto ritz = detail::lanczos_ritz_values(L, 2 * opts.extreme_count, 0x5eed'1a9c'0000ULL);
        if (ritz.size() > 2 * opts.extreme_count) {
            ritz.erase(ritz.begin() + static_cast<std::ptrdiff_t>(opts.extreme_count),
                       ritz.end() - static_cast<std::ptrdiff_t>(opts.extreme_count));
        }
        eig.insert(eig.end(), ritz.begin(), ritz.end());
    }
    for (auto& v : eig) v = std::clamp(v, 0.0, 2.0); // exact spectrum lies in [0, 2]
    std::sort(eig.begin(), eig.end());
    return eig;
}

} // namespace dytag
