#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adcons/linalg.hpp"
#include "adcons/matrix.hpp"

namespace adcons {

/// Directed edge `from -> to`: node `to` receives information from `from`,
/// so the adjacency entry a[to][from] is 1.
struct Edge {
    std::size_t from = 0;
    std::size_t to = 0;
    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Unweighted digraph without self-loops. When `has_leader` is set, node 0 is
/// the leader and may not receive from anyone.
class DirectedGraph {
public:
    DirectedGraph(std::size_t node_count, std::vector<Edge> edges, bool has_leader = false);

    [[nodiscard]] std::size_t node_count() const noexcept { return n_; }
    [[nodiscard]] std::size_t follower_count() const noexcept { return has_leader_ ? n_ - 1 : n_; }
    [[nodiscard]] bool has_leader() const noexcept { return has_leader_; }
    [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }

    [[nodiscard]] bool has_edge(std::size_t from, std::size_t to) const;
    /// Nodes j with an edge j -> i (the neighbors node i listens to).
    [[nodiscard]] const std::vector<std::size_t>& in_neighbors(std::size_t i) const { return in_[i]; }
    [[nodiscard]] const std::vector<std::size_t>& out_neighbors(std::size_t i) const { return out_[i]; }

    /// Same graph with nodes relabeled: node i becomes perm[i].
    [[nodiscard]] DirectedGraph permuted(const std::vector<std::size_t>& perm) const;

private:
    std::size_t n_;
    std::vector<Edge> edges_;
    bool has_leader_;
    std::vector<std::vector<std::size_t>> in_;
    std::vector<std::vector<std::size_t>> out_;
};

/// Edge-list text: first line "N <count> [leader]", then one "i j" per line
/// (edge i -> j, 0-indexed). `#` starts a comment.
[[nodiscard]] DirectedGraph parse_graph(std::string_view text);
[[nodiscard]] DirectedGraph load_graph(const std::filesystem::path& path);
[[nodiscard]] std::string format_graph(const DirectedGraph& g);

struct LaplacianBundle {
    Matrix L;
    /// Leader graphs only: follower block L[1:,1:] and leader column L[1:,0].
    std::optional<Matrix> L1;
    std::optional<Matrix> L2;
};

[[nodiscard]] LaplacianBundle build_laplacian(const DirectedGraph& g);

/// Strongly connected components (Tarjan); each component lists its nodes.
[[nodiscard]] std::vector<std::vector<std::size_t>> strongly_connected_components(const DirectedGraph& g);
[[nodiscard]] bool is_strongly_connected(const DirectedGraph& g);
[[nodiscard]] bool has_spanning_tree_rooted_at(const DirectedGraph& g, std::size_t root);
[[nodiscard]] bool has_spanning_tree(const DirectedGraph& g);

/// Positive r with rᵀL = 0 and Σr = 1. Throws GraphClass when the sparsity
/// pattern of L is not strongly connected.
[[nodiscard]] Vector left_null_vector(const Matrix& laplacian);

struct LhatResult {
    Matrix Lhat;  // R L + Lᵀ R
    double lambda2 = 0.0;
};
[[nodiscard]] LhatResult lambda2_lhat(const Matrix& laplacian, const Vector& r,
                                      const NumericPolicy& policy = default_policy());

enum class ScalingMethod { InverseRowSums, LeftRightRatio, Rebalanced };

struct MMatrixScaling {
    Vector g;
    Matrix G;
    double lambda0 = 0.0;  // λ_min(G L1 + L1ᵀ G)
    ScalingMethod method = ScalingMethod::InverseRowSums;
    int rebalance_steps = 0;
};

/// Nonsingular M-matrix test: nonpositive off-diagonals, spectrum in the open
/// right half-plane.
[[nodiscard]] bool is_nonsingular_mmatrix(const Matrix& m, const NumericPolicy& policy = default_policy());

/// Positive diagonal G with G L1 + L1ᵀ G positive definite.
[[nodiscard]] MMatrixScaling mmatrix_scaling(const Matrix& l1, const NumericPolicy& policy = default_policy());

struct LeaderlessCertificate {
    Vector r;
    Matrix R;
    Matrix Lhat;
    double lambda2 = 0.0;
};

struct LeaderCertificate {
    MMatrixScaling scaling;
};

/// Validates strong connectivity and returns (r, L̂, λ₂).
[[nodiscard]] LeaderlessCertificate leaderless_certificate(const DirectedGraph& g,
                                                           const NumericPolicy& policy = default_policy());
/// Validates a leader-rooted spanning tree and returns (G, λ₀).
[[nodiscard]] LeaderCertificate leader_certificate(const DirectedGraph& g,
                                                   const NumericPolicy& policy = default_policy());

}  // namespace adcons
