#include "adcons/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "adcons/error.hpp"

namespace adcons {

DirectedGraph::DirectedGraph(std::size_t node_count, std::vector<Edge> edges, bool has_leader)
    : n_(node_count), edges_(std::move(edges)), has_leader_(has_leader), in_(node_count), out_(node_count) {
    if (n_ == 0) throw Error(ErrorKind::Input, "graph must have at least one node");
    if (has_leader_ && n_ < 2) throw Error(ErrorKind::Input, "leader graph needs at least one follower");
    for (const auto& e : edges_) {
        if (e.from >= n_ || e.to >= n_) {
            throw Error(ErrorKind::Input, "edge " + std::to_string(e.from) + " -> " + std::to_string(e.to) +
                                              " out of range for " + std::to_string(n_) + " nodes");
        }
        if (e.from == e.to) throw Error(ErrorKind::Input, "self-loop at node " + std::to_string(e.from));
        if (has_leader_ && e.to == 0) {
            throw Error(ErrorKind::GraphClass, "leader (node 0) cannot receive from node " + std::to_string(e.from));
        }
        if (std::find(in_[e.to].begin(), in_[e.to].end(), e.from) != in_[e.to].end()) {
            throw Error(ErrorKind::Input, "duplicate edge " + std::to_string(e.from) + " -> " + std::to_string(e.to));
        }
        in_[e.to].push_back(e.from);
        out_[e.from].push_back(e.to);
    }
    for (auto& v : in_) std::sort(v.begin(), v.end());
    for (auto& v : out_) std::sort(v.begin(), v.end());
}

bool DirectedGraph::has_edge(std::size_t from, std::size_t to) const {
    if (to >= n_) return false;
    return std::binary_search(in_[to].begin(), in_[to].end(), from);
}

DirectedGraph DirectedGraph::permuted(const std::vector<std::size_t>& perm) const {
    if (perm.size() != n_) throw Error(ErrorKind::Dimension, "permutation size mismatch");
    std::vector<Edge> e;
    e.reserve(edges_.size());
    for (const auto& edge : edges_) e.push_back({perm[edge.from], perm[edge.to]});
    return DirectedGraph(n_, std::move(e), has_leader_);
}

DirectedGraph parse_graph(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::optional<std::size_t> n;
    bool leader = false;
    std::vector<Edge> edges;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        auto fail = [&](const std::string& why) {
            throw Error(ErrorKind::Parse, "graph line " + std::to_string(lineno) + ": " + why);
        };
        if (!n) {
            if (first != "N") fail("expected header 'N <count> [leader]'");
            long long count = 0;
            if (!(ls >> count) || count <= 0) fail("bad node count");
            n = static_cast<std::size_t>(count);
            std::string flag;
            if (ls >> flag) {
                if (flag != "leader") fail("unknown header flag '" + flag + "'");
                leader = true;
            }
            if (ls >> flag) fail("trailing tokens in header");
            continue;
        }
        long long i = 0;
        long long j = 0;
        try {
            std::size_t pos = 0;
            i = std::stoll(first, &pos);
            if (pos != first.size()) fail("bad node index '" + first + "'");
        } catch (const std::logic_error&) {
            fail("bad node index '" + first + "'");
        }
        if (!(ls >> j)) fail("expected 'i j'");
        std::string extra;
        if (ls >> extra) fail("trailing tokens");
        if (i < 0 || j < 0) fail("negative node index");
        edges.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
    }
    if (!n) throw Error(ErrorKind::Parse, "graph file has no 'N' header");
    return DirectedGraph(*n, std::move(edges), leader);
}

DirectedGraph load_graph(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorKind::Input, "cannot open graph file " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_graph(ss.str());
}

std::string format_graph(const DirectedGraph& g) {
    std::ostringstream os;
    os << "N " << g.node_count() << (g.has_leader() ? " leader" : "") << '\n';
    for (const auto& e : g.edges()) os << e.from << ' ' << e.to << '\n';
    return os.str();
}

LaplacianBundle build_laplacian(const DirectedGraph& g) {
    const std::size_t n = g.node_count();
    LaplacianBundle b;
    b.L = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& nb = g.in_neighbors(i);
        b.L(i, i) = static_cast<double>(nb.size());
        for (std::size_t j : nb) b.L(i, j) = -1.0;
    }
    if (g.has_leader()) {
        b.L1 = b.L.block(1, 1, n - 1, n - 1);
        b.L2 = b.L.block(1, 0, n - 1, 1);
    }
    return b;
}

std::vector<std::vector<std::size_t>> strongly_connected_components(const DirectedGraph& g) {
    const std::size_t n = g.node_count();
    constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, unvisited), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> comps;
    std::size_t counter = 0;

    std::function<void(std::size_t)> visit = [&](std::size_t v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (std::size_t w : g.out_neighbors(v)) {
            if (index[w] == unvisited) {
                visit(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::vector<std::size_t> comp;
            std::size_t w = 0;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp.push_back(w);
            } while (w != v);
            std::sort(comp.begin(), comp.end());
            comps.push_back(std::move(comp));
        }
    };
    for (std::size_t v = 0; v < n; ++v)
        if (index[v] == unvisited) visit(v);
    return comps;
}

bool is_strongly_connected(const DirectedGraph& g) { return strongly_connected_components(g).size() == 1; }

bool has_spanning_tree_rooted_at(const DirectedGraph& g, std::size_t root) {
    const std::size_t n = g.node_count();
    if (root >= n) throw Error(ErrorKind::Input, "root " + std::to_string(root) + " out of range");
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> queue{root};
    seen[root] = true;
    std::size_t count = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        for (std::size_t w : g.out_neighbors(queue[head])) {
            if (!seen[w]) {
                seen[w] = true;
                ++count;
                queue.push_back(w);
            }
        }
    }
    return count == n;
}

bool has_spanning_tree(const DirectedGraph& g) {
    for (std::size_t r = 0; r < g.node_count(); ++r)
        if (has_spanning_tree_rooted_at(g, r)) return true;
    return false;
}

namespace {

DirectedGraph pattern_graph(const Matrix& laplacian) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < laplacian.rows(); ++i)
        for (std::size_t j = 0; j < laplacian.cols(); ++j)
            if (i != j && laplacian(i, j) != 0.0) edges.push_back({j, i});
    return DirectedGraph(laplacian.rows(), std::move(edges));
}

}  // namespace

Vector left_null_vector(const Matrix& laplacian) {
    if (!laplacian.is_square()) throw Error(ErrorKind::Dimension, "Laplacian must be square");
    const std::size_t n = laplacian.rows();
    if (!is_strongly_connected(pattern_graph(laplacian))) {
        throw Error(ErrorKind::GraphClass, "left null vector requires a strongly connected graph");
    }
    if (n == 1) return Vector{1.0};
    // Lᵀ r = 0 with the last equation replaced by Σ r = 1.
    Matrix m = laplacian.transpose();
    for (std::size_t j = 0; j < n; ++j) m(n - 1, j) = 1.0;
    Vector rhs(n);
    rhs[n - 1] = 1.0;
    const LuDecomposition lu(m);
    if (lu.singular(1e-12)) throw Error(ErrorKind::Rank, "bordered Laplacian system is singular");
    Vector r = lu.solve(rhs);
    double sum = 0.0;
    for (double v : r) sum += v;
    r *= 1.0 / sum;
    for (double v : r) {
        if (!(v > 0.0)) throw Error(ErrorKind::Rank, "left null vector has a nonpositive entry");
    }
    const Vector residual = laplacian.transpose() * r;
    if (residual.max_abs() > 1e-10 * std::max(1.0, laplacian.max_abs())) {
        throw Error(ErrorKind::Rank, "left null space is numerically defective");
    }
    return r;
}

LhatResult lambda2_lhat(const Matrix& laplacian, const Vector& r, const NumericPolicy& policy) {
    if (r.size() != laplacian.rows()) throw Error(ErrorKind::Dimension, "r size differs from Laplacian");
    const Matrix R = Matrix::diagonal(r);
    Matrix lhat = R * laplacian + laplacian.transpose() * R;
    lhat = lhat.symmetric_part();
    const auto values = symmetric_eigenvalues(lhat, policy);
    const double tol = 1e-8 * std::max(std::abs(values.back()), 1e-300);
    const auto zeros = std::count_if(values.begin(), values.end(), [tol](double v) { return std::abs(v) <= tol; });
    if (values.size() == 1) return {lhat, 0.0};
    if (values.front() < -tol) {
        throw Error(ErrorKind::Connectivity, "symmetrized Laplacian is indefinite (smallest eigenvalue " +
                                                 std::to_string(values.front()) + ")");
    }
    if (zeros != 1) {
        throw Error(ErrorKind::Connectivity, "symmetrized Laplacian has " + std::to_string(zeros) +
                                                 " near-zero eigenvalues (expected exactly one)");
    }
    return {lhat, values[1]};
}

bool is_nonsingular_mmatrix(const Matrix& m, const NumericPolicy& policy) {
    if (!m.is_square() || m.rows() == 0) return false;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (i != j && m(i, j) > 0.0) return false;
    return eigenvalues(m, policy).min_real() > policy.zero_cluster * std::max(1.0, m.max_abs());
}

MMatrixScaling mmatrix_scaling(const Matrix& l1, const NumericPolicy& policy) {
    if (!is_nonsingular_mmatrix(l1, policy)) {
        throw Error(ErrorKind::GraphClass,
                    "follower Laplacian block is not a nonsingular M-matrix (leader must root a spanning tree)");
    }
    const std::size_t n = l1.rows();
    auto evaluate = [&](const Vector& g) {
        const Matrix G = Matrix::diagonal(g);
        return lambda_min((G * l1 + l1.transpose() * G).symmetric_part(), policy);
    };
    auto finish = [&](Vector g, ScalingMethod method, int steps, double lambda0) {
        MMatrixScaling s;
        s.G = Matrix::diagonal(g);
        s.g = std::move(g);
        s.lambda0 = lambda0;
        s.method = method;
        s.rebalance_steps = steps;
        return s;
    };

    const Vector q = solve(l1, Vector::ones(n));
    Vector g(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(q[i] > 0.0)) throw Error(ErrorKind::GraphClass, "L1⁻¹1 has a nonpositive entry");
        g[i] = 1.0 / q[i];
    }
    if (double lam = evaluate(g); lam > 0.0) return finish(g, ScalingMethod::InverseRowSums, 0, lam);

    // p = L1⁻ᵀ 1, g_i = p_i / q_i
    const Vector p = solve(l1.transpose(), Vector::ones(n));
    Vector g2(n);
    for (std::size_t i = 0; i < n; ++i) g2[i] = p[i] / q[i];
    if (double lam = evaluate(g2); lam > 0.0) return finish(g2, ScalingMethod::LeftRightRatio, 0, lam);

    for (int step = 1; step <= 60; ++step) {
        const Matrix G = Matrix::diagonal(g);
        const auto eig = symmetric_eigen((G * l1 + l1.transpose() * G).symmetric_part(), policy);
        std::size_t worst = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (std::abs(eig.vectors(i, 0)) > std::abs(eig.vectors(worst, 0))) worst = i;
        g[worst] *= 2.0;
        if (double lam = evaluate(g); lam > 0.0) return finish(g, ScalingMethod::Rebalanced, step, lam);
    }
    throw Error(ErrorKind::Synthesis, "no positive diagonal scaling found after 60 rebalancing steps");
}

LeaderlessCertificate leaderless_certificate(const DirectedGraph& g, const NumericPolicy& policy) {
    if (g.has_leader()) throw Error(ErrorKind::GraphClass, "leaderless certificate requested for a leader graph");
    if (!is_strongly_connected(g)) throw Error(ErrorKind::GraphClass, "graph is not strongly connected");
    const auto bundle = build_laplacian(g);
    LeaderlessCertificate c;
    c.r = left_null_vector(bundle.L);
    c.R = Matrix::diagonal(c.r);
    auto lh = lambda2_lhat(bundle.L, c.r, policy);
    c.Lhat = std::move(lh.Lhat);
    c.lambda2 = lh.lambda2;
    return c;
}

LeaderCertificate leader_certificate(const DirectedGraph& g, const NumericPolicy& policy) {
    if (!g.has_leader()) throw Error(ErrorKind::GraphClass, "leader certificate requested for a leaderless graph");
    if (!has_spanning_tree_rooted_at(g, 0)) {
        throw Error(ErrorKind::GraphClass, "graph has no directed spanning tree rooted at the leader");
    }
    const auto bundle = build_laplacian(g);
    return {mmatrix_scaling(*bundle.L1, policy)};
}

}  // namespace adcons
