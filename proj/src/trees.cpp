#include "hyperlab/trees.hpp"

#include "hyperlab/log.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <limits>
#include <random>
#include <sstream>

namespace hyperlab {

Tree Tree::from_edges(int n, std::vector<std::pair<int, int>> edges) {
    if (n < 1) fail(ErrorKind::invalid_input, "tree needs at least one vertex");
    if (static_cast<int>(edges.size()) != n - 1) fail(ErrorKind::invalid_input, "tree on n vertices needs n-1 edges");
    Tree t;
    t.adjacency_.assign(n, {});
    for (auto [u, v] : edges) {
        if (u < 0 || v < 0 || u >= n || v >= n || u == v) fail(ErrorKind::invalid_input, "bad tree edge");
        t.adjacency_[u].push_back(v);
        t.adjacency_[v].push_back(u);
    }
    t.edges_ = std::move(edges);
    t.dist_ = Mat::Constant(n, n, -1.0);
    for (int s = 0; s < n; ++s) {
        std::deque<int> queue{s};
        t.dist_(s, s) = 0.0;
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            for (int v : t.adjacency_[u])
                if (t.dist_(s, v) < 0.0) {
                    t.dist_(s, v) = t.dist_(s, u) + 1.0;
                    queue.push_back(v);
                }
        }
    }
    // n-1 edges and connected means acyclic.
    if (t.dist_.minCoeff() < 0.0) fail(ErrorKind::invalid_input, "tree edges do not connect all vertices");
    return t;
}

TreeSpec TreeSpec::parse(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    auto number = [&](std::size_t i) -> long long {
        if (i >= parts.size()) fail(ErrorKind::invalid_input, "tree spec '" + text + "' is missing a parameter");
        try {
            std::size_t used = 0;
            const long long v = std::stoll(parts[i], &used);
            if (used != parts[i].size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            fail(ErrorKind::invalid_input, "tree spec '" + text + "' has a non-integer parameter");
        }
    };
    TreeSpec s;
    if (parts.empty()) fail(ErrorKind::invalid_input, "empty tree spec");
    const std::string& kind = parts[0];
    std::size_t expected = 2;
    if (kind == "path") {
        s.kind = Kind::path;
        s.size = static_cast<int>(number(1));
    } else if (kind == "star") {
        s.kind = Kind::star;
        s.size = static_cast<int>(number(1));
    } else if (kind == "regular") {
        s.kind = Kind::regular;
        s.size = static_cast<int>(number(1));
        s.depth = static_cast<int>(number(2));
        expected = 3;
    } else if (kind == "random") {
        s.kind = Kind::random;
        s.size = static_cast<int>(number(1));
        s.seed = static_cast<std::uint64_t>(number(2));
        expected = 3;
    } else {
        fail(ErrorKind::invalid_input, "unknown tree kind '" + kind + "'");
    }
    if (parts.size() != expected) fail(ErrorKind::invalid_input, "tree spec '" + text + "' has the wrong number of fields");
    return s;
}

std::string TreeSpec::to_string() const {
    switch (kind) {
        case Kind::path: return "path:" + std::to_string(size);
        case Kind::star: return "star:" + std::to_string(size);
        case Kind::regular: return "regular:" + std::to_string(size) + ":" + std::to_string(depth);
        case Kind::random: return "random:" + std::to_string(size) + ":" + std::to_string(seed);
    }
    return {};
}

Tree build_tree(const TreeSpec& spec) {
    std::vector<std::pair<int, int>> edges;
    int n = 0;
    switch (spec.kind) {
        case TreeSpec::Kind::path:
            if (spec.size < 1) fail(ErrorKind::invalid_input, "path needs >= 1 vertex");
            n = spec.size;
            for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
            break;
        case TreeSpec::Kind::star:
            if (spec.size < 1) fail(ErrorKind::invalid_input, "star needs >= 1 leaf");
            n = spec.size + 1;
            for (int i = 1; i < n; ++i) edges.emplace_back(0, i);
            break;
        case TreeSpec::Kind::regular: {
            if (spec.size < 2 || spec.depth < 0) fail(ErrorKind::invalid_input, "regular tree needs valency >= 2, depth >= 0");
            std::vector<int> frontier{0};
            n = 1;
            for (int level = 0; level < spec.depth; ++level) {
                std::vector<int> next;
                for (int u : frontier) {
                    const int children = u == 0 ? spec.size : spec.size - 1;
                    for (int c = 0; c < children; ++c) {
                        edges.emplace_back(u, n);
                        next.push_back(n++);
                    }
                }
                frontier = std::move(next);
                if (n > 100000) fail(ErrorKind::invalid_input, "regular tree too large");
            }
            break;
        }
        case TreeSpec::Kind::random: {
            if (spec.size < 1) fail(ErrorKind::invalid_input, "random tree needs >= 1 vertex");
            n = spec.size;
            std::mt19937_64 rng(spec.seed);
            for (int i = 1; i < n; ++i) {
                std::uniform_int_distribution<int> parent(0, i - 1);
                edges.emplace_back(parent(rng), i);
            }
            break;
        }
    }
    return Tree::from_edges(n, std::move(edges));
}

Tree read_edge_list(std::istream& in) {
    std::vector<std::pair<int, int>> edges;
    int max_vertex = -1;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        int u = 0, v = 0;
        std::string rest;
        if (!(ls >> u >> v) || (ls >> rest))
            fail(ErrorKind::invalid_input, "edge list line " + std::to_string(line_no) + ": expected 'u v'");
        edges.emplace_back(u, v);
        max_vertex = std::max({max_vertex, u, v});
    }
    return Tree::from_edges(max_vertex + 1, std::move(edges));
}

Mat distances_with_midpoints(const Tree& t) {
    const int n = t.size();
    const int e = static_cast<int>(t.edges().size());
    const Mat& d = t.distances();
    Mat out(n + e, n + e);
    out.topLeftCorner(n, n) = d;
    for (int k = 0; k < e; ++k) {
        const auto [a, b] = t.edges()[k];
        for (int x = 0; x < n; ++x) out(x, n + k) = out(n + k, x) = std::min(d(x, a), d(x, b)) + 0.5;
        for (int l = 0; l < e; ++l) {
            if (l == k) {
                out(n + k, n + l) = 0.0;
                continue;
            }
            const auto [c, f] = t.edges()[l];
            out(n + k, n + l) = std::min({d(a, c), d(a, f), d(b, c), d(b, f)}) + 1.0;
        }
    }
    return out;
}

TreeEmbedding bim_embed(const Tree& t, double lambda, bool include_midpoints, const Tolerances& tol) {
    TreeEmbedding out;
    out.vertex_count = t.size();
    out.distances = include_midpoints ? distances_with_midpoints(t) : t.distances();
    if (include_midpoints) out.midpoint_edges = t.edges();
    // Neighbouring vertices contribute eigenvalues of order one while the spectral norm grows
    // like lambda^diameter. Once that ratio nears the signature cutoff, short distances are lost.
    const double span = out.distances.size() ? out.distances.maxCoeff() * std::log(lambda) : 0.0;
    if (span > std::log(1e-2 / tol.signature))
        log_warning("tree embedding: lambda^diameter = " + std::to_string(std::exp(span)) +
                    " is beyond the resolvable range; short distances may collapse");
    out.embedding = minkowski_embed(gram_from_kernel(out.distances, KernelSpec::tree(lambda)), -1, tol);
    return out;
}

double midpoint_separation(int m, double lambda) {
    if (m < 2) fail(ErrorKind::invalid_input, "midpoint separation needs m >= 2");
    const TreeEmbedding e = bim_embed(build_tree({TreeSpec::Kind::star, m}), lambda, true);
    double best = std::numeric_limits<double>::infinity();
    const int first = e.vertex_count;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < i; ++j)
            best = std::min(best, distance(e.embedding.points[first + i], e.embedding.points[first + j]));
    return best;
}

int separated_midpoints_in_ball(int m, double lambda, double radius) {
    const TreeEmbedding e = bim_embed(build_tree({TreeSpec::Kind::star, m}), lambda, true);
    const double separation = std::acosh(lambda);
    const HPoint& center = e.embedding.points[0];
    std::vector<int> chosen;
    for (int i = 0; i < m; ++i) {
        const HPoint& p = e.embedding.points[e.vertex_count + i];
        if (distance(center, p) > radius) continue;
        // 1e-9 absorbs roundoff in points that sit exactly at the separation distance.
        const bool separated = std::all_of(chosen.begin(), chosen.end(), [&](int j) {
            return distance(p, e.embedding.points[e.vertex_count + j]) >= separation - 1e-9;
        });
        if (separated) chosen.push_back(i);
    }
    return static_cast<int>(chosen.size());
}

}  // namespace hyperlab
