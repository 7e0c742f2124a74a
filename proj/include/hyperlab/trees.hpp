#pragma once

#include "hyperlab/kernel_embedding.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace hyperlab {

/// A finite simplicial tree with unit edges. Vertices are 0..n-1.
class Tree {
public:
    /// Validates that the edges form a spanning tree on n vertices.
    static Tree from_edges(int n, std::vector<std::pair<int, int>> edges);

    int size() const { return static_cast<int>(adjacency_.size()); }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    const std::vector<std::vector<int>>& adjacency() const { return adjacency_; }
    /// Combinatorial distance matrix.
    const Mat& distances() const { return dist_; }

private:
    Tree() = default;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> adjacency_;
    Mat dist_;
};

struct TreeSpec {
    enum class Kind { path, star, regular, random } kind = Kind::path;
    int size = 2;            ///< path: vertices; star: leaves; random: vertices; regular: valency
    int depth = 0;           ///< regular only
    std::uint64_t seed = 0;  ///< random only

    /// "path:N", "star:M", "regular:V:D" or "random:N:SEED".
    static TreeSpec parse(const std::string& text);
    std::string to_string() const;
};

/// path(n); star(m) with center 0; regular(v, D) rooted at 0 with v children at the root and v-1
/// below; random(n, seed) a random recursive tree (vertex i joins a uniform earlier vertex).
Tree build_tree(const TreeSpec& spec);

/// Reads "u v" pairs, one per line; blank lines and lines starting with '#' are skipped.
Tree read_edge_list(std::istream& in);

struct TreeEmbedding {
    Embedding embedding;
    int vertex_count = 0;
    /// Edge of each midpoint point; midpoint k is embedding point vertex_count + k.
    std::vector<std::pair<int, int>> midpoint_edges;
    Mat distances;  ///< tree distances of all embedded points (half-integers for midpoints)
};

/// Tree distances of the vertices followed by the edge midpoints of the first barycentric
/// subdivision.
Mat distances_with_midpoints(const Tree& t);

/// BIM embedding: the tree kernel lambda^d through gram_from_kernel and minkowski_embed.
TreeEmbedding bim_embed(const Tree& t, double lambda, bool include_midpoints = false, const Tolerances& tol = {});

/// Minimum embedded distance between edge midpoints of star(m).
double midpoint_separation(int m, double lambda);

/// Size of a greedy (arccosh lambda)-separated set of embedded star(m) midpoints inside the ball
/// of the given radius around the embedded center.
int separated_midpoints_in_ball(int m, double lambda, double radius);

}  // namespace hyperlab
