#include "doctest.h"

#include "hyperlab/trees.hpp"

#include <cmath>
#include <sstream>

using namespace hyperlab;

TEST_CASE("tree builders") {
    const Tree p = build_tree(TreeSpec::parse("path:3"));
    CHECK(p.size() == 3);
    CHECK(p.distances()(0, 1) == 1.0);
    CHECK(p.distances()(1, 2) == 1.0);
    CHECK(p.distances()(0, 2) == 2.0);

    const Tree s = build_tree(TreeSpec::parse("star:5"));
    CHECK(s.size() == 6);
    for (int i = 1; i <= 5; ++i)
        for (int j = 1; j < i; ++j) CHECK(s.distances()(i, j) == 2.0);

    CHECK(build_tree(TreeSpec::parse("regular:3:2")).size() == 10);
    CHECK(build_tree(TreeSpec::parse("regular:4:3")).size() == 1 + 4 + 12 + 36);

    const Tree r1 = build_tree(TreeSpec::parse("random:30:7"));
    const Tree r2 = build_tree(TreeSpec::parse("random:30:7"));
    CHECK(r1.edges() == r2.edges());
    CHECK(r1.size() == 30);
}

TEST_CASE("tree spec parsing") {
    CHECK(TreeSpec::parse("random:12:99").to_string() == "random:12:99");
    CHECK_THROWS(TreeSpec::parse("cycle:3"));
    CHECK_THROWS(TreeSpec::parse("path"));
    CHECK_THROWS(TreeSpec::parse("path:x"));
    CHECK_THROWS(TreeSpec::parse("regular:3"));
}

TEST_CASE("edge-list input") {
    std::istringstream in("# a small tree\n0 1\n1 2\n\n1 3\n");
    const Tree t = read_edge_list(in);
    CHECK(t.size() == 4);
    CHECK(t.distances()(0, 3) == 2.0);
    std::istringstream cycle("0 1\n1 2\n2 0\n");
    CHECK_THROWS(read_edge_list(cycle));
    std::istringstream garbage("0 1 2\n");
    CHECK_THROWS(read_edge_list(garbage));
    std::istringstream split("0 1\n2 3\n");
    CHECK_THROWS(read_edge_list(split));
}

TEST_CASE("midpoint distances are half-integers") {
    const Tree p = build_tree(TreeSpec::parse("path:3"));
    const Mat d = distances_with_midpoints(p);
    REQUIRE(d.rows() == 5);
    CHECK(d(0, 3) == 0.5);  // vertex 0 to the midpoint of edge (0,1)
    CHECK(d(0, 4) == 1.5);
    CHECK(d(3, 4) == 1.0);
}

TEST_CASE("BIM embeddings of small trees") {
    const TreeEmbedding two = bim_embed(build_tree(TreeSpec::parse("path:2")), 2.0);
    CHECK(distance(two.embedding.points[0], two.embedding.points[1]) == doctest::Approx(std::acosh(2.0)).epsilon(1e-12));
    const TreeEmbedding three = bim_embed(build_tree(TreeSpec::parse("path:3")), 2.0);
    CHECK(distance(three.embedding.points[0], three.embedding.points[2]) ==
          doctest::Approx(std::acosh(4.0)).epsilon(1e-12));
    // Close to the degenerate end of the parameter range the signature is still (n-1, 1).
    const Tree r = build_tree(TreeSpec::parse("random:25:3"));
    const Signature s = kernel_signature(gram_from_kernel(r.distances(), KernelSpec::tree(1.01)));
    CHECK(s.negative == 1);
}

TEST_CASE("BIM embedding is exact on random trees") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Tree t = build_tree({TreeSpec::Kind::random, 30, 0, seed});
        for (double lambda : {1.5, 2.0}) {
            const TreeEmbedding e = bim_embed(t, lambda, true);
            CHECK(e.embedding.reconstruction_error <= 1e-8);
            const auto m = e.distances.rows();
            for (Eigen::Index i = 0; i < m; ++i)
                for (Eigen::Index j = 0; j < i; ++j) {
                    const double k = std::pow(lambda, e.distances(i, j));
                    const double c = -bilinear_form(e.embedding.points[i].coords(), e.embedding.points[j].coords());
                    CHECK(std::abs(c - k) / k <= 1e-8);
                }
        }
    }
}

TEST_CASE("the published QI constants hold on tree vertices") {
    const double lambda = 2.0;
    const double k = std::max(std::log(lambda), 1.0 / std::log(lambda));
    const double c = std::log(2.0) / std::log(lambda);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Tree t = build_tree({TreeSpec::Kind::random, 60, 0, seed});
        const TreeEmbedding e = bim_embed(t, lambda);
        for (int i = 0; i < t.size(); ++i)
            for (int j = 0; j < i; ++j) {
                const double dt = t.distances()(i, j);
                const double d = distance(e.embedding.points[i], e.embedding.points[j]);
                CHECK(d >= dt / k - c - 1e-6);
                CHECK(d <= k * dt + c + 1e-6);
            }
    }
}

TEST_CASE("midpoint separation on stars") {
    CHECK(std::abs(midpoint_separation(2, 2.0) - 1.3169578969248167) <= 1e-9);
    CHECK(std::abs(midpoint_separation(50, 2.0) - std::acosh(2.0)) <= 1e-9);
    CHECK(std::abs(midpoint_separation(10, 1.5) - std::acosh(1.5)) <= 1e-9);
}

TEST_CASE("separated midpoints near the center grow with the star") {
    // Every midpoint is at distance arccosh(sqrt(2)) < 1 from the center and all pairs are
    // exactly arccosh(2) apart, so the greedy set takes all of them.
    for (int m : {10, 20, 40}) CHECK(separated_midpoints_in_ball(m, 2.0, 1.0) == m);
}
