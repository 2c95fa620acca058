#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>
#include <stdexcept>

#include "doctest.h"
#include "mmt/cluster.hpp"
#include "mmt/rng.hpp"
#include "support/oracle_minimax.hpp"

using namespace mmt;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

DistanceMatrix make_matrix(std::vector<std::string> ids, const std::vector<double>& upper) {
    DistanceMatrix m;
    m.ids = std::move(ids);
    const std::size_t n = m.ids.size();
    m.d.assign(n * n, 0.0);
    m.support.assign(n * n, 100);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            m.at(i, j) = upper[k];
            m.at(j, i) = upper[k];
            ++k;
        }
    REQUIRE(k == upper.size());
    return m;
}

DistanceMatrix random_matrix(Rng& rng, std::size_t n, bool coarse) {
    std::vector<double> upper(n * (n - 1) / 2);
    for (auto& v : upper) {
        // coarse grid values force ties; fine values exercise the generic path
        v = coarse ? static_cast<double>(1 + rng.below(4)) / 4.0
                   : rng.uniform(0.01, 1.0);
    }
    std::vector<std::string> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = "id" + std::to_string(i);
    return make_matrix(std::move(ids), upper);
}

// every node's prototype must attain the minimax radius over its members
void check_prototypes(const PrototypeDendrogram& tree, const DistanceMatrix& m) {
    for (const auto& node : tree.nodes) {
        double best = std::numeric_limits<double>::infinity();
        int best_leaf = -1;
        for (int x : node.members) {
            double mx = 0.0;
            for (int y : node.members)
                mx = std::max(mx, m.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y)));
            if (mx < best) {
                best = mx;
                best_leaf = x;
            }
        }
        REQUIRE(node.prototype >= 0);
        double proto_mx = 0.0;
        for (int y : node.members)
            proto_mx = std::max(proto_mx, m.at(static_cast<std::size_t>(node.prototype),
                                               static_cast<std::size_t>(y)));
        CHECK(proto_mx == best);
        CHECK(best_leaf >= 0);
    }
}

void check_no_inversions(const PrototypeDendrogram& tree) {
    for (std::size_t i = tree.leaf_count(); i < tree.nodes.size(); ++i) {
        const auto& node = tree.nodes[i];
        CHECK(node.height >= tree.nodes[static_cast<std::size_t>(node.left)].height);
        CHECK(node.height >= tree.nodes[static_cast<std::size_t>(node.right)].height);
    }
}

}  // namespace

TEST_SUITE("cluster") {

TEST_CASE("minimax radius: base cases and the worked three-point example") {
    const auto m = make_matrix({"A", "B", "C"}, {1.0, 2.0, 1.0});   // AB=1, AC=2, BC=1
    {
        const std::vector<int> single = {1};
        const auto [r, p] = minimax_radius(single, m);
        CHECK(r == 0.0);
        CHECK(p == 1);
    }
    {
        const std::vector<int> pair = {0, 1};
        const auto [r, p] = minimax_radius(pair, m);
        CHECK(r == 1.0);
        CHECK(p == 0);   // tie between A and B goes to the smaller index
    }
    {
        const std::vector<int> all = {0, 1, 2};
        const auto [r, p] = minimax_radius(all, m);
        CHECK(r == 1.0);   // B sees max distance 1
        CHECK(p == 1);
    }
}

TEST_CASE("minimax radius matches the oracle on random sets") {
    Rng rng(606);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 3 + rng.below(8);
        const auto m = random_matrix(rng, n, trial % 2 == 0);
        std::vector<int> members(n);
        std::iota(members.begin(), members.end(), 0);
        // random subset of size >= 1
        std::vector<int> subset;
        for (int x : members)
            if (rng.below(3) != 0) subset.push_back(x);
        if (subset.empty()) subset.push_back(static_cast<int>(rng.below(n)));
        const auto [r, p] = minimax_radius(subset, m);
        const auto [ro, po] = oracle::radius(subset, m);
        CHECK(r == ro);
        CHECK(p == po);
    }
}

TEST_CASE("minimax radius rejects undefined distances and empty sets") {
    auto m = make_matrix({"a", "b"}, {kNaN});
    const std::vector<int> both = {0, 1};
    CHECK_THROWS_WITH_AS(minimax_radius(both, m),
                         doctest::Contains("undefined distance between a and b"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(minimax_radius(std::span<const int>{}, m),
                         doctest::Contains("empty set"), std::invalid_argument);
}

TEST_CASE("three-point clustering merges the tied pair with the smallest leaves") {
    const auto m = make_matrix({"A", "B", "C"}, {1.0, 2.0, 1.0});
    const auto tree = minimax_linkage_cluster(m);
    REQUIRE(tree.nodes.size() == 5);
    // leaves
    for (int i = 0; i < 3; ++i) {
        CHECK(tree.nodes[static_cast<std::size_t>(i)].left == -1);
        CHECK(tree.nodes[static_cast<std::size_t>(i)].height == 0.0);
        CHECK(tree.nodes[static_cast<std::size_t>(i)].prototype == i);
        CHECK(tree.nodes[static_cast<std::size_t>(i)].members == std::vector<int>{i});
    }
    // {A,B} merges first (radius 1, tied with {B,C}; (0,1) < (1,2))
    const auto& first = tree.nodes[3];
    CHECK(first.members == std::vector<int>({0, 1}));
    CHECK(first.height == 1.0);
    CHECK(first.prototype == 0);   // tie A/B -> smaller leaf
    const auto& root = tree.nodes[4];
    CHECK(root.members == std::vector<int>({0, 1, 2}));
    CHECK(root.height == 1.0);     // r({A,B,C}) = 1 via B
    CHECK(root.prototype == 1);
    CHECK(root.left == 2);         // children ordered by smallest node id
    CHECK(root.right == 3);
}

TEST_CASE("degenerate inputs: single leaf, a pair, empty and incomplete matrices") {
    {
        const auto m = make_matrix({"only"}, {});
        const auto tree = minimax_linkage_cluster(m);
        REQUIRE(tree.nodes.size() == 1);
        CHECK(tree.nodes[0].members == std::vector<int>{0});
        CHECK(tree.root() == 0);
    }
    {
        const auto m = make_matrix({"a", "b"}, {0.5});
        const auto tree = minimax_linkage_cluster(m);
        REQUIRE(tree.nodes.size() == 3);
        CHECK(tree.nodes[2].height == 0.5);
        CHECK(tree.nodes[2].prototype == 0);
    }
    {
        DistanceMatrix empty;
        CHECK_THROWS_WITH_AS(minimax_linkage_cluster(empty),
                             doctest::Contains("empty"), std::invalid_argument);
    }
    {
        const auto m = make_matrix({"a", "b", "c"}, {0.1, kNaN, 0.2});
        CHECK_THROWS_WITH_AS(minimax_linkage_cluster(m),
                             doctest::Contains("incomplete distance matrix"),
                             std::invalid_argument);
        CHECK_THROWS_WITH_AS(minimax_linkage_cluster(m), doctest::Contains("a<->c"),
                             std::invalid_argument);
    }
}

TEST_CASE("random matrices: tree-identical to the exhaustive reference") {
    Rng rng(1234);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 2 + rng.below(9);   // 2..10 leaves
        const auto m = random_matrix(rng, n, trial % 2 == 1);
        const auto got = minimax_linkage_cluster(m);
        const auto want = oracle::minimax_tree(m);
        const bool same = oracle::trees_equal(got, want, 1e-12);
        if (!same) {
            CAPTURE(trial);
            CAPTURE(n);
        }
        CHECK(same);
        check_no_inversions(got);
        check_prototypes(got, m);
    }
}

TEST_CASE("cut_at_height: extremes, planted blocks and strict-inequality boundary") {
    Rng rng(55);
    const auto m = random_matrix(rng, 8, false);
    const auto tree = minimax_linkage_cluster(m);

    SUBCASE("cut at zero yields singletons in leaf order") {
        const auto cs = cut_at_height(tree, 0.0);
        REQUIRE(cs.size() == 8);
        for (std::size_t i = 0; i < cs.size(); ++i) {
            CHECK(cs[i].members == std::vector<int>{static_cast<int>(i)});
            CHECK(cs[i].prototype == static_cast<int>(i));
        }
    }

    SUBCASE("cut above the root keeps one cluster with the root prototype") {
        const auto cs = cut_at_height(tree, 2.0);
        REQUIRE(cs.size() == 1);
        CHECK(cs[0].members.size() == 8);
        CHECK(cs[0].prototype == tree.nodes[static_cast<std::size_t>(tree.root())].prototype);
    }

    SUBCASE("two planted blocks separate at 0.7") {
        const auto planted = make_matrix({"a", "b", "c", "d"},
                                         // ab, ac, ad, bc, bd, cd
                                         {0.1, 0.9, 0.9, 0.9, 0.9, 0.1});
        const auto t2 = minimax_linkage_cluster(planted);
        const auto cs = cut_at_height(t2, 0.7);
        REQUIRE(cs.size() == 2);
        CHECK(cs[0].members == std::vector<int>({0, 1}));
        CHECK(cs[1].members == std::vector<int>({2, 3}));

        // a merge exactly at the cut height does NOT survive the cut
        const auto boundary = cut_at_height(t2, 0.1);
        REQUIRE(boundary.size() == 4);   // pair heights are exactly 0.1
        const auto above = cut_at_height(t2, std::nextafter(0.1, 1.0));
        REQUIRE(above.size() == 2);
    }
}

TEST_CASE("scaling all distances scales heights and preserves the shape") {
    Rng rng(77);
    const auto m = random_matrix(rng, 7, false);
    auto half = m;
    for (auto& v : half.d) v *= 0.5;
    const auto a = minimax_linkage_cluster(m);
    const auto b = minimax_linkage_cluster(half);
    REQUIRE(a.nodes.size() == b.nodes.size());
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        CHECK(a.nodes[i].members == b.nodes[i].members);
        CHECK(a.nodes[i].prototype == b.nodes[i].prototype);
        CHECK(b.nodes[i].height == doctest::Approx(0.5 * a.nodes[i].height).epsilon(1e-15));
    }
}

TEST_CASE("leaf relabeling permutes cuts consistently") {
    Rng rng(88);
    const std::size_t n = 6;
    const auto m = random_matrix(rng, n, false);

    // reverse the leaf order
    DistanceMatrix perm;
    perm.ids.resize(n);
    perm.d.assign(n * n, 0.0);
    perm.support.assign(n * n, 100);
    std::vector<std::size_t> map(n);
    for (std::size_t i = 0; i < n; ++i) map[i] = n - 1 - i;
    for (std::size_t i = 0; i < n; ++i) {
        perm.ids[map[i]] = m.ids[i];
        for (std::size_t j = 0; j < n; ++j) perm.at(map[i], map[j]) = m.at(i, j);
    }

    const auto ta = minimax_linkage_cluster(m);
    const auto tb = minimax_linkage_cluster(perm);
    for (double h : {0.2, 0.5, 0.8}) {
        auto part_of = [&](const PrototypeDendrogram& t, const DistanceMatrix& d, double cut) {
            std::vector<std::vector<std::string>> out;
            for (const auto& c : cut_at_height(t, cut)) {
                std::vector<std::string> names;
                for (int x : c.members) names.push_back(d.ids[static_cast<std::size_t>(x)]);
                std::sort(names.begin(), names.end());
                out.push_back(std::move(names));
            }
            std::sort(out.begin(), out.end());
            return out;
        };
        CHECK(part_of(ta, m, h) == part_of(tb, perm, h));
    }
}

}  // TEST_SUITE
