#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mmt/distance.hpp"

namespace mmt {

// Binary merge tree. Nodes 0..n-1 are the leaves (one per id, height 0,
// prototype = self); each merge appends a node whose children precede it.
// Minimax linkage guarantees the merge heights are non-decreasing from
// leaves to root, and every node's prototype is the member attaining the
// node's minimax radius.
struct DendrogramNode {
    int left = -1;              // -1 for leaves
    int right = -1;
    double height = 0.0;
    int prototype = -1;         // leaf index
    std::vector<int> members;   // sorted leaf indices
};

struct PrototypeDendrogram {
    std::vector<std::string> ids;
    std::vector<DendrogramNode> nodes;

    std::size_t leaf_count() const { return ids.size(); }
    int root() const { return static_cast<int>(nodes.size()) - 1; }
};

// r(C) = min over x in C of max over y in C of d(x, y), with the achieving x.
// Ties go to the smallest leaf index. Throws if an entry inside C is NaN.
std::pair<double, int> minimax_radius(std::span<const int> members, const DistanceMatrix& dist);

// Agglomerative clustering with minimax linkage d(G, H) = r(G u H): merge the
// pair with the smallest union radius at each of the n-1 steps. Ties break on
// the lexicographically smallest (min member, min member) pair, so the tree
// is deterministic. Throws on incomplete matrices, listing undefined pairs.
PrototypeDendrogram minimax_linkage_cluster(const DistanceMatrix& dist);

struct Cluster {
    std::vector<int> members;   // leaf indices, sorted
    int prototype = -1;
};

// Maximal subtrees whose merge heights are all < h, each with its node
// prototype. Ordered by smallest member index.
std::vector<Cluster> cut_at_height(const PrototypeDendrogram& tree, double h);

}  // namespace mmt
