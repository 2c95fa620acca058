#include "mmt/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace mmt {

std::pair<double, int> minimax_radius(std::span<const int> members, const DistanceMatrix& dist) {
    if (members.empty()) throw std::invalid_argument("minimax radius of empty set");
    double best = std::numeric_limits<double>::infinity();
    int best_x = -1;
    for (int x : members) {
        double mx = 0.0;
        for (int y : members) {
            const double v = dist.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
            if (std::isnan(v))
                throw std::invalid_argument("undefined distance between " + dist.ids[x] +
                                            " and " + dist.ids[y]);
            if (v > mx) mx = v;
        }
        if (mx < best || (mx == best && x < best_x)) {
            best = mx;
            best_x = x;
        }
    }
    return {best, best_x};
}

PrototypeDendrogram minimax_linkage_cluster(const DistanceMatrix& dist) {
    const std::size_t n = dist.n();
    if (n == 0) throw std::invalid_argument("cannot cluster an empty matrix");

    // fail fast with the offending pairs, not on some later lookup
    {
        std::string missing;
        int count = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (std::isnan(dist.at(i, j))) {
                    if (count < 8) {
                        if (count) missing += ", ";
                        missing += dist.ids[i] + "<->" + dist.ids[j];
                    }
                    ++count;
                }
        if (count) {
            std::string msg = "incomplete distance matrix: " + std::to_string(count) +
                              " undefined pair(s): " + missing;
            if (count > 8) msg += ", ...";
            throw std::invalid_argument(msg);
        }
    }

    PrototypeDendrogram tree;
    tree.ids = dist.ids;
    tree.nodes.reserve(2 * n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        DendrogramNode leaf;
        leaf.height = 0.0;
        leaf.prototype = static_cast<int>(i);
        leaf.members = {static_cast<int>(i)};
        tree.nodes.push_back(std::move(leaf));
    }
    if (n == 1) return tree;

    // M[id][leaf] = max distance from leaf to any member of node id; merging
    // two nodes is an elementwise max, which keeps every linkage evaluation
    // O(|union|) instead of a full rescan.
    std::vector<std::vector<double>> M(2 * n - 1);
    for (std::size_t i = 0; i < n; ++i)
        M[i].assign(dist.d.begin() + static_cast<std::ptrdiff_t>(i * n),
                    dist.d.begin() + static_cast<std::ptrdiff_t>((i + 1) * n));

    std::vector<int> active;
    for (std::size_t i = 0; i < n; ++i) active.push_back(static_cast<int>(i));

    // linkage values survive across steps for pairs that both stay active
    std::unordered_map<std::uint64_t, double> cache;
    cache.reserve(n * n);
    auto key = [](int a, int b) {
        if (a > b) std::swap(a, b);
        return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
    };
    auto linkage = [&](int a, int b) {
        const auto k = key(a, b);
        if (auto it = cache.find(k); it != cache.end()) return it->second;
        const auto& Ma = M[a];
        const auto& Mb = M[b];
        double best = std::numeric_limits<double>::infinity();
        for (int x : tree.nodes[a].members) best = std::min(best, std::max(Ma[x], Mb[x]));
        for (int x : tree.nodes[b].members) best = std::min(best, std::max(Ma[x], Mb[x]));
        cache.emplace(k, best);
        return best;
    };

    for (std::size_t step = 0; step + 1 < n; ++step) {
        double best = std::numeric_limits<double>::infinity();
        int best_a = -1, best_b = -1;
        int best_lo = -1, best_hi = -1;
        for (std::size_t ai = 0; ai < active.size(); ++ai) {
            for (std::size_t bi = ai + 1; bi < active.size(); ++bi) {
                const int a = active[ai], b = active[bi];
                const double v = linkage(a, b);
                const int a0 = tree.nodes[a].members.front();
                const int b0 = tree.nodes[b].members.front();
                const int lo = std::min(a0, b0), hi = std::max(a0, b0);
                if (v < best || (v == best && (lo < best_lo || (lo == best_lo && hi < best_hi)))) {
                    best = v;
                    best_a = a;
                    best_b = b;
                    best_lo = lo;
                    best_hi = hi;
                }
            }
        }

        const int id = static_cast<int>(tree.nodes.size());
        DendrogramNode node;
        node.left = std::min(best_a, best_b);
        node.right = std::max(best_a, best_b);
        node.height = best;

        const auto& ma = tree.nodes[best_a].members;
        const auto& mb = tree.nodes[best_b].members;
        node.members.resize(ma.size() + mb.size());
        std::merge(ma.begin(), ma.end(), mb.begin(), mb.end(), node.members.begin());

        // prototype: member attaining the union's minimax radius, ties to the
        // smallest leaf index (members are scanned in ascending order)
        {
            const auto& Ma = M[best_a];
            const auto& Mb = M[best_b];
            double r = std::numeric_limits<double>::infinity();
            int proto = -1;
            for (int x : node.members) {
                const double mx = std::max(Ma[x], Mb[x]);
                if (mx < r) {
                    r = mx;
                    proto = x;
                }
            }
            node.prototype = proto;
        }

        M[id].resize(n);
        for (std::size_t l = 0; l < n; ++l) M[id][l] = std::max(M[best_a][l], M[best_b][l]);
        M[best_a].clear();
        M[best_b].clear();

        active.erase(std::remove(active.begin(), active.end(), best_a), active.end());
        active.erase(std::remove(active.begin(), active.end(), best_b), active.end());
        active.push_back(id);
        tree.nodes.push_back(std::move(node));
    }
    return tree;
}

std::vector<Cluster> cut_at_height(const PrototypeDendrogram& tree, double h) {
    std::vector<Cluster> out;
    if (tree.nodes.empty()) return out;

    // max merge height within each subtree; a leaf has none
    std::vector<double> sub(tree.nodes.size(), -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        const auto& nd = tree.nodes[i];
        if (nd.left < 0) continue;
        sub[i] = std::max({nd.height, sub[nd.left], sub[nd.right]});
    }

    std::vector<int> stack = {tree.root()};
    while (!stack.empty()) {
        const int i = stack.back();
        stack.pop_back();
        const auto& nd = tree.nodes[i];
        if (nd.left < 0 || sub[i] < h) {
            out.push_back({nd.members, nd.prototype});
        } else {
            stack.push_back(nd.left);
            stack.push_back(nd.right);
        }
    }
    std::sort(out.begin(), out.end(),
              [](const Cluster& a, const Cluster& b) { return a.members[0] < b.members[0]; });
    return out;
}

}  // namespace mmt
