#include "mmt/tree_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "mmt/csv.hpp"

namespace mmt {

namespace {

nlohmann::json node_to_json(const PrototypeDendrogram& tree, int i) {
    const auto& nd = tree.nodes[i];
    nlohmann::json j;
    j["members"] = nlohmann::json::array();
    for (int m : nd.members) j["members"].push_back(tree.ids[m]);
    j["height"] = nd.height;
    j["prototype"] = tree.ids[nd.prototype];
    if (nd.left >= 0) {
        j["children"] = nlohmann::json::array();
        j["children"].push_back(node_to_json(tree, nd.left));
        j["children"].push_back(node_to_json(tree, nd.right));
    }
    return j;
}

}  // namespace

nlohmann::json dendrogram_to_json(const PrototypeDendrogram& tree) {
    if (tree.nodes.empty()) throw std::invalid_argument("empty dendrogram");
    return node_to_json(tree, tree.root());
}

PrototypeDendrogram dendrogram_from_json(const nlohmann::json& root) {
    PrototypeDendrogram tree;
    if (!root.is_object() || !root.contains("members"))
        throw std::runtime_error("dendrogram json: root must be a node object");

    // members arrays are written in leaf-index order, so the root's member
    // list is the original id ordering
    std::map<std::string, int> index_of;
    for (const auto& m : root.at("members")) {
        const std::string name = m.get<std::string>();
        if (index_of.count(name))
            throw std::runtime_error("dendrogram json: duplicate member " + name);
        index_of[name] = static_cast<int>(tree.ids.size());
        tree.ids.push_back(name);
    }
    const std::size_t n = tree.ids.size();
    if (n == 0) throw std::runtime_error("dendrogram json: no members");
    for (std::size_t i = 0; i < n; ++i) {
        DendrogramNode leaf;
        leaf.height = 0.0;
        leaf.prototype = static_cast<int>(i);
        leaf.members = {static_cast<int>(i)};
        tree.nodes.push_back(std::move(leaf));
    }

    std::function<int(const nlohmann::json&)> build = [&](const nlohmann::json& j) -> int {
        if (!j.is_object() || !j.contains("members") || !j.contains("height") ||
            !j.contains("prototype"))
            throw std::runtime_error("dendrogram json: malformed node");
        std::vector<int> members;
        for (const auto& m : j.at("members")) {
            const auto it = index_of.find(m.get<std::string>());
            if (it == index_of.end())
                throw std::runtime_error("dendrogram json: unknown member " +
                                         m.get<std::string>());
            members.push_back(it->second);
        }
        std::sort(members.begin(), members.end());
        const auto pit = index_of.find(j.at("prototype").get<std::string>());
        if (pit == index_of.end() ||
            !std::binary_search(members.begin(), members.end(), pit->second))
            throw std::runtime_error("dendrogram json: prototype outside node members");

        if (!j.contains("children")) {
            if (members.size() != 1)
                throw std::runtime_error("dendrogram json: leaf with multiple members");
            return members[0];
        }
        const auto& ch = j.at("children");
        if (!ch.is_array() || ch.size() != 2)
            throw std::runtime_error("dendrogram json: children must be a pair");
        const int left = build(ch[0]);
        const int right = build(ch[1]);

        DendrogramNode nd;
        nd.left = left;
        nd.right = right;
        nd.height = j.at("height").get<double>();
        nd.prototype = pit->second;
        nd.members = std::move(members);
        {
            std::vector<int> expect(tree.nodes[left].members);
            expect.insert(expect.end(), tree.nodes[right].members.begin(),
                          tree.nodes[right].members.end());
            std::sort(expect.begin(), expect.end());
            if (expect != nd.members)
                throw std::runtime_error("dendrogram json: members do not match children");
        }
        tree.nodes.push_back(std::move(nd));
        return static_cast<int>(tree.nodes.size()) - 1;
    };

    const int root_id = build(root);
    if (root_id != tree.root())
        throw std::runtime_error("dendrogram json: disconnected nodes");
    return tree;
}

namespace {

void node_to_newick(const PrototypeDendrogram& tree, int i, std::string& out) {
    const auto& nd = tree.nodes[i];
    if (nd.left < 0) {
        out += tree.ids[nd.prototype];
        return;
    }
    out += '(';
    node_to_newick(tree, nd.left, out);
    out += ',';
    node_to_newick(tree, nd.right, out);
    out += ')';
    out += tree.ids[nd.prototype];
    out += ':';
    out += format_double(nd.height);
}

}  // namespace

std::string dendrogram_to_newick(const PrototypeDendrogram& tree) {
    if (tree.nodes.empty()) throw std::invalid_argument("empty dendrogram");
    std::string out;
    node_to_newick(tree, tree.root(), out);
    out += ";";
    out += '\n';
    return out;
}

std::string dendrogram_to_svg(const PrototypeDendrogram& tree, double cut_height) {
    if (tree.nodes.empty()) throw std::invalid_argument("empty dendrogram");
    const std::size_t n = tree.leaf_count();

    // leaf rows top to bottom in left-first traversal order
    std::vector<int> slot(tree.nodes.size(), -1);
    {
        int next = 0;
        std::vector<int> stack = {tree.root()};
        while (!stack.empty()) {
            const int i = stack.back();
            stack.pop_back();
            const auto& nd = tree.nodes[i];
            if (nd.left < 0) {
                slot[i] = next++;
            } else {
                stack.push_back(nd.right);   // right below left
                stack.push_back(nd.left);
            }
        }
    }

    const double row_h = 16.0;
    const double label_w = 240.0;
    const double plot_w = 560.0;
    const double top = 24.0;
    const double bottom = 36.0;
    const double height_px = top + static_cast<double>(n) * row_h + bottom;
    const double width_px = label_w + plot_w + 24.0;
    const double x0 = label_w;

    auto xof = [&](double h) { return x0 + h * plot_w; };
    auto fmt = [](double v) { return format_double(v); };

    // y center per node: leaves at their slot, internals midway between kids
    std::vector<double> y(tree.nodes.size(), 0.0);
    std::vector<double> x(tree.nodes.size(), 0.0);
    std::function<void(int)> place = [&](int i) {
        const auto& nd = tree.nodes[i];
        if (nd.left < 0) {
            y[i] = top + (static_cast<double>(slot[i]) + 0.5) * row_h;
            x[i] = xof(0.0);
            return;
        }
        place(nd.left);
        place(nd.right);
        y[i] = (y[nd.left] + y[nd.right]) / 2.0;
        x[i] = xof(nd.height);
    };
    place(tree.root());

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width_px) +
           "\" height=\"" + fmt(height_px) + "\" viewBox=\"0 0 " + fmt(width_px) + " " +
           fmt(height_px) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<g font-family=\"monospace\" font-size=\"11\">\n";

    // distance axis with ticks every 0.1
    const double axis_y = top + static_cast<double>(n) * row_h + 8.0;
    svg += "<line x1=\"" + fmt(xof(0.0)) + "\" y1=\"" + fmt(axis_y) + "\" x2=\"" +
           fmt(xof(1.0)) + "\" y2=\"" + fmt(axis_y) + "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 10; ++t) {
        const double h = static_cast<double>(t) / 10.0;
        svg += "<line x1=\"" + fmt(xof(h)) + "\" y1=\"" + fmt(axis_y) + "\" x2=\"" +
               fmt(xof(h)) + "\" y2=\"" + fmt(axis_y + 4.0) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + fmt(xof(h)) + "\" y=\"" + fmt(axis_y + 16.0) +
               "\" text-anchor=\"middle\">" + fmt(h) + "</text>\n";
    }

    // leaf labels
    for (std::size_t i = 0; i < n; ++i) {
        svg += "<text x=\"" + fmt(x0 - 6.0) + "\" y=\"" + fmt(y[i] + 4.0) +
               "\" text-anchor=\"end\">" + tree.ids[i] + "</text>\n";
    }

    // merge brackets in structural (left-first) order, so a parsed tree
    // renders byte-identically regardless of node array ordering
    std::function<void(int)> draw = [&](int i) {
        const auto& nd = tree.nodes[i];
        if (nd.left < 0) return;
        const int l = nd.left, r = nd.right;
        svg += "<path fill=\"none\" stroke=\"black\" d=\"M" + fmt(x[l]) + " " + fmt(y[l]) +
               " H" + fmt(x[i]) + " V" + fmt(y[r]) + " H" + fmt(x[r]) + "\"/>\n";
        draw(l);
        draw(r);
    };
    draw(tree.root());

    if (cut_height >= 0.0) {
        svg += "<line x1=\"" + fmt(xof(cut_height)) + "\" y1=\"" + fmt(top - 8.0) +
               "\" x2=\"" + fmt(xof(cut_height)) + "\" y2=\"" + fmt(axis_y) +
               "\" stroke=\"#c62828\" stroke-dasharray=\"4 3\"/>\n";
        svg += "<text x=\"" + fmt(xof(cut_height)) + "\" y=\"" + fmt(top - 12.0) +
               "\" text-anchor=\"middle\" fill=\"#c62828\">cut " + fmt(cut_height) +
               "</text>\n";
    }

    svg += "</g>\n</svg>\n";
    return svg;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot create " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace mmt
