#pragma once

#include <string>

#include "json.hpp"
#include "mmt/cluster.hpp"

namespace mmt {

// Recursive node objects: {"members": [...], "height": h, "prototype": name,
// "children": [left, right]}; leaves carry no "children".
nlohmann::json dendrogram_to_json(const PrototypeDendrogram& tree);
PrototypeDendrogram dendrogram_from_json(const nlohmann::json& j);

// Leaves are bare names; internal nodes are annotated with the prototype as
// the node label and the merge height as the branch value, e.g.
// ((A,B)A:1,C)B:1;
std::string dendrogram_to_newick(const PrototypeDendrogram& tree);

// Horizontal dendrogram, leaves labeled on the left, distance axis in [0, 1],
// dashed cut line at cut_height (omitted when < 0). Pure function of the
// tree, so re-rendering a parsed tree is byte-identical.
std::string dendrogram_to_svg(const PrototypeDendrogram& tree, double cut_height = -1.0);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace mmt
