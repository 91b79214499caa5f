#include "ztps/tree.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "ztps/errors.hpp"

namespace ztps {

namespace {

struct NewickParser {
  const std::string& text;
  size_t pos = 0;

  explicit NewickParser(const std::string& t) : text(t) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw InputError("newick parse error at byte " + std::to_string(pos) + ": " + what);
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
      ++pos;
    }
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  bool is_label_char(char c) const {
    return c != '(' && c != ')' && c != ',' && c != ':' && c != ';' && c != '\0' &&
           !std::isspace(static_cast<unsigned char>(c));
  }

  std::string read_label() {
    skip_ws();
    const size_t start = pos;
    while (pos < text.size() && is_label_char(text[pos])) {
      ++pos;
    }
    return text.substr(start, pos - start);
  }

  double read_branch_length() {
    skip_ws();
    size_t consumed = 0;
    double value;
    try {
      value = std::stod(text.substr(pos), &consumed);
    } catch (const std::exception&) {
      fail("expected branch length after ':'");
    }
    pos += consumed;
    return value;
  }

  // Parses one subtree into out, allocating its node id first so that ids
  // follow pre-order. Returns the node id.
  int parse_subtree(std::vector<PartitionTree::Node>& out) {
    const int id = static_cast<int>(out.size());
    out.emplace_back();
    if (peek() == '(') {
      ++pos;  // '('
      std::vector<int> children;
      children.push_back(parse_subtree(out));
      while (peek() == ',') {
        ++pos;
        children.push_back(parse_subtree(out));
      }
      if (peek() != ')') {
        fail("expected ')' or ','");
      }
      ++pos;  // ')'
      if (children.size() != 2) {
        throw InputError("newick: node " + clade_name(out, children) + " has " +
                         std::to_string(children.size()) +
                         " children; partition trees must be binary");
      }
      out[id].child1 = children[0];
      out[id].child2 = children[1];
      for (int c : children) {
        out[c].parent = id;
      }
      out[id].label = read_label();
    } else {
      out[id].label = read_label();
      if (out[id].label.empty()) {
        fail("expected leaf name");
      }
    }
    if (peek() == ':') {
      ++pos;
      out[id].branch_length = read_branch_length();
    }
    return id;
  }

  // Names a partially parsed clade by its leaf labels; the clade's own child
  // pointers are not yet set when the binary check fails, so the completed
  // child subtrees are passed in explicitly.
  static std::string clade_name(const std::vector<PartitionTree::Node>& nodes,
                                const std::vector<int>& children) {
    std::vector<std::string> leaves;
    for (int c : children) {
      collect_leaves(nodes, c, leaves);
    }
    std::string s = "(";
    for (size_t i = 0; i < leaves.size(); ++i) {
      if (i) s += ",";
      s += leaves[i];
    }
    return s + ")";
  }

  static void collect_leaves(const std::vector<PartitionTree::Node>& nodes, int id,
                             std::vector<std::string>& out) {
    if (nodes[id].child1 < 0) {
      out.push_back(nodes[id].label);
      return;
    }
    collect_leaves(nodes, nodes[id].child1, out);
    collect_leaves(nodes, nodes[id].child2, out);
  }
};

}  // namespace

PartitionTree PartitionTree::from_newick(const std::string& text) {
  NewickParser parser(text);
  PartitionTree tree;
  parser.parse_subtree(tree.nodes_);
  if (parser.peek() != ';') {
    parser.fail("expected ';' after tree");
  }
  ++parser.pos;
  parser.skip_ws();
  if (parser.pos != text.size()) {
    parser.fail("trailing content after ';'");
  }
  tree.finalize();
  return tree;
}

PartitionTree PartitionTree::sequential(const std::vector<std::string>& species_order) {
  if (species_order.size() < 2) {
    throw std::invalid_argument("sequential tree needs at least two species");
  }
  PartitionTree tree;
  auto& nodes = tree.nodes_;
  const int n = static_cast<int>(species_order.size());
  int parent = -1;
  for (int k = 0; k < n - 1; ++k) {
    const int internal = static_cast<int>(nodes.size());
    nodes.emplace_back();
    nodes[internal].parent = parent;
    if (parent >= 0) {
      nodes[parent].child2 = internal;
    }
    const int leaf = static_cast<int>(nodes.size());
    nodes.emplace_back();
    nodes[leaf].parent = internal;
    nodes[leaf].label = species_order[k];
    nodes[internal].child1 = leaf;
    parent = internal;
  }
  const int last = static_cast<int>(nodes.size());
  nodes.emplace_back();
  nodes[last].parent = parent;
  nodes[last].label = species_order[n - 1];
  nodes[parent].child2 = last;
  tree.finalize();
  return tree;
}

void PartitionTree::finalize() {
  if (nodes_.empty() || nodes_[0].is_leaf()) {
    throw InputError("partition tree must have at least two leaves");
  }
  leaf_nodes_.clear();
  internal_nodes_.clear();
  leaf_names_.clear();
  std::unordered_set<std::string> seen;
  for (int id = 0; id < node_count(); ++id) {
    Node& nd = nodes_[id];
    if (nd.is_leaf()) {
      if (!seen.insert(nd.label).second) {
        throw InputError("duplicate leaf name '" + nd.label + "'");
      }
      nd.leaf_rank = static_cast<int>(leaf_nodes_.size());
      leaf_nodes_.push_back(id);
      leaf_names_.push_back(nd.label);
    } else {
      nd.internal_rank = static_cast<int>(internal_nodes_.size());
      internal_nodes_.push_back(id);
    }
  }
}

int PartitionTree::sibling(int id) const {
  const int parent = node(id).parent;
  if (parent < 0) {
    throw std::invalid_argument("sibling: root has no sibling");
  }
  const Node& p = node(parent);
  return p.child1 == id ? p.child2 : p.child1;
}

std::vector<int> PartitionTree::ancestors(int id) const {
  std::vector<int> path;
  for (int cur = id; cur != root(); cur = node(cur).parent) {
    path.push_back(cur);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

PartitionTree::Separator PartitionTree::separator(int leaf_i, int leaf_j) const {
  if (leaf_i == leaf_j) {
    throw std::invalid_argument("separator: leaves must be distinct");
  }
  const std::vector<int> path_i = ancestors(leaf_node(leaf_i));
  const std::vector<int> path_j = ancestors(leaf_node(leaf_j));
  size_t k = 0;
  while (k < path_i.size() && k < path_j.size() && path_i[k] == path_j[k]) {
    ++k;
  }
  Separator sep;
  sep.node = k == 0 ? root() : path_i[k - 1];
  sep.child_i = path_i[k];
  sep.child_j = path_j[k];
  return sep;
}

std::string PartitionTree::to_newick(bool with_branch_lengths) const {
  std::ostringstream out;
  out.precision(17);
  auto emit = [&](auto&& self, int id) -> void {
    const Node& nd = node(id);
    if (!nd.is_leaf()) {
      out << '(';
      self(self, nd.child1);
      out << ',';
      self(self, nd.child2);
      out << ')';
    }
    out << nd.label;
    if (with_branch_lengths && !std::isnan(nd.branch_length)) {
      out << ':' << nd.branch_length;
    }
  };
  emit(emit, root());
  out << ';';
  return out.str();
}

std::vector<int> PartitionTree::leaves_under(int id) const {
  std::vector<int> ranks;
  auto walk = [&](auto&& self, int cur) -> void {
    const Node& nd = node(cur);
    if (nd.is_leaf()) {
      ranks.push_back(nd.leaf_rank);
      return;
    }
    self(self, nd.child1);
    self(self, nd.child2);
  };
  walk(walk, id);
  std::sort(ranks.begin(), ranks.end());
  return ranks;
}

Eigen::VectorXd PartitionTree::group_sums(
    const Eigen::Ref<const Eigen::VectorXd>& y) const {
  if (y.size() != leaf_count()) {
    throw std::invalid_argument("group_sums: vector length " + std::to_string(y.size()) +
                                " does not match leaf count " +
                                std::to_string(leaf_count()));
  }
  Eigen::VectorXd sums(node_count());
  for (int id = node_count() - 1; id >= 0; --id) {
    const Node& nd = nodes_[id];
    sums[id] = nd.is_leaf() ? y[nd.leaf_rank] : sums[nd.child1] + sums[nd.child2];
  }
  return sums;
}

}  // namespace ztps
