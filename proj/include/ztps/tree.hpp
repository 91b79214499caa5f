#pragma once

#include <Eigen/Core>
#include <limits>
#include <string>
#include <vector>

namespace ztps {

// Rooted binary partition tree over species labels. The root covers all
// species, leaves are singletons, and each internal node's children
// partition it. Node ids are assigned in pre-order (root = 0, first child
// subtree before second), so every child id is larger than its parent's and
// serialized output is reproducible.
class PartitionTree {
 public:
  struct Node {
    int parent = -1;
    int child1 = -1;
    int child2 = -1;
    std::string label;  // leaf name; internal label may be empty
    double branch_length = std::numeric_limits<double>::quiet_NaN();
    int leaf_rank = -1;      // 0..J-1 by first appearance in the source text
    int internal_rank = -1;  // 0..J-2 in node-id order

    bool is_leaf() const { return child1 < 0; }
  };

  // Parses a Newick string. Every split must be binary; leaf names must be
  // unique; branch lengths and internal labels are kept as metadata.
  static PartitionTree from_newick(const std::string& text);

  // Caterpillar tree splitting {order[0]} against the rest, recursively.
  static PartitionTree sequential(const std::vector<std::string>& species_order);

  int node_count() const { return static_cast<int>(nodes_.size()); }
  int leaf_count() const { return static_cast<int>(leaf_nodes_.size()); }
  int internal_count() const { return static_cast<int>(internal_nodes_.size()); }
  int root() const { return 0; }

  const Node& node(int id) const { return nodes_.at(id); }
  int leaf_node(int leaf_rank) const { return leaf_nodes_.at(leaf_rank); }
  int internal_node(int internal_rank) const { return internal_nodes_.at(internal_rank); }
  const std::vector<std::string>& leaf_names() const { return leaf_names_; }

  // Sibling of a non-root node.
  int sibling(int id) const;

  // Ancestor path of a node: from the child of the root down to the node
  // itself, root excluded. Empty for the root.
  std::vector<int> ancestors(int id) const;

  struct Separator {
    int node;     // youngest common ancestor of the two leaves
    int child_i;  // child of node on the path to leaf_i
    int child_j;  // child of node on the path to leaf_j
  };
  // Separator of two distinct leaves (arguments are leaf ranks).
  Separator separator(int leaf_i, int leaf_j) const;

  // Newick text with internal labels; round-trips topology and names.
  std::string to_newick(bool with_branch_lengths = true) const;

  // Leaf ranks covered by a node, in leaf-rank order.
  std::vector<int> leaves_under(int id) const;

  // Group totals |y_B| for every node, children accumulated before parents.
  // y is indexed by leaf rank.
  Eigen::VectorXd group_sums(const Eigen::Ref<const Eigen::VectorXd>& y) const;

 private:
  void finalize();

  std::vector<Node> nodes_;
  std::vector<int> leaf_nodes_;
  std::vector<int> internal_nodes_;
  std::vector<std::string> leaf_names_;
};

}  // namespace ztps
