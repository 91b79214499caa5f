#include "ztps/distribution.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ztps {

void NodeSplitParams::validate() const {
  theta.validate(kind);
  if (!(pi1 >= 0) || !(pi2 >= 0) || pi1 + pi2 > 1) {
    throw std::invalid_argument(
        "NodeSplitParams: need pi1, pi2 >= 0 and pi1 + pi2 <= 1");
  }
}

double NodeSplitParams::mean_proportion(int which) const {
  return factorial_proportion(which, 1);
}

double NodeSplitParams::factorial_proportion(int which, int k) const {
  if (which != 1 && which != 2) {
    throw std::invalid_argument("factorial_proportion: side must be 1 or 2");
  }
  if (k < 1) {
    throw std::invalid_argument("factorial_proportion: k must be >= 1");
  }
  const double theta_b = which == 1 ? theta.theta1 : theta.theta2;
  const double pi_b = which == 1 ? pi1 : pi2;
  const double pi_sib = which == 1 ? pi2 : pi1;
  const int c = polya_c(kind);
  double ratio = 1;
  for (int t = 0; t < k; ++t) {
    ratio *= (theta_b + c * t) / (theta.total() + c * t);
  }
  return pi_sib + (1 - pi_b - pi_sib) * ratio;
}

double log_zi_split_pmf(long n1, long n2, const NodeSplitParams& params) {
  params.validate();
  const double base = log_split_pmf(n1, n2, params.theta, params.kind);
  const double w = 1 - params.pi1 - params.pi2;
  double atoms = 0;
  if (n1 == 0) atoms += params.pi1;
  if (n2 == 0) atoms += params.pi2;
  if (atoms == 0) {
    return w == 0 ? neg_inf : std::log(w) + base;
  }
  // base <= 0, so exp(base) cannot overflow; underflow folds into the atoms.
  return std::log(atoms + w * std::exp(base));
}

std::pair<long, long> sample_zi_split(long n, const NodeSplitParams& params,
                                      std::mt19937_64& rng) {
  params.validate();
  if (n < 0) {
    throw std::invalid_argument("sample_zi_split: n must be nonnegative");
  }
  if (n == 0) {
    return {0, 0};
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  if (u < params.pi1) {
    return {0, n};
  }
  if (u < params.pi1 + params.pi2) {
    return {n, 0};
  }
  return sample_split(n, params.theta, params.kind, rng);
}

void ZtpsModel::validate() const {
  if (static_cast<int>(splits.size()) != tree.internal_count()) {
    throw std::invalid_argument("ZtpsModel: need one split parameter set per internal node");
  }
  for (const auto& s : splits) {
    s.validate();
  }
  global.validate();
}

const NodeSplitParams& ZtpsModel::split_at(int node_id) const {
  return splits.at(tree.node(node_id).internal_rank);
}

double log_joint_pmf(const Eigen::Ref<const Eigen::VectorXd>& y, const ZtpsModel& model) {
  model.validate();
  if (y.size() != model.tree.leaf_count()) {
    throw std::invalid_argument("log_joint_pmf: count vector length " +
                                std::to_string(y.size()) + " does not match " +
                                std::to_string(model.tree.leaf_count()) + " leaves");
  }
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    if (!(y[j] >= 0) || y[j] != std::floor(y[j])) {
      throw std::invalid_argument("log_joint_pmf: counts must be nonnegative integers");
    }
  }
  const Eigen::VectorXd sums = model.tree.group_sums(y);
  double ll = log_global_pmf(std::llround(sums[model.tree.root()]), model.global);
  for (int r = 0; r < model.tree.internal_count(); ++r) {
    const auto& nd = model.tree.node(model.tree.internal_node(r));
    ll += log_zi_split_pmf(std::llround(sums[nd.child1]), std::llround(sums[nd.child2]),
                           model.splits[r]);
  }
  return ll;
}

namespace {

// Damage factor of `node_id` within its parent's split: the factorial
// proportion of the side node_id occupies.
double node_factorial_proportion(const ZtpsModel& model, int node_id, int k) {
  const auto& nd = model.tree.node(node_id);
  const auto& parent = model.tree.node(nd.parent);
  const NodeSplitParams& params = model.split_at(nd.parent);
  return params.factorial_proportion(parent.child1 == node_id ? 1 : 2, k);
}

// E[(|Y_B|)_k]: the factorial-proportion product along the ancestor path of
// node_id (root gives the global moment itself).
double group_factorial_moment(const ZtpsModel& model, int node_id, int k) {
  double value = model.global.factorial_moment(k);
  for (int b : model.tree.ancestors(node_id)) {
    value *= node_factorial_proportion(model, b, k);
  }
  return value;
}

}  // namespace

double factorial_moment(const ZtpsModel& model, int leaf, int k) {
  model.validate();
  if (k < 1) {
    throw std::invalid_argument("factorial_moment: k must be >= 1");
  }
  return group_factorial_moment(model, model.tree.leaf_node(leaf), k);
}

double marginal_zero_prob(const ZtpsModel& model, int leaf) {
  model.validate();
  double survive = 1;
  for (int b : model.tree.ancestors(model.tree.leaf_node(leaf))) {
    const auto& nd = model.tree.node(b);
    const auto& parent = model.tree.node(nd.parent);
    const NodeSplitParams& params = model.split_at(nd.parent);
    survive *= 1 - (parent.child1 == b ? params.pi1 : params.pi2);
  }
  return 1 - survive;
}

double covariance(const ZtpsModel& model, int leaf_i, int leaf_j) {
  model.validate();
  if (leaf_i == leaf_j) {
    const double m1 = factorial_moment(model, leaf_i, 1);
    const double m2 = factorial_moment(model, leaf_i, 2);
    return m2 + m1 - m1 * m1;
  }
  const auto sep = model.tree.separator(leaf_i, leaf_j);
  const NodeSplitParams& params = model.split_at(sep.node);
  const auto& sep_node = model.tree.node(sep.node);

  // Sibling covariance at the separator, via the latent allocation regime.
  const bool i_first = sep_node.child1 == sep.child_i;
  const double theta_i = i_first ? params.theta.theta1 : params.theta.theta2;
  const double theta_j = i_first ? params.theta.theta2 : params.theta.theta1;
  const double pi_i = i_first ? params.pi1 : params.pi2;
  const double pi_j = i_first ? params.pi2 : params.pi1;
  const double pi_s = pi_i + pi_j;
  const double total = theta_i + theta_j;
  const double p_i = theta_i / total;
  const double p_j = theta_j / total;
  const double pt_i = pi_j + (1 - pi_s) * p_i;
  const double pt_j = pi_i + (1 - pi_s) * p_j;
  const double mu1_s = group_factorial_moment(model, sep.node, 1);
  const double mu2_s = group_factorial_moment(model, sep.node, 2);
  const double c = polya_c(params.kind);
  const double sibling_cov =
      (1 - pi_s) * p_i * p_j * total / (total + c) * mu2_s - pt_i * pt_j * mu1_s * mu1_s;

  // Mean damage below the separator children; S_i and S_j themselves are
  // already accounted for in the sibling covariance.
  auto damage_below = [&](int leaf, int upto) {
    double d = 1;
    for (int cur = model.tree.leaf_node(leaf); cur != upto;
         cur = model.tree.node(cur).parent) {
      d *= node_factorial_proportion(model, cur, 1);
    }
    return d;
  };
  return damage_below(leaf_i, sep.child_i) * damage_below(leaf_j, sep.child_j) *
         sibling_cov;
}

Eigen::VectorXd sample(const ZtpsModel& model, std::mt19937_64& rng) {
  model.validate();
  const auto& tree = model.tree;
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(tree.node_count());
  sums[tree.root()] = static_cast<double>(sample_global(model.global, rng));
  Eigen::VectorXd y(tree.leaf_count());
  for (int id = 0; id < tree.node_count(); ++id) {
    const auto& nd = tree.node(id);
    if (nd.is_leaf()) {
      y[nd.leaf_rank] = sums[id];
      continue;
    }
    const long n = std::llround(sums[id]);
    if (n == 0) {
      continue;
    }
    const auto [n1, n2] = sample_zi_split(n, model.splits[nd.internal_rank], rng);
    sums[nd.child1] = static_cast<double>(n1);
    sums[nd.child2] = static_cast<double>(n2);
  }
  return y;
}

}  // namespace ztps
