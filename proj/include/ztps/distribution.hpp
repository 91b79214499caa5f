#pragma once

#include <Eigen/Core>
#include <random>
#include <vector>

#include "ztps/polya.hpp"
#include "ztps/tree.hpp"

namespace ztps {

// Split law at one internal node B: a bivariate Pólya split of the group
// total, mixed with point masses at the two boundary allocations. pi1 is the
// probability that group B1 receives nothing, pi2 likewise for B2; the plain
// tree Pólya split is pi1 = pi2 = 0.
struct NodeSplitParams {
  SplitTheta theta;
  PolyaKind kind = PolyaKind::dirichlet_multinomial;
  double pi1 = 0;
  double pi2 = 0;

  void validate() const;

  // Mean proportion of child `which` (1 or 2) under the zero-inflated split.
  double mean_proportion(int which) const;
  // Per-order damage factor of child `which` for the k-th factorial moment.
  double factorial_proportion(int which, int k) const;
};

// log pmf of the zero-inflated binary split, conditional on n1 + n2.
double log_zi_split_pmf(long n1, long n2, const NodeSplitParams& params);

std::pair<long, long> sample_zi_split(long n, const NodeSplitParams& params,
                                      std::mt19937_64& rng);

// Zero-inflated tree Pólya-splitting model: a global abundance law for |Y|
// and one zero-inflated Pólya split per internal node.
struct ZtpsModel {
  PartitionTree tree;
  std::vector<NodeSplitParams> splits;  // indexed by internal rank
  GlobalAbundanceLaw global;

  void validate() const;
  const NodeSplitParams& split_at(int node_id) const;
};

// Joint log pmf of a count vector indexed by leaf rank. Group totals are
// accumulated in one bottom-up pass; cost is O(J) per observation.
double log_joint_pmf(const Eigen::Ref<const Eigen::VectorXd>& y, const ZtpsModel& model);

// k-th factorial moment E[(Y_j)_k] of the leaf with the given rank.
double factorial_moment(const ZtpsModel& model, int leaf, int k);

// Structural-zero weight p_j = 1 - prod_{B in A_j} (1 - pi_B) of leaf j's
// marginal. The full marginal zero probability also includes sampling zeros
// and exceeds this in general.
double marginal_zero_prob(const ZtpsModel& model, int leaf);

// Cov(Y_i, Y_j); returns Var(Y_i) when i = j.
double covariance(const ZtpsModel& model, int leaf_i, int leaf_j);

// Top-down generative draw: global total, then a latent allocation regime at
// each internal node (boundary allocations with probabilities pi1, pi2, else
// a Pólya split draw).
Eigen::VectorXd sample(const ZtpsModel& model, std::mt19937_64& rng);

}  // namespace ztps
