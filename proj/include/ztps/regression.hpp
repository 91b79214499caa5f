#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "ztps/distribution.hpp"
#include "ztps/polya.hpp"

namespace ztps {

inline double logistic(double eta) {
  return eta >= 0 ? 1 / (1 + std::exp(-eta)) : std::exp(eta) / (1 + std::exp(eta));
}

inline double logistic_density(double eta) {
  const double p = logistic(eta);
  return p * (1 - p);
}

inline double logit(double p) { return std::log(p) - std::log1p(-p); }

// log(1 + exp(eta)) without overflow.
inline double softplus(double eta) {
  return std::max(eta, 0.0) + std::log1p(std::exp(-std::abs(eta)));
}

enum class SplitFamily { binomial, beta_binomial };
enum class ZiSide { none, side1, side2 };

const char* to_string(SplitFamily family);
const char* to_string(ZiSide side);
SplitFamily split_family_from_string(const std::string& s);
ZiSide zi_side_from_string(const std::string& s);

// Regression specification of one binary split. The proportion of side 1 is
// logit-linked, the scale sigma = 1/(theta1+theta2) log-linked (absent for
// the binomial family, where it is not identifiable), and at most one
// boundary-inflation probability is logit-linked (intercept-only unless
// zi_regressed).
struct NodeRegSpec {
  SplitFamily family = SplitFamily::beta_binomial;
  ZiSide zi_side = ZiSide::none;
  Eigen::VectorXd beta;   // logit p1; length p+1
  Eigen::VectorXd delta;  // log sigma; length p+1, beta_binomial only
  Eigen::VectorXd b;      // logit pi on the inflated side; length 1 or p+1

  int parameter_count() const;
  Eigen::VectorXd pack() const;
  void unpack(const Eigen::Ref<const Eigen::VectorXd>& coefs);

  // Split-law parameters at one covariate row.
  NodeSplitParams split_params_at(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  void validate(int n_covariates) const;
};

// Per-node data slice: group-1 totals, parent-group totals, covariates with
// intercept. Sites with total == 0 carry no split information and contribute
// zero to the log-likelihood.
struct NodeData {
  Eigen::VectorXd group1;
  Eigen::VectorXd total;
  Eigen::MatrixXd X;

  void validate() const;
  long informative_sites() const;  // # sites with total > 0
};

// Log-likelihood of a node split regression; fills the gradient over the
// packed coefficient vector when grad is non-null.
double node_loglik(const NodeRegSpec& spec, const NodeData& data,
                   Eigen::VectorXd* grad = nullptr);

enum class GlobalFamily { poisson, negative_binomial };
enum class GlobalZi { none, intercept, regressed };

const char* to_string(GlobalFamily family);
GlobalFamily global_family_from_string(const std::string& s);

// Regression specification of the global abundance: log-linked mean with an
// additive log offset, optional NB dispersion, optional zero inflation.
struct GlobalRegSpec {
  GlobalFamily family = GlobalFamily::negative_binomial;
  GlobalZi zi = GlobalZi::none;
  Eigen::VectorXd beta;       // log mean; length p+1
  double log_dispersion = 0;  // NB only
  Eigen::VectorXd b;          // logit pi; length 1 or p+1

  int parameter_count() const;
  Eigen::VectorXd pack() const;
  void unpack(const Eigen::Ref<const Eigen::VectorXd>& coefs);

  GlobalAbundanceLaw law_at(const Eigen::Ref<const Eigen::VectorXd>& x,
                            double offset) const;

  void validate(int n_covariates) const;
};

struct GlobalData {
  Eigen::VectorXd total;
  Eigen::MatrixXd X;
  Eigen::VectorXd log_offset;

  void validate() const;
};

double global_loglik(const GlobalRegSpec& spec, const GlobalData& data,
                     Eigen::VectorXd* grad = nullptr);

// --- Generic maximization -------------------------------------------------

using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>;

struct MaximizeControls {
  double grad_tol = 1e-6;        // infinity norm of the gradient
  double loglik_rel_tol = 1e-10;
  int max_iter = 500;
};

struct MaximizeReport {
  bool converged = false;
  int iterations = 0;
  double grad_norm = std::numeric_limits<double>::quiet_NaN();
  std::string message;
};

struct MaximizeResult {
  Eigen::VectorXd x;
  double loglik;
  MaximizeReport report;
};

// Quasi-Newton (BFGS) ascent with backtracking line search. Non-finite
// objective values during the search trigger step halving; the result never
// falls below the initial log-likelihood.
MaximizeResult maximize(const Objective& objective, Eigen::VectorXd init,
                        const MaximizeControls& controls = {});

inline double aic(double loglik, int k) { return -2 * loglik + 2 * k; }
inline double bic(double loglik, int k, long n_obs) {
  return -2 * loglik + k * std::log(static_cast<double>(n_obs));
}

// Observed information -H(loglik) at a point, by central differences of the
// analytic gradient; used for diagonal standard errors.
Eigen::MatrixXd observed_information(const Objective& objective,
                                     const Eigen::VectorXd& at);
Eigen::VectorXd standard_errors(const Eigen::MatrixXd& information);

// --- Per-node model selection ----------------------------------------------

struct CandidateFit {
  SplitFamily family;
  ZiSide zi_side;
  double loglik = neg_inf;
  int k = 0;
  double aic = std::numeric_limits<double>::infinity();
  bool converged = false;
  bool failed = false;
};

struct SelectionConfig {
  std::vector<SplitFamily> families{SplitFamily::binomial, SplitFamily::beta_binomial};
  std::vector<ZiSide> zi_sides{ZiSide::none, ZiSide::side1, ZiSide::side2};
  bool zi_regressed = false;
  MaximizeControls controls;
  bool compute_se = true;
};

struct NodeFit {
  NodeRegSpec spec;
  double loglik = 0;
  int k = 0;
  long n_obs = 0;
  Eigen::VectorXd se;
  MaximizeReport report;
  bool fallback = false;
  std::vector<CandidateFit> candidates;

  double aic_value() const { return aic(loglik, k); }
  double bic_value() const { return bic(loglik, k, std::max<long>(n_obs, 1)); }
};

// Data-driven starting values (empirical logit, method-of-moments scale,
// boundary-zero excess for pi).
NodeRegSpec initial_node_spec(const NodeData& data, SplitFamily family, ZiSide zi_side,
                              bool zi_regressed);

// Fits one candidate family/inflation combination.
NodeFit fit_node(const NodeData& data, SplitFamily family, ZiSide zi_side,
                 const SelectionConfig& config = {});

// Fits the candidate grid and returns the AIC-minimal model; ties break
// toward fewer parameters, then toward no inflation. If every candidate
// fails the node falls back to an intercept-only binomial and is flagged.
NodeFit select_node_model(const NodeData& data, const SelectionConfig& config = {});

struct GlobalFit {
  GlobalRegSpec spec;
  double loglik = 0;
  int k = 0;
  long n_obs = 0;
  Eigen::VectorXd se;
  MaximizeReport report;

  double aic_value() const { return aic(loglik, k); }
  double bic_value() const { return bic(loglik, k, std::max<long>(n_obs, 1)); }
};

GlobalRegSpec initial_global_spec(const GlobalData& data, GlobalFamily family,
                                  GlobalZi zi);

GlobalFit fit_global(const GlobalData& data, GlobalFamily family, GlobalZi zi,
                     const MaximizeControls& controls = {}, bool compute_se = true);

}  // namespace ztps
