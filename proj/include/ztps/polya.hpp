#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace ztps {

// Pólya family index c of the generalized factorial: -1 falling factorial
// (hypergeometric split), 0 power (multinomial split), +1 rising factorial
// (Dirichlet-multinomial split).
enum class PolyaKind : int {
  hypergeometric = -1,
  multinomial = 0,
  dirichlet_multinomial = 1,
};

constexpr int polya_c(PolyaKind kind) { return static_cast<int>(kind); }

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

template <typename Real>
Real lchoose(Real n, Real k) {
  return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

// Digamma via upward recurrence to x >= 10, then the asymptotic series.
template <typename Real>
Real digamma(Real x) {
  Real result = 0;
  while (x < 10) {
    result -= 1 / x;
    x += 1;
  }
  const Real inv = 1 / x;
  const Real inv2 = inv * inv;
  result += std::log(x) - inv / 2 -
            inv2 * (Real(1) / 12 -
                    inv2 * (Real(1) / 120 -
                            inv2 * (Real(1) / 252 -
                                    inv2 * (Real(1) / 240 - inv2 * Real(1) / 132))));
  return result;
}

namespace detail {

template <typename Real>
void validate_gen_factorial(Real theta, long n, PolyaKind kind) {
  if (!(theta > 0) || !std::isfinite(theta)) {
    throw std::invalid_argument("log_gen_factorial: theta must be positive, got " +
                                std::to_string(theta));
  }
  if (n < 0) {
    throw std::invalid_argument("log_gen_factorial: n must be nonnegative");
  }
  if (kind == PolyaKind::hypergeometric && theta != std::floor(theta)) {
    throw std::invalid_argument(
        "log_gen_factorial: theta must be an integer when c = -1, got " +
        std::to_string(theta));
  }
}

}  // namespace detail

// log of the generalized factorial (theta)_{(n,c)} = theta(theta+c)...(theta+(n-1)c).
// Returns 0 for n = 0 and -inf when a factor vanishes (c = -1, n > theta).
template <typename Real>
Real log_gen_factorial(Real theta, long n, PolyaKind kind) {
  detail::validate_gen_factorial(theta, n, kind);
  if (n == 0) {
    return 0;
  }
  switch (kind) {
    case PolyaKind::multinomial:
      return n * std::log(theta);
    case PolyaKind::dirichlet_multinomial:
      return std::lgamma(theta + n) - std::lgamma(theta);
    case PolyaKind::hypergeometric:
      if (n > theta) {
        return neg_inf;
      }
      return std::lgamma(theta + 1) - std::lgamma(theta - n + 1);
  }
  throw std::invalid_argument("log_gen_factorial: invalid kind");
}

// Parameter pair of one binary Pólya split. The regression layer works with
// the views p1 = theta1/(theta1+theta2) and sigma = 1/(theta1+theta2).
struct SplitTheta {
  double theta1 = 1;
  double theta2 = 1;

  double total() const { return theta1 + theta2; }
  double p1() const { return theta1 / (theta1 + theta2); }
  double sigma() const { return 1 / (theta1 + theta2); }

  static SplitTheta from_proportion(double p1, double sigma) {
    return SplitTheta{p1 / sigma, (1 - p1) / sigma};
  }

  void validate(PolyaKind kind) const {
    if (!(theta1 > 0) || !(theta2 > 0) || !std::isfinite(theta1) ||
        !std::isfinite(theta2)) {
      throw std::invalid_argument("SplitTheta: theta1 and theta2 must be positive");
    }
    if (kind == PolyaKind::hypergeometric &&
        (theta1 != std::floor(theta1) || theta2 != std::floor(theta2))) {
      throw std::invalid_argument("SplitTheta: integer theta required when c = -1");
    }
  }
};

// Optimizer iterates can push theta to degenerate values; evaluation clamps
// them to keep the likelihood finite during line searches.
inline double clamp_theta(double theta) {
  return std::min(std::max(theta, 1e-8), 1e8);
}

// log pmf of the bivariate singular Pólya split of n = n1 + n2:
//   C(n, n1) (theta1)_{(n1,c)} (theta2)_{(n2,c)} / (theta1+theta2)_{(n,c)}.
// c = 0 is binomial(n, p1), c = 1 beta-binomial, c = -1 hypergeometric.
inline double log_split_pmf(long n1, long n2, const SplitTheta& theta, PolyaKind kind) {
  theta.validate(kind);
  if (n1 < 0 || n2 < 0) {
    return neg_inf;
  }
  const long n = n1 + n2;
  if (n == 0) {
    return 0;
  }
  const double num1 = log_gen_factorial(theta.theta1, n1, kind);
  const double num2 = log_gen_factorial(theta.theta2, n2, kind);
  if (num1 == neg_inf || num2 == neg_inf) {
    return neg_inf;
  }
  return lchoose<double>(static_cast<double>(n), static_cast<double>(n1)) + num1 +
         num2 - log_gen_factorial(theta.total(), n, kind);
}

// Exact draw of n1 from the split law above. Beta-binomial goes through the
// Beta mixing representation, hypergeometric through a sequential urn.
inline std::pair<long, long> sample_split(long n, const SplitTheta& theta,
                                          PolyaKind kind, std::mt19937_64& rng) {
  theta.validate(kind);
  if (n < 0) {
    throw std::invalid_argument("sample_split: n must be nonnegative");
  }
  if (n == 0) {
    return {0, 0};
  }
  long n1 = 0;
  switch (kind) {
    case PolyaKind::multinomial: {
      std::binomial_distribution<long> binom(n, theta.p1());
      n1 = binom(rng);
      break;
    }
    case PolyaKind::dirichlet_multinomial: {
      std::gamma_distribution<double> g1(theta.theta1, 1.0);
      std::gamma_distribution<double> g2(theta.theta2, 1.0);
      const double a = g1(rng);
      const double b = g2(rng);
      std::binomial_distribution<long> binom(n, a / (a + b));
      n1 = binom(rng);
      break;
    }
    case PolyaKind::hypergeometric: {
      double white = theta.theta1;
      double black = theta.theta2;
      if (n > static_cast<long>(white + black)) {
        throw std::invalid_argument("sample_split: n exceeds theta1 + theta2");
      }
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      for (long t = 0; t < n; ++t) {
        if (unif(rng) * (white + black) < white) {
          white -= 1;
          n1 += 1;
        } else {
          black -= 1;
        }
      }
      break;
    }
  }
  return {n1, n - n1};
}

// Univariate law of the total abundance |Y|: Poisson or negative binomial,
// optionally zero-inflated with weight pi on the Dirac at 0.
//
// The negative binomial is parameterized by (size, mean); the success
// probability view is prob = size / (size + mean).
struct GlobalAbundanceLaw {
  enum class Family { poisson, negative_binomial };

  Family family = Family::poisson;
  double mean = 1;
  double size = 1;             // NB dispersion; unused for Poisson
  double zero_inflation = 0;   // pi

  static GlobalAbundanceLaw poisson(double lambda, double pi = 0) {
    GlobalAbundanceLaw law;
    law.family = Family::poisson;
    law.mean = lambda;
    law.zero_inflation = pi;
    law.validate();
    return law;
  }

  static GlobalAbundanceLaw negative_binomial(double size, double mean, double pi = 0) {
    GlobalAbundanceLaw law;
    law.family = Family::negative_binomial;
    law.size = size;
    law.mean = mean;
    law.zero_inflation = pi;
    law.validate();
    return law;
  }

  // (size, prob) view with prob the success probability, mean = size(1-prob)/prob.
  static GlobalAbundanceLaw negative_binomial_prob(double size, double prob,
                                                   double pi = 0) {
    if (!(prob > 0) || !(prob < 1)) {
      throw std::invalid_argument("GlobalAbundanceLaw: prob must lie in (0,1)");
    }
    return negative_binomial(size, size * (1 - prob) / prob, pi);
  }

  double success_prob() const { return size / (size + mean); }

  void validate() const {
    if (!(mean > 0) || !std::isfinite(mean)) {
      throw std::invalid_argument("GlobalAbundanceLaw: mean must be positive");
    }
    if (family == Family::negative_binomial && (!(size > 0) || !std::isfinite(size))) {
      throw std::invalid_argument("GlobalAbundanceLaw: size must be positive");
    }
    if (!(zero_inflation >= 0) || !(zero_inflation <= 1)) {
      throw std::invalid_argument("GlobalAbundanceLaw: zero_inflation must be in [0,1]");
    }
  }

  // k-th factorial moment E[(N)_k]; the zero-inflated law scales by (1 - pi).
  double factorial_moment(int k) const {
    if (k < 1) {
      throw std::invalid_argument("factorial_moment: k must be >= 1");
    }
    double fm = 0;
    if (family == Family::poisson) {
      fm = std::pow(mean, k);
    } else {
      fm = std::exp(std::lgamma(size + k) - std::lgamma(size)) *
           std::pow(mean / size, k);
    }
    return (1 - zero_inflation) * fm;
  }
};

inline double log_global_pmf(long n, const GlobalAbundanceLaw& law) {
  law.validate();
  if (n < 0) {
    return neg_inf;
  }
  double base;
  if (law.family == GlobalAbundanceLaw::Family::poisson) {
    base = n * std::log(law.mean) - law.mean - std::lgamma(static_cast<double>(n) + 1);
  } else {
    const double r = law.size;
    const double p = law.success_prob();
    base = std::lgamma(n + r) - std::lgamma(r) - std::lgamma(static_cast<double>(n) + 1) +
           r * std::log(p) + n * std::log1p(-p);
  }
  const double pi = law.zero_inflation;
  if (pi == 0) {
    return base;
  }
  if (n == 0) {
    return std::log(pi + (1 - pi) * std::exp(base));
  }
  return pi == 1 ? neg_inf : std::log1p(-pi) + base;
}

inline long sample_global(const GlobalAbundanceLaw& law, std::mt19937_64& rng) {
  law.validate();
  if (law.zero_inflation > 0) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    if (unif(rng) < law.zero_inflation) {
      return 0;
    }
  }
  if (law.family == GlobalAbundanceLaw::Family::poisson) {
    std::poisson_distribution<long> pois(law.mean);
    return pois(rng);
  }
  std::gamma_distribution<double> gamma(law.size, law.mean / law.size);
  const double rate = gamma(rng);
  if (rate <= 0) {
    return 0;
  }
  std::poisson_distribution<long> pois(rate);
  return pois(rng);
}

}  // namespace ztps
