#ifndef ALIGNPPL_DIST_HPP
#define ALIGNPPL_DIST_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "alignppl/rng.hpp"

namespace alignppl {

struct Value;

enum class DistKind : uint8_t {
  Bernoulli,
  Beta,
  Gamma,
  Exponential,
  Poisson,
  Normal,
  Uniform,
  Dirichlet,
  Categorical,
};

struct DistError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Immutable distribution object. Parameters are validated on construction.
struct Distribution {
  DistKind kind;
  double a = 0.0;  // Bernoulli p, Beta a, Gamma shape, Exponential rate,
                   // Poisson rate, Normal mean, Uniform lo
  double b = 0.0;  // Beta b, Gamma scale, Normal stdev, Uniform hi
  std::vector<double> vec;  // Dirichlet alphas, Categorical weights
};

Distribution makeBernoulli(double p);
Distribution makeBeta(double a, double b);
Distribution makeGamma(double shape, double scale);
Distribution makeExponential(double rate);
Distribution makePoisson(double rate);
Distribution makeNormal(double mean, double stdev);
Distribution makeUniform(double lo, double hi);
Distribution makeDirichlet(std::vector<double> alpha);
Distribution makeCategorical(std::vector<double> weights);

std::string distToString(const Distribution& d);

/// Natural-log density or mass of v under d; -inf outside the support.
/// Throws DistError when v has the wrong shape for d.
double logDensity(const Distribution& d, const Value& v);

Value sample(const Distribution& d, Rng& rng);

/// Support values for finite discrete distributions (Bernoulli, Categorical);
/// nullopt otherwise.
std::optional<std::vector<Value>> finiteSupport(const Distribution& d);

}  // namespace alignppl

#endif
