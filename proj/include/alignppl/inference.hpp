#ifndef ALIGNPPL_INFERENCE_HPP
#define ALIGNPPL_INFERENCE_HPP

#include <cmath>
#include <string>
#include <vector>

#include "alignppl/analysis.hpp"
#include "alignppl/eval.hpp"

namespace alignppl {

struct InferenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Signals analysis unsoundness or a broken algorithm precondition, e.g. a
/// mixed suspended/terminated generation in aligned SMC.
struct InvariantViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SmcConfig {
  uint32_t particles = 1000;  // >= 2
  uint64_t seed = 0;
  bool aligned = true;
  int threads = 1;
};

struct McmcConfig {
  uint32_t steps = 1000;
  double g = 0.1;  // global step probability, > 0
  uint64_t seed = 0;
  double burn = 0.10;
  bool aligned = true;
};

struct WeightedSample {
  Value value;
  double logWeight = 0.0;
};

struct InferenceOutput {
  std::string method;
  uint64_t seed = 0;
  uint32_t particles = 0;
  uint32_t steps = 0;
  double logZ = std::nan("");
  std::vector<WeightedSample> samples;  // MCMC: post-burn, logWeight 0
  double acceptanceRate = std::nan("");
  double wallMs = 0.0;
  uint32_t generations = 0;
  std::vector<std::vector<double>> perGenLogWeights;  // SMC
  std::vector<uint8_t> acceptanceSequence;            // MCMC proposal outcomes
};

double logMeanExp(const std::vector<double>& xs);
double logSumExp(const std::vector<double>& xs);

/// Systematic resampling over softmax-normalized log weights. Output length
/// equals input length; throws InferenceError when every weight is -inf.
std::vector<uint32_t> resampleSystematic(const std::vector<double>& logWeights, Rng& rng);

/// Standard SMC evidence estimate: sum over generations of logMeanExp.
double logZFromGenerations(const std::vector<std::vector<double>>& perGenLogWeights);

enum class McmcKind : uint8_t { Aligned, StackTrace };

/// Metropolis-Hastings acceptance probability in [0,1]; weight arguments are
/// natural logs. StackTrace scales by domPrev/domCur.
double acceptanceRatio(McmcKind kind, double logW, double logWPrev, double logWPrime,
                       double logWPrimePrev, size_t domPrev = 1, size_t domCur = 1);

/// Resamples only at aligned weights; asserts every generation is uniformly
/// suspended at one binder or uniformly terminated.
InferenceOutput runAlignedSMC(const ANFProgramPtr& prog, const AnalysisResult& analysis,
                              const SmcConfig& cfg);

/// Resamples at every weight; terminated instances carry unit weight.
InferenceOutput runUnalignedSMC(const ANFProgramPtr& prog, const SmcConfig& cfg);

/// Redraws one aligned draw per step, reusing the rest plus segment-matched
/// unaligned draws; global steps with probability g redraw everything.
InferenceOutput runAlignedLightweightMCMC(const ANFProgramPtr& prog,
                                          const AnalysisResult& analysis, const McmcConfig& cfg);

/// Classic stack-trace-database variant.
InferenceOutput runLightweightMCMC(const ANFProgramPtr& prog, const McmcConfig& cfg);

}  // namespace alignppl

#endif
