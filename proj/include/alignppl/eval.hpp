#ifndef ALIGNPPL_EVAL_HPP
#define ALIGNPPL_EVAL_HPP

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "alignppl/value.hpp"

namespace alignppl {

/// Sequence of arity-0 values consumed by assume during one execution.
using Trace = std::vector<Value>;

struct EvalOutcome {
  Value value;
  double logWeight = 0.0;      // logPrior + logLikelihood
  double logPrior = 0.0;       // density of draws at assume
  double logLikelihood = 0.0;  // contributions from weight
  std::vector<NameId> letSeq;
  Trace trace;
};

/// Which weight binders suspend the machine.
struct SuspendSpec {
  bool allWeights = false;
  const std::vector<bool>* weightSet = nullptr;  // indexed by NameId

  bool contains(NameId n) const {
    if (allWeights) return true;
    return weightSet && n < weightSet->size() && (*weightSet)[n];
  }
  static SuspendSpec none() { return SuspendSpec{}; }
  static SuspendSpec all() { return SuspendSpec{true, nullptr}; }
};

class Machine;
/// Supplies the value bound at an assume; installed by MCMC drivers.
using AssumeHook = std::function<Value(const Distribution&, NameId binder, Machine&)>;

/// A suspendable program instance: control term, environment, and an explicit
/// frame stack, all persistent so checkpoints clone in O(1).
class Machine {
 public:
  enum class Status : uint8_t { Running, SuspendedAtWeight, Terminated, Failed };

  explicit Machine(ANFProgramPtr prog);

  void setSampleMode(Rng rng, bool recordTrace);
  void setReplayMode(const Trace* trace);
  void setHookMode(AssumeHook hook);
  void enableLetSeq(bool on) { recordLetSeq_ = on; }
  void enableAppPath(bool on) { trackAppPath_ = on; }
  void setStepBudget(uint64_t maxSteps) { maxSteps_ = maxSteps; }

  /// Runs until suspension at a weight in `spec`, termination, or failure.
  /// Resuming a suspended machine resets the segment weight accumulator.
  void run(const SuspendSpec& spec);

  Status status() const { return status_; }
  const Value& result() const { return result_; }
  const std::string& error() const { return error_; }
  NameId suspendedAt() const { return suspendedAt_; }

  /// Log-likelihood accumulated in the current segment, including the
  /// suspending weight.
  double segmentLogLikelihood() const { return segLogLik_; }
  double totalLogLikelihood() const { return totalLogLik_; }
  double totalLogPrior() const { return totalLogPrior_; }

  const std::vector<NameId>& letSeq() const { return letSeq_; }
  const Trace& producedTrace() const { return trace_; }
  size_t consumedTraceLength() const { return traceIdx_; }

  /// Application-site ids of the pending call frames, outermost first.
  /// Maintained only when enableAppPath(true).
  const std::vector<uint32_t>& appPath() const { return appPath_; }

  Rng& rng() { return rng_; }
  void setRng(Rng rng) { rng_ = rng; }
  const ANFProgram& program() const { return *prog_; }

  void addPriorLog(double lp) { totalLogPrior_ += lp; }

 private:
  struct Frame {
    NameId bind;
    const ANFTerm* rest;
    Env env;
    uint32_t appSite;  // nonzero for closure-application frames
  };

  enum class DrawMode : uint8_t { Sample, Replay, Hook };

  void bindAndContinue(NameId n, Value v, const ANFTerm* rest);
  void fail(const std::string& msg);
  bool stepOnce(const SuspendSpec& spec);  // returns false when no longer Running

  ANFProgramPtr prog_;
  const ANFTerm* control_;
  Env env_;
  std::vector<Frame> kont_;
  Status status_ = Status::Running;
  Value result_;
  std::string error_;
  NameId suspendedAt_ = kNoName;

  double segLogLik_ = 0.0;
  double totalLogLik_ = 0.0;
  double totalLogPrior_ = 0.0;

  DrawMode mode_ = DrawMode::Sample;
  Rng rng_;
  bool recordTrace_ = false;
  const Trace* traceIn_ = nullptr;
  size_t traceIdx_ = 0;
  AssumeHook hook_;

  bool recordLetSeq_ = false;
  std::vector<NameId> letSeq_;
  Trace trace_;

  bool trackAppPath_ = false;
  std::vector<uint32_t> appPath_;

  uint64_t maxSteps_ = std::numeric_limits<uint64_t>::max();
  uint64_t steps_ = 0;
};

/// Big-step evaluation in trace-replay mode; deterministic.
EvalOutcome evalReplay(const ANFProgramPtr& prog, const Trace& trace);

/// Big-step evaluation drawing fresh randomness. Replaying the produced
/// trace reproduces the outcome exactly.
EvalOutcome evalSample(const ANFProgramPtr& prog, Rng rng);

/// Structural pattern match; appends bindings on success.
bool matchValue(const PatternA& pat, const Value& v,
                std::vector<std::pair<NameId, Value>>& binds);

}  // namespace alignppl

#endif
