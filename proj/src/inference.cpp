#include "alignppl/inference.hpp"

#include <algorithm>
#include <chrono>
#include <thread>
#include <map>

namespace alignppl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// rng stream labels
constexpr uint64_t kStreamParticle = 1;
constexpr uint64_t kStreamResample = 2;
constexpr uint64_t kStreamSelect = 3;
constexpr uint64_t kStreamGlobal = 4;
constexpr uint64_t kStreamFresh = 5;
constexpr uint64_t kStreamAccept = 6;

double nowMs() {
  using namespace std::chrono;
  return duration<double, std::milli>(steady_clock::now().time_since_epoch()).count();
}

}  // namespace

double logSumExp(const std::vector<double>& xs) {
  double mx = kNegInf;
  for (double x : xs) mx = std::max(mx, x);
  if (mx == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double x : xs) sum += std::exp(x - mx);
  return mx + std::log(sum);
}

double logMeanExp(const std::vector<double>& xs) {
  if (xs.empty()) return kNegInf;
  return logSumExp(xs) - std::log(static_cast<double>(xs.size()));
}

std::vector<uint32_t> resampleSystematic(const std::vector<double>& logWeights, Rng& rng) {
  size_t n = logWeights.size();
  double mx = kNegInf;
  for (double w : logWeights) mx = std::max(mx, w);
  if (mx == kNegInf) throw InferenceError("degenerate particle population: all weights are zero");
  std::vector<double> cum(n);
  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    total += std::exp(logWeights[i] - mx);
    cum[i] = total;
  }
  std::vector<uint32_t> idx(n);
  double u = rng.nextDouble();
  size_t j = 0;
  for (size_t i = 0; i < n; ++i) {
    double point = (u + static_cast<double>(i)) / static_cast<double>(n) * total;
    while (j + 1 < n && cum[j] < point) ++j;
    idx[i] = static_cast<uint32_t>(j);
  }
  return idx;
}

double logZFromGenerations(const std::vector<std::vector<double>>& perGenLogWeights) {
  double acc = 0.0;
  for (const auto& gen : perGenLogWeights) acc += logMeanExp(gen);
  return acc;
}

double acceptanceRatio(McmcKind kind, double logW, double logWPrev, double logWPrime,
                       double logWPrimePrev, size_t domPrev, size_t domCur) {
  double num = logW + logWPrime;
  double den = logWPrev + logWPrimePrev;
  if (kind == McmcKind::StackTrace) {
    num += std::log(static_cast<double>(domPrev));
    den += std::log(static_cast<double>(domCur));
  }
  if (den == kNegInf) return 1.0;  // escape impossible states
  if (num == kNegInf) return 0.0;
  return std::min(1.0, std::exp(num - den));
}

// ---------------------------------------------------------------------------
// SMC

namespace {

InferenceOutput runSMC(const ANFProgramPtr& prog, const SuspendSpec& spec, const SmcConfig& cfg,
                       bool alignedMode, const std::string& method) {
  if (cfg.particles < 2) throw InferenceError("SMC needs at least 2 particles");
  double t0 = nowMs();
  Rng master = Rng::fromSeed(cfg.seed);
  uint32_t n = cfg.particles;

  std::vector<Machine> particles;
  particles.reserve(n);
  for (uint32_t i = 0; i < n; ++i) {
    Machine m(prog);
    m.setSampleMode(master.child(kStreamParticle, i), false);
    particles.push_back(std::move(m));
  }

  auto advance = [&](std::vector<Machine>& ps) {
    int threads = std::max(1, cfg.threads);
    if (threads == 1 || ps.size() < 64) {
      for (Machine& m : ps) m.run(spec);
      return;
    }
    std::vector<std::thread> pool;
    size_t chunk = (ps.size() + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      size_t lo = t * chunk;
      size_t hi = std::min(ps.size(), lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back([&ps, lo, hi, &spec] {
        for (size_t i = lo; i < hi; ++i) ps[i].run(spec);
      });
    }
    for (auto& th : pool) th.join();
  };

  InferenceOutput out;
  out.method = method;
  out.seed = cfg.seed;
  out.particles = n;

  std::vector<char> wasTerminated(n, 0);
  uint32_t generation = 0;
  while (true) {
    advance(particles);

    std::vector<double> w(n);
    bool allTerminated = true;
    NameId commonBinder = kNoName;
    bool haveSuspended = false;
    for (uint32_t i = 0; i < n; ++i) {
      Machine& m = particles[i];
      if (m.status() == Machine::Status::Failed) {
        throw InferenceError("particle " + std::to_string(i) + " failed: " + m.error());
      }
      if (wasTerminated[i]) {
        w[i] = 0.0;  // already terminated instances carry weight 1
        continue;
      }
      w[i] = m.segmentLogLikelihood();
      if (m.status() == Machine::Status::SuspendedAtWeight) {
        allTerminated = false;
        if (!haveSuspended) {
          haveSuspended = true;
          commonBinder = m.suspendedAt();
        } else if (alignedMode && m.suspendedAt() != commonBinder) {
          throw InvariantViolation("aligned SMC: generation suspended at different binders");
        }
      }
    }
    if (alignedMode && haveSuspended) {
      for (uint32_t i = 0; i < n; ++i) {
        if (particles[i].status() == Machine::Status::Terminated) {
          throw InvariantViolation("aligned SMC: mixed suspended/terminated generation");
        }
      }
    }
    out.perGenLogWeights.push_back(w);

    if (allTerminated) {
      out.samples.reserve(n);
      for (uint32_t i = 0; i < n; ++i) {
        out.samples.push_back({particles[i].result(), w[i]});
      }
      break;
    }

    Rng resampleRng = master.child(kStreamResample, generation);
    std::vector<uint32_t> idx = resampleSystematic(w, resampleRng);
    std::vector<Machine> next;
    next.reserve(n);
    for (uint32_t i = 0; i < n; ++i) {
      next.push_back(particles[idx[i]]);
      next.back().setRng(master.child(kStreamParticle, (static_cast<uint64_t>(generation) + 1) * n + i));
    }
    particles = std::move(next);
    for (uint32_t i = 0; i < n; ++i) {
      wasTerminated[i] = particles[i].status() == Machine::Status::Terminated;
    }
    ++generation;
  }

  out.generations = static_cast<uint32_t>(out.perGenLogWeights.size());
  out.logZ = logZFromGenerations(out.perGenLogWeights);
  out.wallMs = nowMs() - t0;
  return out;
}

}  // namespace

InferenceOutput runAlignedSMC(const ANFProgramPtr& prog, const AnalysisResult& analysis,
                              const SmcConfig& cfg) {
  std::vector<bool> suspendAt(prog->names.size(), false);
  for (NameId nb : analysis.alignedWeightBinders()) suspendAt[nb] = true;
  SuspendSpec spec;
  spec.weightSet = &suspendAt;
  return runSMC(prog, spec, cfg, /*alignedMode=*/true, "smc-aligned");
}

InferenceOutput runUnalignedSMC(const ANFProgramPtr& prog, const SmcConfig& cfg) {
  return runSMC(prog, SuspendSpec::all(), cfg, /*alignedMode=*/false, "smc-unaligned");
}

// ---------------------------------------------------------------------------
// Aligned lightweight MCMC (draw reuse through alignment, no database)

namespace {

// A reused draw can have the wrong shape for the current distribution when
// the argument of assume itself changed kind; score it impossible instead of
// failing the run, so the proposal is simply rejected.
double safeLogDensity(const Distribution& d, const Value& x) {
  try {
    return logDensity(d, x);
  } catch (const DistError&) {
    return kNegInf;
  }
}

struct AlignedStore {
  std::vector<Value> s;
  std::vector<double> p;  // log densities of aligned draws
  std::vector<std::vector<Value>> us;   // unaligned draws per segment; segment k precedes aligned draw k
  std::vector<std::vector<double>> up;  // log densities
  std::vector<std::vector<NameId>> un;  // origin binder of each unaligned draw

  void clear() {
    s.clear();
    p.clear();
    us.assign(1, {});
    up.assign(1, {});
    un.assign(1, {});
  }
};

struct AlignedRunCtx {
  const std::vector<char>* alignedBinder = nullptr;
  const AlignedStore* prev = nullptr;
  AlignedStore cur;
  size_t j = SIZE_MAX;  // aligned index to redraw
  bool global = false;
  bool reuse = true;
  double logWPrime = 0.0;
  double logWPrimePrev = 0.0;
  Rng freshRng;

  Value onAssume(const Distribution& d, NameId binder) {
    bool aligned = binder < alignedBinder->size() && (*alignedBinder)[binder];
    if (aligned) {
      size_t k = cur.s.size();
      bool freshDraw = global || k == j || !prev || k >= prev->s.size();
      Value x;
      double lp;
      if (freshDraw) {
        x = sample(d, freshRng);
        lp = logDensity(d, x);
      } else {
        x = prev->s[k];
        lp = safeLogDensity(d, x);
        logWPrimePrev += prev->p[k];
        logWPrime += lp;
      }
      cur.s.push_back(x);
      cur.p.push_back(lp);
      cur.us.emplace_back();
      cur.up.emplace_back();
      cur.un.emplace_back();
      reuse = true;
      return x;
    }
    size_t k = cur.s.size();
    size_t l = cur.us[k].size();
    bool canReuse = reuse && !global && prev && k < prev->us.size() && l < prev->us[k].size() &&
                    prev->un[k][l] == binder;
    Value x;
    double lp;
    if (!canReuse) {
      x = sample(d, freshRng);
      lp = logDensity(d, x);
      reuse = false;
    } else {
      x = prev->us[k][l];
      lp = safeLogDensity(d, x);
      logWPrimePrev += prev->up[k][l];
      logWPrime += lp;
    }
    cur.us[k].push_back(x);
    cur.up[k].push_back(lp);
    cur.un[k].push_back(binder);
    return x;
  }
};

struct McmcRunResult {
  Value value;
  double logLikelihood;
};

McmcRunResult runProgramWithHook(const ANFProgramPtr& prog, AssumeHook hook, bool trackPath) {
  Machine m(prog);
  m.setHookMode(std::move(hook));
  m.enableAppPath(trackPath);
  m.run(SuspendSpec::none());
  if (m.status() != Machine::Status::Terminated) {
    throw InferenceError("MCMC execution failed: " + m.error());
  }
  return {m.result(), m.totalLogLikelihood()};
}

void finalizeMcmcOutput(InferenceOutput& out, const McmcConfig& cfg,
                        std::vector<Value>&& chain, uint32_t accepted) {
  uint32_t burnCount = static_cast<uint32_t>(std::floor(cfg.burn * static_cast<double>(cfg.steps)));
  burnCount = std::min(burnCount, cfg.steps);
  out.samples.reserve(chain.size() - burnCount);
  for (size_t i = burnCount; i < chain.size(); ++i) out.samples.push_back({chain[i], 0.0});
  out.acceptanceRate =
      cfg.steps > 1 ? static_cast<double>(accepted) / static_cast<double>(cfg.steps - 1) : 0.0;
}

}  // namespace

InferenceOutput runAlignedLightweightMCMC(const ANFProgramPtr& prog,
                                          const AnalysisResult& analysis, const McmcConfig& cfg) {
  if (cfg.steps < 1) throw InferenceError("MCMC needs at least 1 step");
  if (!(cfg.g > 0.0 && cfg.g <= 1.0)) throw InferenceError("global step probability must be in (0,1]");
  double t0 = nowMs();
  Rng master = Rng::fromSeed(cfg.seed);

  std::vector<char> alignedBinder(prog->names.size(), 0);
  for (NameId nb : analysis.alignedAssumeBinders()) alignedBinder[nb] = 1;

  InferenceOutput out;
  out.method = "mcmc-aligned";
  out.seed = cfg.seed;
  out.steps = cfg.steps;

  AlignedStore accepted;
  accepted.clear();
  double logWAcc = 0.0;
  Value vAcc;
  std::vector<Value> chain;
  chain.reserve(cfg.steps);
  uint32_t acceptedCount = 0;

  {
    AlignedRunCtx ctx;
    ctx.alignedBinder = &alignedBinder;
    ctx.prev = nullptr;
    ctx.cur.clear();
    ctx.freshRng = master.child(kStreamFresh, 0);
    auto res = runProgramWithHook(
        prog,
        [&ctx](const Distribution& d, NameId binder, Machine&) { return ctx.onAssume(d, binder); },
        false);
    accepted = std::move(ctx.cur);
    logWAcc = res.logLikelihood;
    vAcc = res.value;
    chain.push_back(vAcc);
  }

  for (uint32_t i = 1; i < cfg.steps; ++i) {
    Rng selRng = master.child(kStreamSelect, i);
    size_t K = accepted.s.size();
    size_t j = selRng.nextBelow(std::max<size_t>(K, 1));
    if (K == 0) j = SIZE_MAX;
    Rng globalRng = master.child(kStreamGlobal, i);
    bool global = globalRng.nextDouble() < cfg.g;

    AlignedRunCtx ctx;
    ctx.alignedBinder = &alignedBinder;
    ctx.prev = &accepted;
    ctx.cur.clear();
    ctx.j = j;
    ctx.global = global;
    ctx.freshRng = master.child(kStreamFresh, i);
    auto res = runProgramWithHook(
        prog,
        [&ctx](const Distribution& d, NameId binder, Machine&) { return ctx.onAssume(d, binder); },
        false);

    if (!global && ctx.cur.s.size() != accepted.s.size()) {
      throw InvariantViolation("aligned MCMC: aligned draw count changed on a non-global step");
    }

    double a = acceptanceRatio(McmcKind::Aligned, res.logLikelihood, logWAcc, ctx.logWPrime,
                               ctx.logWPrimePrev);
    Rng acceptRng = master.child(kStreamAccept, i);
    bool accept = acceptRng.nextDouble() < a;
    out.acceptanceSequence.push_back(accept ? 1 : 0);
    if (accept) {
      accepted = std::move(ctx.cur);
      logWAcc = res.logLikelihood;
      vAcc = res.value;
      ++acceptedCount;
    }
    chain.push_back(vAcc);
  }

  finalizeMcmcOutput(out, cfg, std::move(chain), acceptedCount);
  out.wallMs = nowMs() - t0;
  return out;
}

// ---------------------------------------------------------------------------
// Lightweight MCMC (stack-trace database)

namespace {

struct Address {
  std::vector<uint32_t> path;  // application-site ids of pending frames
  NameId binder = kNoName;     // assume site
  uint32_t occ = 0;            // occurrence counter within one run

  bool operator==(const Address& o) const {
    return binder == o.binder && occ == o.occ && path == o.path;
  }
};

struct AddressLess {
  bool operator()(const Address& a, const Address& b) const {
    if (a.binder != b.binder) return a.binder < b.binder;
    if (a.occ != b.occ) return a.occ < b.occ;
    return a.path < b.path;
  }
};

struct TraceDb {
  struct Entry {
    Address addr;
    Value x;
    double logp;
  };
  std::vector<Entry> entries;  // insertion order = draw order during the run
  std::map<Address, uint32_t, AddressLess> index;  // ordered map, as in the
                                                   // reference implementations

  const Entry* find(const Address& a) const {
    auto it = index.find(a);
    return it == index.end() ? nullptr : &entries[it->second];
  }
  void insert(Address a, Value x, double logp) {
    index.emplace(a, static_cast<uint32_t>(entries.size()));
    entries.push_back({std::move(a), std::move(x), logp});
  }
  size_t size() const { return entries.size(); }
};

struct DbRunCtx {
  const TraceDb* prev = nullptr;
  TraceDb cur;
  const Address* selected = nullptr;
  bool global = false;
  double logWPrime = 0.0;
  double logWPrimePrev = 0.0;
  Rng freshRng;
  std::map<Address, uint32_t, AddressLess> occCount;

  Value onAssume(const Distribution& d, NameId binder, Machine& m) {
    Address addr;
    addr.path = m.appPath();
    addr.binder = binder;
    Address occKey = addr;
    addr.occ = ++occCount[occKey];

    const TraceDb::Entry* prevEntry = (prev && !global) ? prev->find(addr) : nullptr;
    bool redrawSelected = selected && addr == *selected;
    Value x;
    double lp;
    if (global || redrawSelected || !prevEntry) {
      x = sample(d, freshRng);
      lp = logDensity(d, x);
    } else {
      x = prevEntry->x;
      lp = safeLogDensity(d, x);
      logWPrimePrev += prevEntry->logp;
      logWPrime += lp;
    }
    cur.insert(std::move(addr), x, lp);
    return x;
  }
};

}  // namespace

InferenceOutput runLightweightMCMC(const ANFProgramPtr& prog, const McmcConfig& cfg) {
  if (cfg.steps < 1) throw InferenceError("MCMC needs at least 1 step");
  if (!(cfg.g > 0.0 && cfg.g <= 1.0)) throw InferenceError("global step probability must be in (0,1]");
  double t0 = nowMs();
  Rng master = Rng::fromSeed(cfg.seed);

  InferenceOutput out;
  out.method = "mcmc-lightweight";
  out.seed = cfg.seed;
  out.steps = cfg.steps;

  TraceDb accepted;
  double logWAcc = 0.0;
  Value vAcc;
  std::vector<Value> chain;
  chain.reserve(cfg.steps);
  uint32_t acceptedCount = 0;

  {
    DbRunCtx ctx;
    ctx.freshRng = master.child(kStreamFresh, 0);
    auto res = runProgramWithHook(
        prog,
        [&ctx](const Distribution& d, NameId binder, Machine& m) {
          return ctx.onAssume(d, binder, m);
        },
        true);
    accepted = std::move(ctx.cur);
    logWAcc = res.logLikelihood;
    vAcc = res.value;
    chain.push_back(vAcc);
  }

  for (uint32_t i = 1; i < cfg.steps; ++i) {
    if (accepted.size() == 0) {
      throw InferenceError("lightweight MCMC: empty draw database");
    }
    Rng selRng = master.child(kStreamSelect, i);
    size_t ord = selRng.nextBelow(accepted.size());
    Address selectedAddr = accepted.entries[ord].addr;
    Rng globalRng = master.child(kStreamGlobal, i);
    bool global = globalRng.nextDouble() < cfg.g;

    DbRunCtx ctx;
    ctx.prev = &accepted;
    ctx.selected = &selectedAddr;
    ctx.global = global;
    ctx.freshRng = master.child(kStreamFresh, i);
    auto res = runProgramWithHook(
        prog,
        [&ctx](const Distribution& d, NameId binder, Machine& m) {
          return ctx.onAssume(d, binder, m);
        },
        true);

    double a = acceptanceRatio(McmcKind::StackTrace, res.logLikelihood, logWAcc, ctx.logWPrime,
                               ctx.logWPrimePrev, accepted.size(), ctx.cur.size());
    Rng acceptRng = master.child(kStreamAccept, i);
    bool accept = acceptRng.nextDouble() < a;
    out.acceptanceSequence.push_back(accept ? 1 : 0);
    if (accept) {
      accepted = std::move(ctx.cur);
      logWAcc = res.logLikelihood;
      vAcc = res.value;
      ++acceptedCount;
    }
    chain.push_back(vAcc);
  }

  finalizeMcmcOutput(out, cfg, std::move(chain), acceptedCount);
  out.wallMs = nowMs() - t0;
  return out;
}

}  // namespace alignppl
