#include "alignppl/eval.hpp"

#include <cmath>

namespace alignppl {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

Machine::Machine(ANFProgramPtr prog) : prog_(std::move(prog)), control_(prog_->root) {}

void Machine::setSampleMode(Rng rng, bool recordTrace) {
  mode_ = DrawMode::Sample;
  rng_ = rng;
  recordTrace_ = recordTrace;
}

void Machine::setReplayMode(const Trace* trace) {
  mode_ = DrawMode::Replay;
  traceIn_ = trace;
  traceIdx_ = 0;
}

void Machine::setHookMode(AssumeHook hook) {
  mode_ = DrawMode::Hook;
  hook_ = std::move(hook);
}

void Machine::fail(const std::string& msg) {
  status_ = Status::Failed;
  error_ = msg;
}

void Machine::bindAndContinue(NameId n, Value v, const ANFTerm* rest) {
  env_ = envExtend(env_, n, std::move(v));
  if (recordLetSeq_) letSeq_.push_back(n);
  control_ = rest;
}

bool matchValue(const PatternA& pat, const Value& v,
                std::vector<std::pair<NameId, Value>>& binds) {
  switch (pat.kind) {
    case Pattern::Kind::Wildcard:
      return true;
    case Pattern::Kind::Var:
      binds.emplace_back(pat.var, v);
      return true;
    case Pattern::Kind::Bool:
      return v.kind == Value::Kind::Bool && v.s.b == pat.bval;
    case Pattern::Kind::SeqEmpty:
      return v.kind == Value::Kind::Seq && asSeq(v).elems.empty();
    case Pattern::Kind::SeqCons: {
      if (v.kind != Value::Kind::Seq) return false;
      const auto& elems = asSeq(v).elems;
      if (elems.empty()) return false;
      if (!matchValue(*pat.sub, elems.front(), binds)) return false;
      std::vector<Value> tail(elems.begin() + 1, elems.end());
      return matchValue(*pat.sub2, vSeq(std::move(tail)), binds);
    }
    case Pattern::Kind::Variant: {
      if (v.kind != Value::Kind::Variant) return false;
      const auto& data = asVariant(v);
      if (data.tag != pat.tag) return false;
      return matchValue(*pat.sub, data.payload, binds);
    }
    case Pattern::Kind::Record: {
      if (v.kind != Value::Kind::Record) return false;
      const auto& fields = asRecord(v).fields;
      for (const auto& [key, sub] : pat.fields) {
        const Value* fv = nullptr;
        for (const auto& [k2, v2] : fields) {
          if (k2 == key) {
            fv = &v2;
            break;
          }
        }
        if (!fv) return false;
        if (!matchValue(*sub, *fv, binds)) return false;
      }
      return true;
    }
  }
  return false;
}

bool Machine::stepOnce(const SuspendSpec& spec) {
  if (++steps_ > maxSteps_) {
    fail("step budget exceeded");
    return false;
  }
  if (control_->kind == ANFTerm::Kind::TailVar) {
    const Value* v = envLookup(env_, control_->var);
    if (!v) {
      fail("unbound variable '" + prog_->nameStr(control_->var) + "'");
      return false;
    }
    if (kont_.empty()) {
      result_ = *v;
      status_ = Status::Terminated;
      return false;
    }
    const Frame& f = kont_.back();
    env_ = envExtend(f.env, f.bind, *v);
    if (recordLetSeq_) letSeq_.push_back(f.bind);
    if (trackAppPath_ && f.appSite != 0) appPath_.pop_back();
    control_ = f.rest;
    kont_.pop_back();
    return true;
  }

  NameId x = control_->var;
  const ANFBound& b = control_->bound;
  const ANFTerm* rest = control_->rest;

  auto lookup = [&](NameId n) -> const Value* {
    const Value* v = envLookup(env_, n);
    if (!v) fail("unbound variable '" + prog_->nameStr(n) + "'");
    return v;
  };

  switch (b.kind) {
    case ANFBound::Kind::Var: {
      const Value* v = lookup(b.x);
      if (!v) return false;
      bindAndContinue(x, *v, rest);
      return true;
    }
    case ANFBound::Kind::Const:
      bindAndContinue(x, vFromLit(b.lit), rest);
      return true;
    case ANFBound::Kind::Lam:
      bindAndContinue(x, vClosure(b.x, b.t1, env_, b.selfName), rest);
      return true;
    case ANFBound::Kind::App: {
      const Value* fn = lookup(b.x);
      if (!fn) return false;
      const Value* arg = lookup(b.y);
      if (!arg) return false;
      if (fn->kind == Value::Kind::Closure) {
        const ClosureData& clo = asClosure(*fn);
        kont_.push_back(Frame{x, rest, env_, b.site});
        if (trackAppPath_) appPath_.push_back(b.site);
        Env callEnv = clo.env;
        if (clo.self != kNoName) callEnv = envExtend(callEnv, clo.self, *fn);
        env_ = envExtend(callEnv, clo.param, *arg);
        control_ = clo.body;
        return true;
      }
      try {
        Value v = deltaApply(*fn, *arg);
        bindAndContinue(x, std::move(v), rest);
      } catch (const std::runtime_error& e) {
        fail(e.what());
        return false;
      }
      return true;
    }
    case ANFBound::Kind::If: {
      const Value* c = lookup(b.x);
      if (!c) return false;
      if (c->kind != Value::Kind::Bool) {
        fail("if condition is not a boolean: " + valueToString(*c));
        return false;
      }
      kont_.push_back(Frame{x, rest, env_, 0});
      control_ = c->s.b ? b.t1 : b.t2;
      return true;
    }
    case ANFBound::Kind::Match: {
      const Value* scrut = lookup(b.x);
      if (!scrut) return false;
      std::vector<std::pair<NameId, Value>> binds;
      bool ok = matchValue(*b.pat, *scrut, binds);
      kont_.push_back(Frame{x, rest, env_, 0});
      if (ok) {
        for (auto& [n, v] : binds) env_ = envExtend(env_, n, std::move(v));
        control_ = b.t1;
      } else {
        control_ = b.t2;
      }
      return true;
    }
    case ANFBound::Kind::Assume: {
      const Value* dv = lookup(b.x);
      if (!dv) return false;
      if (dv->kind != Value::Kind::Dist) {
        fail("assume argument is not a distribution: " + valueToString(*dv));
        return false;
      }
      const Distribution& d = asDist(*dv);
      Value drawn;
      switch (mode_) {
        case DrawMode::Replay: {
          if (!traceIn_ || traceIdx_ >= traceIn_->size()) {
            fail("trace exhausted at '" + prog_->nameStr(x) + "'");
            return false;
          }
          drawn = (*traceIn_)[traceIdx_++];
          try {
            totalLogPrior_ += logDensity(d, drawn);  // -inf outside support
          } catch (const DistError& e) {
            fail(e.what());
            return false;
          }
          break;
        }
        case DrawMode::Sample: {
          drawn = sample(d, rng_);
          totalLogPrior_ += logDensity(d, drawn);
          if (recordTrace_) trace_.push_back(drawn);
          break;
        }
        case DrawMode::Hook: {
          try {
            drawn = hook_(d, x, *this);
          } catch (const std::runtime_error& e) {
            fail(e.what());
            return false;
          }
          break;
        }
      }
      bindAndContinue(x, std::move(drawn), rest);
      return true;
    }
    case ANFBound::Kind::Weight: {
      const Value* wv = lookup(b.x);
      if (!wv) return false;
      if (!wv->isNumeric()) {
        fail("weight argument is not numeric: " + valueToString(*wv));
        return false;
      }
      double w = wv->asReal();
      if (!(w >= 0.0)) {
        fail("weight argument is negative or NaN");
        return false;
      }
      double lw = w == 0.0 ? kNegInf : std::log(w);
      totalLogLik_ += lw;
      segLogLik_ += lw;
      bindAndContinue(x, vUnit(), rest);
      if (spec.contains(x)) {
        status_ = Status::SuspendedAtWeight;
        suspendedAt_ = x;
        return false;
      }
      return true;
    }
    case ANFBound::Kind::Record: {
      std::vector<std::pair<std::string, Value>> fields;
      fields.reserve(b.fields.size());
      for (const auto& [k, n] : b.fields) {
        const Value* v = lookup(n);
        if (!v) return false;
        fields.emplace_back(k, *v);
      }
      bindAndContinue(x, vRecord(std::move(fields)), rest);
      return true;
    }
    case ANFBound::Kind::Variant: {
      const Value* v = lookup(b.x);
      if (!v) return false;
      bindAndContinue(x, vVariant(b.tag, *v), rest);
      return true;
    }
    case ANFBound::Kind::Seq: {
      std::vector<Value> elems;
      elems.reserve(b.elems.size());
      for (NameId n : b.elems) {
        const Value* v = lookup(n);
        if (!v) return false;
        elems.push_back(*v);
      }
      bindAndContinue(x, vSeq(std::move(elems)), rest);
      return true;
    }
  }
  fail("invalid ANF node");
  return false;
}

void Machine::run(const SuspendSpec& spec) {
  if (status_ == Status::Terminated || status_ == Status::Failed) return;
  if (status_ == Status::SuspendedAtWeight) {
    segLogLik_ = 0.0;
    suspendedAt_ = kNoName;
    status_ = Status::Running;
  }
  while (stepOnce(spec)) {
  }
}

EvalOutcome evalReplay(const ANFProgramPtr& prog, const Trace& trace) {
  Machine m(prog);
  m.setReplayMode(&trace);
  m.enableLetSeq(true);
  m.run(SuspendSpec::none());
  if (m.status() != Machine::Status::Terminated) throw EvalError(m.error());
  EvalOutcome out;
  out.value = m.result();
  out.logPrior = m.totalLogPrior();
  out.logLikelihood = m.totalLogLikelihood();
  out.logWeight = out.logPrior + out.logLikelihood;
  out.letSeq = m.letSeq();
  out.trace = Trace(trace.begin(), trace.begin() + static_cast<long>(m.consumedTraceLength()));
  return out;
}

EvalOutcome evalSample(const ANFProgramPtr& prog, Rng rng) {
  Machine m(prog);
  m.setSampleMode(rng, /*recordTrace=*/true);
  m.enableLetSeq(true);
  m.run(SuspendSpec::none());
  if (m.status() != Machine::Status::Terminated) throw EvalError(m.error());
  EvalOutcome out;
  out.value = m.result();
  out.logPrior = m.totalLogPrior();
  out.logLikelihood = m.totalLogLikelihood();
  out.logWeight = out.logPrior + out.logLikelihood;
  out.letSeq = m.letSeq();
  out.trace = m.producedTrace();
  return out;
}

}  // namespace alignppl
