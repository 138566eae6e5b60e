// Direct big-step interpreter over the surface Term tree. Used only by tests
// as an oracle independent of the ANF machine.
#ifndef ALIGNPPL_TESTS_TERM_INTERP_HPP
#define ALIGNPPL_TESTS_TERM_INTERP_HPP

#include <cmath>
#include <map>
#include <memory>
#include <variant>

#include "alignppl/eval.hpp"
#include "alignppl/value.hpp"

namespace alignppl::testing {

struct TClo;
using TVal = std::variant<Value, std::shared_ptr<TClo>>;
using TEnv = std::shared_ptr<const std::map<std::string, TVal>>;

struct TClo {
  std::string param;
  TermPtr body;
  TEnv env;
  std::string self;  // nonempty for let rec closures
};

struct TermOutcome {
  Value value;  // first-order result
  double logPrior = 0.0;
  double logLikelihood = 0.0;
};

class TermInterp {
 public:
  TermInterp(const Trace& trace) : trace_(trace) {}

  TermOutcome run(const TermPtr& t) {
    TEnv env = std::make_shared<std::map<std::string, TVal>>();
    TVal v = eval(t, env);
    TermOutcome out;
    out.value = std::get<Value>(v);
    out.logPrior = logPrior_;
    out.logLikelihood = logLik_;
    return out;
  }

 private:
  TVal eval(const TermPtr& t, TEnv env) {
    switch (t->kind) {
      case Term::Kind::Var: {
        auto it = env->find(t->name);
        if (it == env->end()) throw EvalError("unbound " + t->name);
        return it->second;
      }
      case Term::Kind::Const:
        return vFromLit(t->lit);
      case Term::Kind::Lam:
        return std::make_shared<TClo>(TClo{t->name, t->a, env, ""});
      case Term::Kind::Let: {
        TVal bound = eval(t->a, env);
        return eval(t->b, extend(env, t->name, std::move(bound)));
      }
      case Term::Kind::LetRec: {
        auto clo = std::make_shared<TClo>(TClo{t->a->name, t->a->a, env, t->name});
        return eval(t->b, extend(env, t->name, TVal{clo}));
      }
      case Term::Kind::App: {
        TVal f = eval(t->a, env);
        TVal a = eval(t->b, env);
        if (std::holds_alternative<std::shared_ptr<TClo>>(f)) {
          auto clo = std::get<std::shared_ptr<TClo>>(f);
          TEnv callEnv = clo->env;
          if (!clo->self.empty()) callEnv = extend(callEnv, clo->self, TVal{clo});
          callEnv = extend(callEnv, clo->param, std::move(a));
          return eval(clo->body, callEnv);
        }
        return TVal{deltaApply(std::get<Value>(f), std::get<Value>(a))};
      }
      case Term::Kind::If: {
        Value c = std::get<Value>(eval(t->a, env));
        if (c.kind != Value::Kind::Bool) throw EvalError("non-boolean condition");
        return eval(c.s.b ? t->b : t->c, env);
      }
      case Term::Kind::Assume: {
        Value dv = std::get<Value>(eval(t->a, env));
        if (dv.kind != Value::Kind::Dist) throw EvalError("assume needs a distribution");
        if (idx_ >= trace_.size()) throw EvalError("trace exhausted");
        Value drawn = trace_[idx_++];
        logPrior_ += logDensity(asDist(dv), drawn);
        return TVal{drawn};
      }
      case Term::Kind::Weight: {
        Value wv = std::get<Value>(eval(t->a, env));
        double w = wv.asReal();
        logLik_ += w == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(w);
        return TVal{vUnit()};
      }
      case Term::Kind::Match: {
        Value scrut = std::get<Value>(eval(t->a, env));
        std::map<std::string, Value> binds;
        if (matchPat(t->pat, scrut, binds)) {
          TEnv env2 = env;
          for (auto& [k, v] : binds) env2 = extend(env2, k, TVal{v});
          return eval(t->b, env2);
        }
        return eval(t->c, env);
      }
      case Term::Kind::Record: {
        std::vector<std::pair<std::string, Value>> fields;
        for (const auto& [k, ft] : t->fields) {
          fields.emplace_back(k, std::get<Value>(eval(ft, env)));
        }
        return TVal{vRecord(std::move(fields))};
      }
      case Term::Kind::Variant:
        return TVal{vVariant(t->name, std::get<Value>(eval(t->a, env)))};
      case Term::Kind::Seq: {
        std::vector<Value> elems;
        for (const auto& e : t->elems) elems.push_back(std::get<Value>(eval(e, env)));
        return TVal{vSeq(std::move(elems))};
      }
    }
    throw EvalError("bad term");
  }

  static bool matchPat(const PatternPtr& p, const Value& v, std::map<std::string, Value>& binds) {
    switch (p->kind) {
      case Pattern::Kind::Wildcard: return true;
      case Pattern::Kind::Var:
        binds[p->name] = v;
        return true;
      case Pattern::Kind::Bool: return v.kind == Value::Kind::Bool && v.s.b == p->bval;
      case Pattern::Kind::SeqEmpty: return v.kind == Value::Kind::Seq && asSeq(v).elems.empty();
      case Pattern::Kind::SeqCons: {
        if (v.kind != Value::Kind::Seq || asSeq(v).elems.empty()) return false;
        const auto& es = asSeq(v).elems;
        if (!matchPat(p->sub, es.front(), binds)) return false;
        return matchPat(p->sub2, vSeq({es.begin() + 1, es.end()}), binds);
      }
      case Pattern::Kind::Variant: {
        if (v.kind != Value::Kind::Variant || asVariant(v).tag != p->name) return false;
        return matchPat(p->sub, asVariant(v).payload, binds);
      }
      case Pattern::Kind::Record: {
        if (v.kind != Value::Kind::Record) return false;
        for (const auto& [k, sp] : p->fields) {
          const Value* fv = nullptr;
          for (const auto& [k2, v2] : asRecord(v).fields) {
            if (k2 == k) fv = &v2;
          }
          if (!fv || !matchPat(sp, *fv, binds)) return false;
        }
        return true;
      }
    }
    return false;
  }

  static TEnv extend(const TEnv& env, const std::string& k, TVal v) {
    auto m = std::make_shared<std::map<std::string, TVal>>(*env);
    (*m)[k] = std::move(v);
    return m;
  }

  const Trace& trace_;
  size_t idx_ = 0;
  double logPrior_ = 0.0;
  double logLik_ = 0.0;
};

}  // namespace alignppl::testing

#endif
