#include "alignppl/value.hpp"

#include <cmath>
#include <sstream>

namespace alignppl {

Value vFromLit(const ConstLit& c) {
  switch (c.k) {
    case ConstLit::K::Unit: return vUnit();
    case ConstLit::K::Bool: return vBool(c.b);
    case ConstLit::K::Int: return vInt(c.i);
    case ConstLit::K::Real: return vReal(c.r);
    case ConstLit::K::Op: return vOp(c.op);
  }
  return vUnit();
}

Value vDist(Distribution d) {
  Value v;
  v.kind = Value::Kind::Dist;
  v.p = std::make_shared<const Distribution>(std::move(d));
  return v;
}

Value vClosure(NameId param, const ANFTerm* body, Env env, NameId self) {
  Value v;
  v.kind = Value::Kind::Closure;
  auto c = std::make_shared<ClosureData>();
  c->param = param;
  c->body = body;
  c->env = std::move(env);
  c->self = self;
  v.p = std::move(c);
  return v;
}

Value vRecord(std::vector<std::pair<std::string, Value>> fields) {
  Value v;
  v.kind = Value::Kind::Record;
  auto r = std::make_shared<RecordData>();
  r->fields = std::move(fields);
  v.p = std::move(r);
  return v;
}

Value vVariant(std::string tag, Value payload) {
  Value v;
  v.kind = Value::Kind::Variant;
  auto d = std::make_shared<VariantData>();
  d->tag = std::move(tag);
  d->payload = std::move(payload);
  v.p = std::move(d);
  return v;
}

Value vSeq(std::vector<Value> elems) {
  Value v;
  v.kind = Value::Kind::Seq;
  auto d = std::make_shared<SeqData>();
  d->elems = std::move(elems);
  v.p = std::move(d);
  return v;
}

int valueArity(const Value& v) {
  if (v.kind != Value::Kind::Op) return 0;
  int applied = v.p ? static_cast<int>(opArgsOf(v)->args.size()) : 0;
  return opArity(v.op) - applied;
}

bool valueEqual(const Value& a, const Value& b) {
  if (a.isNumeric() && b.isNumeric()) {
    if (a.kind != b.kind) return a.asReal() == b.asReal();
  }
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Value::Kind::Unit: return true;
    case Value::Kind::Bool: return a.s.b == b.s.b;
    case Value::Kind::Int: return a.s.i == b.s.i;
    case Value::Kind::Real: return a.s.r == b.s.r;
    case Value::Kind::Op: {
      if (a.op != b.op) return false;
      const OpArgs* xa = a.p ? opArgsOf(a) : nullptr;
      const OpArgs* xb = b.p ? opArgsOf(b) : nullptr;
      size_t na = xa ? xa->args.size() : 0;
      size_t nb = xb ? xb->args.size() : 0;
      if (na != nb) return false;
      for (size_t k = 0; k < na; ++k) {
        if (!valueEqual(xa->args[k], xb->args[k])) return false;
      }
      return true;
    }
    case Value::Kind::Dist: {
      const Distribution& da = asDist(a);
      const Distribution& db = asDist(b);
      return da.kind == db.kind && da.a == db.a && da.b == db.b && da.vec == db.vec;
    }
    case Value::Kind::Closure:
      return a.p == b.p;  // identity
    case Value::Kind::Record: {
      const auto& fa = asRecord(a).fields;
      const auto& fb = asRecord(b).fields;
      if (fa.size() != fb.size()) return false;
      for (size_t k = 0; k < fa.size(); ++k) {
        if (fa[k].first != fb[k].first || !valueEqual(fa[k].second, fb[k].second)) return false;
      }
      return true;
    }
    case Value::Kind::Variant:
      return asVariant(a).tag == asVariant(b).tag &&
             valueEqual(asVariant(a).payload, asVariant(b).payload);
    case Value::Kind::Seq: {
      const auto& ea = asSeq(a).elems;
      const auto& eb = asSeq(b).elems;
      if (ea.size() != eb.size()) return false;
      for (size_t k = 0; k < ea.size(); ++k) {
        if (!valueEqual(ea[k], eb[k])) return false;
      }
      return true;
    }
  }
  return false;
}

std::string valueToString(const Value& v) {
  std::ostringstream os;
  switch (v.kind) {
    case Value::Kind::Unit: os << "()"; break;
    case Value::Kind::Bool: os << (v.s.b ? "true" : "false"); break;
    case Value::Kind::Int: os << v.s.i; break;
    case Value::Kind::Real: {
      os.precision(17);
      os << v.s.r;
      break;
    }
    case Value::Kind::Op: {
      os << opName(v.op);
      if (v.p) {
        for (const Value& a : opArgsOf(v)->args) os << " " << valueToString(a);
      }
      break;
    }
    case Value::Kind::Dist: os << distToString(asDist(v)); break;
    case Value::Kind::Closure: os << "<closure>"; break;
    case Value::Kind::Record: {
      os << "{";
      bool first = true;
      for (const auto& [k, f] : asRecord(v).fields) {
        if (!first) os << ", ";
        first = false;
        os << k << " = " << valueToString(f);
      }
      os << "}";
      break;
    }
    case Value::Kind::Variant:
      os << asVariant(v).tag << " " << valueToString(asVariant(v).payload);
      break;
    case Value::Kind::Seq: {
      os << "[";
      bool first = true;
      for (const Value& e : asSeq(v).elems) {
        if (!first) os << ", ";
        first = false;
        os << valueToString(e);
      }
      os << "]";
      break;
    }
  }
  return os.str();
}

namespace {

[[noreturn]] void typeError(OpTag op, const Value& arg) {
  throw EvalError(std::string("intrinsic '") + opName(op) + "' applied to incompatible operand " +
                  valueToString(arg));
}

double numArg(OpTag op, const Value& v) {
  if (!v.isNumeric()) typeError(op, v);
  return v.asReal();
}

Value numBin(OpTag op, const Value& a, const Value& b) {
  bool bothInt = a.kind == Value::Kind::Int && b.kind == Value::Kind::Int;
  double x = numArg(op, a);
  double y = numArg(op, b);
  switch (op) {
    case OpTag::Add: return bothInt ? vInt(a.s.i + b.s.i) : vReal(x + y);
    case OpTag::Sub: return bothInt ? vInt(a.s.i - b.s.i) : vReal(x - y);
    case OpTag::Mul: return bothInt ? vInt(a.s.i * b.s.i) : vReal(x * y);
    case OpTag::Div: return vReal(x / y);
    case OpTag::Min: return bothInt ? vInt(std::min(a.s.i, b.s.i)) : vReal(std::min(x, y));
    case OpTag::Max: return bothInt ? vInt(std::max(a.s.i, b.s.i)) : vReal(std::max(x, y));
    case OpTag::Lt: return vBool(x < y);
    case OpTag::Leq: return vBool(x <= y);
    case OpTag::Gt: return vBool(x > y);
    case OpTag::Geq: return vBool(x >= y);
    default: break;
  }
  typeError(op, a);
}

std::vector<double> seqReals(OpTag op, const Value& v) {
  if (v.kind != Value::Kind::Seq) typeError(op, v);
  std::vector<double> out;
  for (const Value& e : asSeq(v).elems) {
    if (!e.isNumeric()) typeError(op, e);
    out.push_back(e.asReal());
  }
  return out;
}

Value applyFull(OpTag op, const std::vector<Value>& args) {
  switch (op) {
    case OpTag::Not:
      if (args[0].kind != Value::Kind::Bool) typeError(op, args[0]);
      return vBool(!args[0].s.b);
    case OpTag::Neg:
      if (args[0].kind == Value::Kind::Int) return vInt(-args[0].s.i);
      return vReal(-numArg(op, args[0]));
    case OpTag::Abs:
      if (args[0].kind == Value::Kind::Int) return vInt(std::abs(args[0].s.i));
      return vReal(std::fabs(numArg(op, args[0])));
    case OpTag::Exp: return vReal(std::exp(numArg(op, args[0])));
    case OpTag::Log: return vReal(std::log(numArg(op, args[0])));
    case OpTag::Add:
    case OpTag::Sub:
    case OpTag::Mul:
    case OpTag::Div:
    case OpTag::Min:
    case OpTag::Max:
    case OpTag::Lt:
    case OpTag::Leq:
    case OpTag::Gt:
    case OpTag::Geq:
      return numBin(op, args[0], args[1]);
    case OpTag::Eq: return vBool(valueEqual(args[0], args[1]));
    case OpTag::Neq: return vBool(!valueEqual(args[0], args[1]));
    case OpTag::Pdf: {
      if (args[0].kind != Value::Kind::Dist) typeError(op, args[0]);
      double ld = logDensity(asDist(args[0]), args[1]);
      return vReal(std::exp(ld));
    }
    case OpTag::Cons: {
      if (args[1].kind != Value::Kind::Seq) typeError(op, args[1]);
      std::vector<Value> elems;
      const auto& tail = asSeq(args[1]).elems;
      elems.reserve(tail.size() + 1);
      elems.push_back(args[0]);
      elems.insert(elems.end(), tail.begin(), tail.end());
      return vSeq(std::move(elems));
    }
    case OpTag::DistBernoulli: return vDist(makeBernoulli(numArg(op, args[0])));
    case OpTag::DistBeta: return vDist(makeBeta(numArg(op, args[0]), numArg(op, args[1])));
    case OpTag::DistGamma: return vDist(makeGamma(numArg(op, args[0]), numArg(op, args[1])));
    case OpTag::DistExponential: return vDist(makeExponential(numArg(op, args[0])));
    case OpTag::DistPoisson: return vDist(makePoisson(numArg(op, args[0])));
    case OpTag::DistNormal: return vDist(makeNormal(numArg(op, args[0]), numArg(op, args[1])));
    case OpTag::DistUniform: return vDist(makeUniform(numArg(op, args[0]), numArg(op, args[1])));
    case OpTag::DistDirichlet: return vDist(makeDirichlet(seqReals(op, args[0])));
    case OpTag::DistCategorical: return vDist(makeCategorical(seqReals(op, args[0])));
  }
  throw EvalError("unknown intrinsic");
}

}  // namespace

Value deltaApply(const Value& fn, const Value& arg) {
  if (fn.kind != Value::Kind::Op) {
    throw EvalError("cannot apply arity-0 value " + valueToString(fn));
  }
  std::vector<Value> args;
  if (fn.p) args = opArgsOf(fn)->args;
  args.push_back(arg);
  int arity = opArity(fn.op);
  if (static_cast<int>(args.size()) > arity) {
    throw EvalError(std::string("intrinsic '") + opName(fn.op) + "' applied beyond arity");
  }
  if (static_cast<int>(args.size()) == arity) {
    return applyFull(fn.op, args);
  }
  Value v;
  v.kind = Value::Kind::Op;
  v.op = fn.op;
  auto oa = std::make_shared<OpArgs>();
  oa->args = std::move(args);
  v.p = std::move(oa);
  return v;
}

}  // namespace alignppl
