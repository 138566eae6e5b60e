#ifndef ALIGNPPL_VALUE_HPP
#define ALIGNPPL_VALUE_HPP

#include <memory>
#include <string>
#include <vector>

#include "alignppl/anf.hpp"
#include "alignppl/dist.hpp"

namespace alignppl {

struct Value;
struct EnvNode;
using Env = std::shared_ptr<const EnvNode>;

struct OpArgs;
struct ClosureData;
struct RecordData;
struct VariantData;
struct SeqData;

/// Runtime value: intrinsic constant (scalar or partially applied operator),
/// distribution, closure, or structured data. Copying shares payloads.
struct Value {
  enum class Kind : uint8_t { Unit, Bool, Int, Real, Op, Dist, Closure, Record, Variant, Seq };
  Kind kind = Kind::Unit;
  OpTag op = OpTag::Not;
  union {
    bool b;
    int64_t i;
    double r;
  } s = {false};
  std::shared_ptr<const void> p;

  bool isNumeric() const { return kind == Kind::Int || kind == Kind::Real; }
  double asReal() const { return kind == Kind::Int ? static_cast<double>(s.i) : s.r; }
};

struct OpArgs {
  std::vector<Value> args;
};
struct ClosureData {
  NameId param = kNoName;
  const ANFTerm* body = nullptr;
  Env env;
  NameId self = kNoName;  // let rec binder, visible inside body
};
struct RecordData {
  std::vector<std::pair<std::string, Value>> fields;
};
struct VariantData {
  std::string tag;
  Value payload;
};
struct SeqData {
  std::vector<Value> elems;
};

inline Value vUnit() { return Value{}; }
inline Value vBool(bool b) {
  Value v;
  v.kind = Value::Kind::Bool;
  v.s.b = b;
  return v;
}
inline Value vInt(int64_t i) {
  Value v;
  v.kind = Value::Kind::Int;
  v.s.i = i;
  return v;
}
inline Value vReal(double r) {
  Value v;
  v.kind = Value::Kind::Real;
  v.s.r = r;
  return v;
}
inline Value vOp(OpTag op) {
  Value v;
  v.kind = Value::Kind::Op;
  v.op = op;
  return v;
}
Value vFromLit(const ConstLit& c);
Value vDist(Distribution d);
Value vClosure(NameId param, const ANFTerm* body, Env env, NameId self = kNoName);
Value vRecord(std::vector<std::pair<std::string, Value>> fields);
Value vVariant(std::string tag, Value payload);
Value vSeq(std::vector<Value> elems);

inline const Distribution& asDist(const Value& v) {
  return *static_cast<const Distribution*>(v.p.get());
}
inline const ClosureData& asClosure(const Value& v) {
  return *static_cast<const ClosureData*>(v.p.get());
}
inline const RecordData& asRecord(const Value& v) {
  return *static_cast<const RecordData*>(v.p.get());
}
inline const VariantData& asVariant(const Value& v) {
  return *static_cast<const VariantData*>(v.p.get());
}
inline const SeqData& asSeq(const Value& v) { return *static_cast<const SeqData*>(v.p.get()); }
inline const OpArgs* opArgsOf(const Value& v) { return static_cast<const OpArgs*>(v.p.get()); }

/// Remaining arity of an intrinsic value; 0 for scalars/dists, per Def. 2
/// semantics for operators.
int valueArity(const Value& v);

bool valueEqual(const Value& a, const Value& b);
std::string valueToString(const Value& v);

struct EnvNode {
  NameId name;
  Value val;
  Env parent;
};

inline Env envExtend(const Env& e, NameId n, Value v) {
  auto node = std::make_shared<EnvNode>();
  node->name = n;
  node->val = std::move(v);
  node->parent = e;
  return node;
}

inline const Value* envLookup(const Env& e, NameId n) {
  for (const EnvNode* node = e.get(); node != nullptr; node = node->parent.get()) {
    if (node->name == n) return &node->val;
  }
  return nullptr;
}

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One application step of an intrinsic (Def. 2 delta). Decrements arity;
/// full application computes the result. Throws EvalError on arity-0
/// application or operand type mismatch.
Value deltaApply(const Value& fn, const Value& arg);

}  // namespace alignppl

#endif
