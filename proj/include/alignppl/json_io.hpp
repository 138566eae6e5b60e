#ifndef ALIGNPPL_JSON_IO_HPP
#define ALIGNPPL_JSON_IO_HPP

#include <json.hpp>

#include "alignppl/analysis.hpp"
#include "alignppl/inference.hpp"

namespace alignppl {

inline nlohmann::json valueToJson(const Value& v) {
  using nlohmann::json;
  switch (v.kind) {
    case Value::Kind::Unit: return nullptr;
    case Value::Kind::Bool: return v.s.b;
    case Value::Kind::Int: return v.s.i;
    case Value::Kind::Real: return v.s.r;
    case Value::Kind::Seq: {
      json arr = json::array();
      for (const Value& e : asSeq(v).elems) arr.push_back(valueToJson(e));
      return arr;
    }
    case Value::Kind::Record: {
      json obj = json::object();
      for (const auto& [k, f] : asRecord(v).fields) obj[k] = valueToJson(f);
      return obj;
    }
    case Value::Kind::Variant:
      return json{{"tag", asVariant(v).tag}, {"value", valueToJson(asVariant(v).payload)}};
    default:
      return valueToString(v);
  }
}

inline nlohmann::json inferenceOutputToJson(const InferenceOutput& out, bool includeTiming,
                                            size_t maxSamples = SIZE_MAX) {
  nlohmann::json j;
  j["method"] = out.method;
  j["seed"] = out.seed;
  if (out.particles > 0) j["particles"] = out.particles;
  if (out.steps > 0) j["steps"] = out.steps;
  if (!std::isnan(out.logZ)) j["logZ"] = out.logZ;
  if (!std::isnan(out.acceptanceRate)) j["acceptanceRate"] = out.acceptanceRate;
  if (out.generations > 0) j["generations"] = out.generations;
  nlohmann::json samples = nlohmann::json::array();
  size_t count = std::min(maxSamples, out.samples.size());
  for (size_t i = 0; i < count; ++i) {
    samples.push_back(nlohmann::json{{"value", valueToJson(out.samples[i].value)},
                                     {"logWeight", out.samples[i].logWeight}});
  }
  j["samples"] = std::move(samples);
  if (includeTiming) j["wallMs"] = out.wallMs;
  return j;
}

inline nlohmann::json analysisToJson(const AnalysisResult& r) {
  nlohmann::json names = nlohmann::json::object();
  const ANFProgram& prog = *r.prog;
  for (NameId n = 0; n < prog.names.size(); ++n) {
    if (!prog.info[n].letBound && !prog.info[n].param) continue;
    nlohmann::json abs = nlohmann::json::array();
    for (const AbstractValue& a : r.data[n]) abs.push_back(abstractValueToString(a, prog.names));
    names[prog.nameStr(n)] = {{"abstract", std::move(abs)},
                              {"unaligned", r.unalignedRaw[n] != 0}};
  }
  return nlohmann::json{{"names", std::move(names)}};
}

}  // namespace alignppl

#endif
