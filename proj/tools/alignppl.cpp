#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "alignppl/json_io.hpp"
#include "alignppl/models.hpp"
#include "alignppl/oracle.hpp"
#include "alignppl/parser.hpp"

using namespace alignppl;
using nlohmann::json;

namespace {

constexpr uint64_t kDefaultSeed = 42;

uint64_t defaultSeed() {
  if (const char* env = std::getenv("ALIGNPPL_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return kDefaultSeed;
}

struct ModelArgs {
  std::string model;
  std::string file;
};

void addModelArgs(CLI::App* cmd, ModelArgs& args) {
  auto* m = cmd->add_option("--model", args.model, "corpus model id");
  auto* f = cmd->add_option("--file", args.file, "path to a .appl source file");
  m->excludes(f);
  f->excludes(m);
}

std::string loadSource(const ModelArgs& args) {
  if (!args.model.empty()) return corpusEntry(args.model).source;
  if (!args.file.empty()) {
    std::ifstream in(args.file);
    if (!in) throw std::runtime_error("cannot open '" + args.file + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  throw CLI::ValidationError("one of --model or --file is required");
}

void emit(const std::string& text, const std::string& outPath) {
  if (outPath.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream out(outPath);
    out << text << "\n";
  }
}

std::string samplesCsv(const InferenceOutput& out) {
  std::ostringstream os;
  os.precision(17);
  os << "value,logWeight\n";
  for (const auto& s : out.samples) {
    std::string v = valueToJson(s.value).dump();
    for (char& ch : v) {
      if (ch == ',') ch = ';';
    }
    os << v << "," << s.logWeight << "\n";
  }
  return os.str();
}

// per-column histogram over scalar or sequence-of-scalar samples
json histogramJson(const std::vector<WeightedSample>& samples, int bins) {
  std::vector<std::vector<double>> cols;
  for (const auto& s : samples) {
    std::vector<double> row;
    if (s.value.isNumeric()) {
      row.push_back(s.value.asReal());
    } else if (s.value.kind == Value::Kind::Seq) {
      for (const Value& e : asSeq(s.value).elems) {
        if (e.isNumeric()) row.push_back(e.asReal());
      }
    }
    if (row.empty()) continue;
    cols.resize(std::max(cols.size(), row.size()));
    for (size_t i = 0; i < row.size(); ++i) cols[i].push_back(row[i]);
  }
  json out = json::array();
  for (const auto& col : cols) {
    if (col.empty()) continue;
    double lo = col[0], hi = col[0];
    for (double x : col) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    if (hi <= lo) hi = lo + 1.0;
    std::vector<uint64_t> counts(static_cast<size_t>(bins), 0);
    for (double x : col) {
      auto b = static_cast<size_t>((x - lo) / (hi - lo) * bins);
      if (b >= counts.size()) b = counts.size() - 1;
      counts[b]++;
    }
    out.push_back(json{{"lo", lo}, {"hi", hi}, {"counts", counts}});
  }
  return out;
}

struct CommonOut {
  std::string outPath;
  std::string format = "json";
  int histBins = 0;
  bool stable = false;
  size_t maxSamples = SIZE_MAX;
};

void addCommonOut(CLI::App* cmd, CommonOut& o) {
  cmd->add_option("--out", o.outPath, "write output to this path instead of stdout");
  cmd->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--hist", o.histBins, "emit histograms with this many bins");
  cmd->add_flag("--stable", o.stable, "omit timing fields for byte-stable output");
  cmd->add_option("--max-samples", o.maxSamples, "cap the number of samples emitted");
}

void emitInference(const InferenceOutput& out, const CommonOut& o) {
  if (o.format == "csv") {
    emit(samplesCsv(out), o.outPath);
    return;
  }
  json j = inferenceOutputToJson(out, !o.stable, o.maxSamples);
  if (o.histBins > 0) j["histogram"] = histogramJson(out.samples, o.histBins);
  emit(j.dump(2), o.outPath);
}

double meanOf(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

double stddevOf(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double m = meanOf(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"alignppl: alignment analysis and aligned inference for a small PPL"};
  app.require_subcommand(1);

  // analyze
  auto* analyzeCmd = app.add_subcommand("analyze", "run the alignment analysis");
  ModelArgs analyzeModel;
  addModelArgs(analyzeCmd, analyzeModel);
  bool analyzeJson = false, dumpConstraints = false;
  std::string analyzeOut;
  analyzeCmd->add_flag("--json", analyzeJson, "emit JSON instead of a table");
  analyzeCmd->add_flag("--dump-constraints", dumpConstraints, "print generated constraints");
  analyzeCmd->add_option("--out", analyzeOut, "write output to this path");

  // smc
  auto* smcCmd = app.add_subcommand("smc", "sequential Monte Carlo inference");
  ModelArgs smcModel;
  addModelArgs(smcCmd, smcModel);
  SmcConfig smcCfg;
  smcCfg.seed = defaultSeed();
  bool smcAligned = false, smcUnaligned = false;
  smcCmd->add_option("-n,--particles", smcCfg.particles, "number of particles");
  smcCmd->add_option("--seed", smcCfg.seed, "rng seed");
  smcCmd->add_option("--threads", smcCfg.threads, "particle parallelism");
  auto* fa = smcCmd->add_flag("--aligned", smcAligned, "resample only at aligned weights");
  auto* fu = smcCmd->add_flag("--unaligned", smcUnaligned, "resample at every weight");
  fa->excludes(fu);
  fu->excludes(fa);
  CommonOut smcOut;
  addCommonOut(smcCmd, smcOut);

  // mcmc
  auto* mcmcCmd = app.add_subcommand("mcmc", "lightweight Metropolis-Hastings inference");
  ModelArgs mcmcModel;
  addModelArgs(mcmcCmd, mcmcModel);
  McmcConfig mcmcCfg;
  mcmcCfg.seed = defaultSeed();
  bool mcmcAligned = false, mcmcStandard = false;
  mcmcCmd->add_option("--steps", mcmcCfg.steps, "number of MCMC steps");
  mcmcCmd->add_option("--seed", mcmcCfg.seed, "rng seed");
  mcmcCmd->add_option("--g", mcmcCfg.g, "global step probability");
  mcmcCmd->add_option("--burn", mcmcCfg.burn, "burned fraction of samples");
  auto* ma = mcmcCmd->add_flag("--aligned", mcmcAligned, "aligned lightweight MCMC");
  auto* ms = mcmcCmd->add_flag("--standard", mcmcStandard, "stack-trace lightweight MCMC");
  ma->excludes(ms);
  ms->excludes(ma);
  CommonOut mcmcOut;
  addCommonOut(mcmcCmd, mcmcOut);

  // check-align
  auto* checkCmd = app.add_subcommand("check-align", "empirical alignment soundness check");
  ModelArgs checkModel;
  addModelArgs(checkCmd, checkModel);
  size_t checkRuns = 1000;
  uint64_t checkSeed = defaultSeed();
  std::string checkOut;
  checkCmd->add_option("--runs", checkRuns, "number of sampled executions");
  checkCmd->add_option("--seed", checkSeed, "rng seed");
  checkCmd->add_option("--out", checkOut, "write output to this path");

  // oracle
  auto* oracleCmd = app.add_subcommand("oracle", "exact enumeration for discrete programs");
  ModelArgs oracleModel;
  addModelArgs(oracleCmd, oracleModel);
  size_t oracleMaxLen = 32;
  bool oracleTruncate = false;
  std::string oracleOut;
  oracleCmd->add_option("--max-trace-len", oracleMaxLen, "enumeration depth bound");
  oracleCmd->add_flag("--truncate", oracleTruncate, "report tail mass instead of failing");
  oracleCmd->add_option("--out", oracleOut, "write output to this path");

  // bench
  auto* benchCmd = app.add_subcommand("bench", "repeated timed runs with estimate spread");
  ModelArgs benchModel;
  addModelArgs(benchCmd, benchModel);
  std::vector<std::string> benchMethods;
  int benchReps = 10, benchWarmups = 1;
  uint32_t benchParticles = 10000, benchSteps = 10000;
  double benchG = 0.1, benchBurn = 0.1;
  uint64_t benchSeed = defaultSeed();
  std::string benchOut, benchCsv;
  benchCmd->add_option("--methods", benchMethods,
                       "any of smc-aligned smc-unaligned mcmc-aligned mcmc-lightweight")
      ->required();
  benchCmd->add_option("-R,--reps", benchReps, "repetitions per method");
  benchCmd->add_option("--warmups", benchWarmups, "untimed warmup runs");
  benchCmd->add_option("-n,--particles", benchParticles, "SMC particles");
  benchCmd->add_option("--steps", benchSteps, "MCMC steps");
  benchCmd->add_option("--g", benchG, "MCMC global step probability");
  benchCmd->add_option("--burn", benchBurn, "MCMC burn fraction");
  benchCmd->add_option("--seed", benchSeed, "base rng seed");
  benchCmd->add_option("--out", benchOut, "write JSON report to this path");
  benchCmd->add_option("--csv", benchCsv, "write a plot-ready CSV to this path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyzeCmd) {
      ANFProgramPtr prog = compileProgram(loadSource(analyzeModel));
      AnalysisResult res = analyzeAlign(prog);
      std::ostringstream os;
      if (dumpConstraints) {
        for (const Constraint& c : generateConstraints(*prog)) {
          os << constraintToString(c, prog->names) << "\n";
        }
        os << "\n";
      }
      if (analyzeJson) {
        os << analysisToJson(res).dump(2);
      } else {
        os << "name                 unaligned  abstract\n";
        for (NameId n = 0; n < prog->names.size(); ++n) {
          if (!prog->info[n].letBound && !prog->info[n].param) continue;
          std::string abs;
          for (const AbstractValue& a : res.data[n]) {
            if (!abs.empty()) abs += ", ";
            abs += abstractValueToString(a, prog->names);
          }
          std::string name = prog->nameStr(n);
          name.resize(std::max<size_t>(20, name.size()), ' ');
          os << name << " " << (res.unalignedRaw[n] ? "yes" : "no ") << "        {" << abs << "}\n";
        }
      }
      emit(os.str(), analyzeOut);
      return 0;
    }

    if (*smcCmd) {
      if (!smcAligned && !smcUnaligned) {
        throw CLI::ValidationError("one of --aligned or --unaligned is required");
      }
      ANFProgramPtr prog = compileProgram(loadSource(smcModel));
      smcCfg.aligned = smcAligned;
      InferenceOutput out;
      if (smcAligned) {
        AnalysisResult res = analyzeAlign(prog);
        out = runAlignedSMC(prog, res, smcCfg);
      } else {
        out = runUnalignedSMC(prog, smcCfg);
      }
      emitInference(out, smcOut);
      return 0;
    }

    if (*mcmcCmd) {
      if (!mcmcAligned && !mcmcStandard) {
        throw CLI::ValidationError("one of --aligned or --standard is required");
      }
      ANFProgramPtr prog = compileProgram(loadSource(mcmcModel));
      mcmcCfg.aligned = mcmcAligned;
      InferenceOutput out;
      if (mcmcAligned) {
        AnalysisResult res = analyzeAlign(prog);
        out = runAlignedLightweightMCMC(prog, res, mcmcCfg);
      } else {
        out = runLightweightMCMC(prog, mcmcCfg);
      }
      emitInference(out, mcmcOut);
      return 0;
    }

    if (*checkCmd) {
      std::string id = checkModel.model.empty() ? checkModel.file : checkModel.model;
      ANFProgramPtr prog = compileProgram(loadSource(checkModel));
      AnalysisResult res = analyzeAlign(prog);
      std::set<NameId> aligned(res.alignedSet.begin(), res.alignedSet.end());
      AlignmentReport report = checkAlignmentEmpirically(prog, aligned, checkRuns, checkSeed, id);
      json j;
      j["model"] = id;
      j["runs"] = report.runs;
      j["verdict"] = report.consistent ? "consistent" : "violation";
      if (!report.consistent) {
        j["seed"] = report.seed;
        j["runA"] = report.runA;
        j["runB"] = report.runB;
        auto toStrings = [&](const std::vector<NameId>& v) {
          json arr = json::array();
          for (NameId n : v) arr.push_back(prog->nameStr(n));
          return arr;
        };
        j["restrictionA"] = toStrings(report.restrictionA);
        j["restrictionB"] = toStrings(report.restrictionB);
      }
      emit(j.dump(2), checkOut);
      return report.consistent ? 0 : 3;
    }

    if (*oracleCmd) {
      ANFProgramPtr prog = compileProgram(loadSource(oracleModel));
      ExactPosterior post = enumeratePosterior(prog, oracleMaxLen, oracleTruncate);
      json support = json::array();
      for (const auto& [k, p] : post.probs) {
        support.push_back(json{{"value", k}, {"prob", p}});
      }
      json j;
      j["support"] = std::move(support);
      j["logZ"] = post.logZ;
      j["paths"] = post.pathCount;
      j["truncatedMass"] = post.truncatedPriorMass;
      emit(j.dump(2), oracleOut);
      return 0;
    }

    if (*benchCmd) {
      ANFProgramPtr prog = compileProgram(loadSource(benchModel));
      AnalysisResult res = analyzeAlign(prog);
      json rows = json::array();
      std::ostringstream csv;
      csv << "method,rep,wallMs,estimate\n";
      csv.precision(17);
      for (const std::string& method : benchMethods) {
        auto runOnce = [&](uint64_t seed) -> InferenceOutput {
          if (method == "smc-aligned") {
            SmcConfig c{benchParticles, seed, true, 1};
            return runAlignedSMC(prog, res, c);
          }
          if (method == "smc-unaligned") {
            SmcConfig c{benchParticles, seed, false, 1};
            return runUnalignedSMC(prog, c);
          }
          McmcConfig c{benchSteps, benchG, seed, benchBurn, method == "mcmc-aligned"};
          if (method == "mcmc-aligned") return runAlignedLightweightMCMC(prog, res, c);
          if (method == "mcmc-lightweight") return runLightweightMCMC(prog, c);
          throw std::runtime_error("unknown method '" + method + "'");
        };
        for (int w = 0; w < benchWarmups; ++w) runOnce(benchSeed + 1000 + w);
        std::vector<double> times, estimates;
        for (int r = 0; r < benchReps; ++r) {
          InferenceOutput out = runOnce(benchSeed + r);
          times.push_back(out.wallMs);
          double est;
          if (!std::isnan(out.logZ)) {
            est = out.logZ;
          } else {
            // posterior mean of the first numeric component
            std::vector<double> vals;
            for (const auto& s : out.samples) {
              if (s.value.isNumeric()) {
                vals.push_back(s.value.asReal());
              } else if (s.value.kind == Value::Kind::Seq && !asSeq(s.value).elems.empty() &&
                         asSeq(s.value).elems[0].isNumeric()) {
                vals.push_back(asSeq(s.value).elems[0].asReal());
              }
            }
            est = meanOf(vals);
          }
          estimates.push_back(est);
          csv << method << "," << r << "," << out.wallMs << "," << est << "\n";
        }
        std::sort(estimates.begin(), estimates.end());
        auto quantile = [&](double q) {
          if (estimates.empty()) return 0.0;
          size_t i = static_cast<size_t>(q * static_cast<double>(estimates.size() - 1));
          return estimates[i];
        };
        rows.push_back(json{{"method", method},
                            {"reps", benchReps},
                            {"meanMs", meanOf(times)},
                            {"stddevMs", stddevOf(times)},
                            {"estimateMean", meanOf(estimates)},
                            {"estimateStddev", stddevOf(estimates)},
                            {"estimateQuantiles",
                             json{{"q0", quantile(0.0)},
                                  {"q25", quantile(0.25)},
                                  {"q50", quantile(0.5)},
                                  {"q75", quantile(0.75)},
                                  {"q100", quantile(1.0)}}}});
      }
      if (!benchCsv.empty()) {
        std::ofstream f(benchCsv);
        f << csv.str();
      }
      emit(json{{"rows", rows}}.dump(2), benchOut);
      return 0;
    }
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 3;
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
