#include "alignppl/models.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace alignppl {

namespace {

const char* kFig1 = R"PPL(
-- weighted rate estimation with a random number of survival trials per step
let rate = assume (Gamma 2.0 2.0) in
let rec survives = lam n.
  if n == 0 then () else
  let b = assume (Bernoulli 0.9) in
  if b then
    let wSurv = weight 0.5 in
    survives (n - 1)
  else
    let wDie = weight 0.0 in
    ()
in
let rec iter = lam i.
  if i == 0 then () else
  let wObs = weight rate in
  let n = assume (Poisson rate) in
  let u = survives n in
  iter (i - 1)
in
let go = iter 3 in
rate
)PPL";

const char* kGeometric = R"PPL(
let rec geometric = lam u.
  let d = Bernoulli 0.5 in
  let x = assume d in
  if x then
    let w = weight 1.5 in
    1 + geometric ()
  else 1
in
geometric ()
)PPL";

const char* kFig4 = R"PPL(
let n1 = not in
let n2 = not in
let one = 1 in
let half = 0.5 in
let c = true in
let f1 = lam x1. let t1 = weight one in x1 in
let f2 = lam x2. let t2 = weight one in t2 in
let f3 = lam x3. let t3 = weight one in t3 in
let f4 = lam x4. let t4 = weight one in t4 in
let bern = Bernoulli in
let d1 = bern half in
let a1 = assume d1 in
let v1 = f1 one in
let v2 = n1 a1 in
let v3 = n2 c in
let f5 = if a1 then let t5 = f4 one in f2 else f3 in
let v4 = f5 one in
let i1 = if c then let t6 = f1 one in t6 else one in
i1
)PPL";

const char* kFig6a = R"PPL(
let d = Bernoulli 0.5 in
let x = assume d in
let r = if x then
    let w1 = weight 1.0 in
    let w2 = weight 10.0 in
    true
  else
    let w3 = weight 10.0 in
    let w4 = weight 1.0 in
    false
in r
)PPL";

const char* kAircraft = R"PPL(
-- one-dimensional aircraft localization from noisy satellite positions;
-- the altitude is latent and controls velocity and observation noise
let data = [603.57, 860.42, 1012.07, 1163.53, 1540.29, 1818.10, 2045.38, 2363.49, 2590.77, 2801.91] in
let holdingAltitude = 35000.0 in
let altitudeRange = 100.0 in
let positionStDev = 50.0 in
let baseVelocity = 250.0 in
let velocity = lam alt. min 500.0 (max 100.0 (baseVelocity / holdingAltitude * alt)) in
let basePositionObsStDev = 50.0 in
let positionObsStDev = lam alt2. max 10.0 (100.0 - basePositionObsStDev / holdingAltitude * alt2) in
let altitudeStDev = 100.0 in
let position0 = assume (Uniform 0.0 1000.0) in
let altitude0 = assume (Normal holdingAltitude 200.0) in
let rec simulate = lam ds. lam position. lam altitude.
  match ds with d :: rest then
    let sigma = positionObsStDev altitude in
    let wObs = weight (pdf (Normal position sigma) d) in
    let pilot = if abs (altitude - holdingAltitude) > altitudeRange then
        let wPilot = weight 0.5 in ()
      else () in
    let position2 = assume (Normal (position + velocity altitude) positionStDev) in
    let altitude2 = assume (Normal altitude altitudeStDev) in
    simulate rest position2 altitude2
  else position
in
simulate data position0 altitude0
)PPL";

const char* kCrbd6 = R"PPL(
-- constant-rate birth-death likelihood for a committed six-leaf tree over
-- five age units; hidden side lineages must die before the present
let tree = Node {left = Node {left = Leaf {age = 0.0},
                              right = Leaf {age = 0.0},
                              age = 1.0},
                 right = Node {left = Node {left = Leaf {age = 0.0},
                                            right = Leaf {age = 0.0},
                                            age = 0.9},
                               right = Node {left = Leaf {age = 0.0},
                                             right = Leaf {age = 0.0},
                                             age = 2.1},
                               age = 3.4},
                 age = 5.0} in
let lambda = assume (Gamma 1.0 0.5) in
let mu = assume (Gamma 1.0 0.25) in
let rec goesUndetected = lam startTime.
  let t = startTime - assume (Exponential (lambda + mu)) in
  if t < 0.0 then false
  else
    let died = assume (Bernoulli (mu / (lambda + mu))) in
    if died then true
    else
      let left = goesUndetected t in
      if left then goesUndetected t else false
in
let rec simBranch = lam branchTime. lam stopTime.
  let tb = branchTime - assume (Exponential lambda) in
  if tb < stopTime then ()
  else
    let side = goesUndetected tb in
    if side then
      let wHidden = weight 2.0 in
      simBranch tb stopTime
    else
      let wDead = weight 0.0 in
      ()
in
let rec simTree = lam node. lam parentAge.
  match node with Node {left = l, right = r, age = a} then
    let u1 = simBranch parentAge a in
    let wSurv = weight (exp (0.0 - mu * (parentAge - a))) in
    let wSpec = weight lambda in
    let u2 = simTree l a in
    simTree r a
  else
    match node with Leaf {age = a2} then
      let u3 = simBranch parentAge a2 in
      let wSurvLeaf = weight (exp (0.0 - mu * (parentAge - a2))) in
      ()
    else ()
in
let u0 = simTree tree 5.0 in
[lambda, mu]
)PPL";

std::string boolLit(bool b) { return b ? "true" : "false"; }

std::string buildLdaSource() {
  const auto& docs = ldaDocs();
  std::ostringstream os;
  os << "-- two-topic, two-word topic model over a committed dataset\n";
  os << "let phi1 = assume (Beta 1.0 1.0) in\n";
  os << "let phi2 = assume (Beta 1.0 1.0) in\n";
  os << "let docs = [";
  for (size_t d = 0; d < docs.size(); ++d) {
    if (d) os << ", ";
    os << "[";
    for (size_t i = 0; i < docs[d].size(); ++i) {
      if (i) os << ", ";
      os << boolLit(docs[d][i]);
    }
    os << "]";
  }
  os << "] in\n";
  os << "let rec procWords = lam th. lam ws.\n"
        "  match ws with w :: rest then\n"
        "    let z = assume (Bernoulli th) in\n"
        "    let phi = if z then phi1 else phi2 in\n"
        "    let wWord = weight (pdf (Bernoulli phi) w) in\n"
        "    procWords th rest\n"
        "  else ()\n"
        "in\n"
        "let rec procDocs = lam ds.\n"
        "  match ds with doc :: rest then\n"
        "    let theta = assume (Beta 1.0 1.0) in\n"
        "    let u1 = procWords theta doc in\n"
        "    let thetas = procDocs rest in\n"
        "    cons theta thetas\n"
        "  else []\n"
        "in\n"
        "procDocs docs\n";
  return os.str();
}

std::vector<CorpusEntry> buildCorpus() {
  std::vector<CorpusEntry> entries;

  {
    CorpusEntry e;
    e.id = "fig1";
    e.source = kFig1;
    e.alignedBinders = {"rate", "wObs", "n"};
    e.unalignedBinders = {"b", "wSurv", "wDie"};
    entries.push_back(std::move(e));
  }
  {
    CorpusEntry e;
    e.id = "geometric";
    e.source = kGeometric;
    e.alignedBinders = {};
    e.unalignedBinders = {"d", "x", "w"};
    e.discrete = true;
    e.oracleMaxTraceLen = 40;
    e.oracleTruncated = true;
    e.hasRefLogZ = true;
    e.refLogZ = std::log(2.0);  // sum over n>=1 of 0.5^n * 1.5^(n-1)
    e.refLogZTol = 0.02;
    entries.push_back(std::move(e));
  }
  {
    CorpusEntry e;
    e.id = "fig4";
    e.source = kFig4;
    e.alignedBinders = {"a1", "t1", "t6", "v4", "i1"};
    e.unalignedBinders = {"t2", "t3", "t4", "t5"};
    e.discrete = true;
    e.oracleMaxTraceLen = 4;
    entries.push_back(std::move(e));
  }
  {
    CorpusEntry e;
    e.id = "fig6a";
    e.source = kFig6a;
    e.alignedBinders = {"x"};
    e.unalignedBinders = {"w1", "w2", "w3", "w4"};
    e.discrete = true;
    e.oracleMaxTraceLen = 4;
    e.hasRefLogZ = true;
    e.refLogZ = std::log(10.0);
    e.refLogZTol = 1e-9;  // aligned SMC never resamples here
    entries.push_back(std::move(e));
  }
  {
    CorpusEntry e;
    e.id = "aircraft";
    e.source = kAircraft;
    e.alignedBinders = {"position0", "altitude0", "wObs", "position2", "altitude2"};
    e.unalignedBinders = {"wPilot"};
    e.hasRefLogZ = true;
    e.refLogZ = -61.26;
    e.refLogZTol = 1.0;
    entries.push_back(std::move(e));
  }
  {
    CorpusEntry e;
    e.id = "lda";
    e.source = buildLdaSource();
    e.alignedBinders = {"phi1", "phi2", "theta", "z", "wWord"};
    e.unalignedBinders = {};
    entries.push_back(std::move(e));
  }
  {
    CorpusEntry e;
    e.id = "crbd6";
    e.source = kCrbd6;
    e.alignedBinders = {"lambda", "mu", "wSurv", "wSpec", "wSurvLeaf"};
    e.unalignedBinders = {"t", "tb", "died", "wHidden", "wDead", "side"};
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace

const std::vector<CorpusEntry>& corpus() {
  static const std::vector<CorpusEntry> entries = buildCorpus();
  return entries;
}

const CorpusEntry& corpusEntry(const std::string& id) {
  for (const CorpusEntry& e : corpus()) {
    if (e.id == id) return e;
  }
  throw std::out_of_range("no corpus entry named '" + id + "'");
}

bool hasCorpusEntry(const std::string& id) {
  for (const CorpusEntry& e : corpus()) {
    if (e.id == id) return true;
  }
  return false;
}

const std::vector<double>& aircraftData() {
  static const std::vector<double> data = {603.57,  860.42,  1012.07, 1163.53, 1540.29,
                                           1818.10, 2045.38, 2363.49, 2590.77, 2801.91};
  return data;
}

const std::vector<std::vector<bool>>& ldaDocs() {
  // drawn once from the stated proportions with a fixed seed and committed
  static const std::vector<std::vector<bool>> docs = {
      {true, true, false, true, true, true, true, true, true, true},
      {false, false, false, false, false, true, true, false, false, false},
      {false, true, true, false, false, false, false, true, false, true},
  };
  return docs;
}

std::vector<double> ldaBetaPosteriorMeans() {
  std::vector<double> means;
  for (const auto& doc : ldaDocs()) {
    int c = 0;
    for (bool w : doc) c += w ? 1 : 0;
    means.push_back((1.0 + c) / (2.0 + static_cast<double>(doc.size())));
  }
  return means;
}

}  // namespace alignppl
