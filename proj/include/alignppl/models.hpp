#ifndef ALIGNPPL_MODELS_HPP
#define ALIGNPPL_MODELS_HPP

#include <string>
#include <vector>

namespace alignppl {

/// One embedded corpus program with its expected alignment facts and, where
/// available, a reference quantity for the harness.
struct CorpusEntry {
  std::string id;
  std::string source;
  std::vector<std::string> alignedBinders;    // binders that must be aligned
  std::vector<std::string> unalignedBinders;  // binders that must be unaligned
  bool discrete = false;                      // enumerable by the oracle
  size_t oracleMaxTraceLen = 0;
  bool oracleTruncated = false;
  bool hasRefLogZ = false;
  double refLogZ = 0.0;
  double refLogZTol = 0.0;
};

const std::vector<CorpusEntry>& corpus();
const CorpusEntry& corpusEntry(const std::string& id);
bool hasCorpusEntry(const std::string& id);

/// Committed observation sequence of the state-space localization model.
const std::vector<double>& aircraftData();

/// Committed word lists (two-word vocabulary as booleans) of the small topic
/// model, generated once from document-topic proportions (0.95, 0.05, 0.5)
/// and word proportions (0.99, 0.01).
const std::vector<std::vector<bool>>& ldaDocs();

/// Beta(1 + #true, 1 + #false) posterior means per document.
std::vector<double> ldaBetaPosteriorMeans();

}  // namespace alignppl

#endif
