#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dca/dendritic_cell.hpp"
#include "dca/lymph_aggregator.hpp"
#include "dca/signal_model.hpp"

namespace dca::wbc {

// Attribute slots in file order.
enum Attribute : std::size_t {
  kClumpThickness = 0,
  kCellSize = 1,
  kCellShape = 2,
  kMarginalAdhesion = 3,
  kSingleEpithelialSize = 4,
  kBareNuclei = 5,
  kBlandChromatin = 6,
  kNormalNucleoli = 7,
  kMitoses = 8,
};

struct RawRecord {
  Antigen item_id{};          // 1-based row index; the antigen identifier
  std::string source_code;    // sample code from the file (repeats across rows)
  std::array<int, 9> attributes{};  // each in [1, 10] after imputation
  ClassLabel label{};
};

// Reference statistics driving signal derivation: Class1 means of cell size,
// cell shape, bare nuclei, and normal nucleoli, plus the all-items median of
// clump thickness.
struct SignalDerivationStats {
  std::array<double, 4> class1_means{};
  double clump_median{};

  // The published reference values these statistics recompute to.
  static SignalDerivationStats reference() {
    return {{6.59, 6.56, 7.62, 5.88}, 4.0};
  }
};

// One engine event, optionally labeled for evaluation.
struct SignalEvent {
  Antigen id{};
  SignalVectord signals{};
  std::optional<ClassLabel> label{};

  bool operator==(const SignalEvent&) const = default;
};

// Parses the published comma-separated format: sample code, nine attributes
// in [1, 10], class code (4 -> Class1, 2 -> Class2); '?' marks a missing bare
// nuclei value, imputed with the median of the non-missing values. Malformed
// input raises std::runtime_error naming the line.
std::vector<RawRecord> parse_dataset(std::istream& in);
std::vector<RawRecord> parse_dataset(const std::string& path);

// Requires at least one Class1 record. Medians use the mean-of-two-middles
// rule for even counts.
SignalDerivationStats compute_stats(const std::vector<RawRecord>& records);

// danger = mean absolute deviation of the four danger attributes from their
// Class1 means; clump thickness against the median yields safe (above) or
// pamp (below), never both; inflammatory stays 0 (no data source maps to it).
SignalEvent derive_event(const RawRecord& r, const SignalDerivationStats& st);

std::vector<SignalEvent> derive_events(const std::vector<RawRecord>& records,
                                       const SignalDerivationStats& st);

// Generic pre-derived stream, one record per line:
//   antigen_id,pamp,danger,safe,inflammatory[,true_label]
// with antigen_id an unsigned integer and true_label 1 or 2.
std::vector<SignalEvent> parse_signal_stream(std::istream& in);
std::vector<SignalEvent> parse_signal_stream(const std::string& path);
void write_signal_stream(const std::vector<SignalEvent>& events, std::ostream& out);

}  // namespace dca::wbc
