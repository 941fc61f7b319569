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
#include "dca/tissue_pool.hpp"
#include "dca/wbc_adapter.hpp"

namespace dca {

// ClassByClass: all Class1 then all Class2, file order preserved.
// SplitSandwich: first 120 Class1, all Class2, remaining Class1.
// AsGiven: identity. SeededShuffle: deterministic permutation from a seed.
enum class Ordering { ClassByClass, SplitSandwich, AsGiven, SeededShuffle };

struct ExperimentConfig {
  Ordering ordering{Ordering::ClassByClass};
  std::uint32_t runs{20};
  double classification_threshold{0.65};
  PoolConfig pool{};
  DcConfigd dc{};
  WeightMatrixd weights{WeightMatrixd::defaults()};
  NormalizationMode mode{NormalizationMode::PerOutputWeightSum};
  bool flush_enabled{true};

  void validate() const;
};

// Rows are actual classes, columns predicted; indices 0 = Class1, 1 = Class2.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, 2>, 2> counts{};

  void add(ClassLabel actual, ClassLabel predicted) {
    ++counts[actual == ClassLabel::Class1 ? 0 : 1][predicted == ClassLabel::Class1 ? 0 : 1];
  }
  std::uint64_t errors_for(ClassLabel actual) const {
    return actual == ClassLabel::Class1 ? counts[0][1] : counts[1][0];
  }
  std::uint64_t total_errors() const { return counts[0][1] + counts[1][0]; }

  bool operator==(const ConfusionMatrix&) const = default;
};

struct ItemOutcome {
  std::uint32_t position{};  // 1-based position in the dispatched order
  Antigen id{};
  std::optional<ClassLabel> true_class{};
  std::uint64_t mature_count{};
  std::uint64_t semi_count{};
  double fraction{};
  ClassLabel predicted{};
};

struct RunResult {
  std::uint32_t run_index{};  // 1-based
  std::uint64_t seed{};
  PresentationLedger ledger;
  ConfusionMatrix confusion;
  std::vector<ItemOutcome> items;  // stream order
};

// Per-run seed: splitmix64(master ^ (run_index * golden ratio)).
std::uint64_t run_seed(std::uint64_t master_seed, std::uint32_t run_index);

// SeededShuffle permutes with the given seed; the other orderings ignore it.
// ClassByClass and SplitSandwich require labeled events; SplitSandwich also
// requires at least 240 Class1 items.
std::vector<wbc::SignalEvent> order_items(const std::vector<wbc::SignalEvent>& events,
                                          Ordering ordering, std::uint64_t seed);

// Runs cfg.runs seeded simulations over the ordered stream: dispatch every
// item once, flush if enabled, classify at the configured threshold, and
// score labeled items into the confusion matrix.
std::vector<RunResult> run_experiment(const ExperimentConfig& cfg,
                                      const std::vector<wbc::SignalEvent>& events);

// Majority-vote matrix across runs; per-item ties go to Class1.
ConfusionMatrix majority_vote(const std::vector<RunResult>& results);

// Writes into `destination` (created if needed): confusion_matrices.csv with
// per-run and majority-vote rows, items_run_NN.csv per run with columns
// position, antigen_id, true_class, mature_count, semi_count, fraction,
// predicted_class (true_class 0 when unlabeled), and run_metadata.json with
// the seeds and a config echo. Numbers are printed with round-trip precision.
void emit_report(const std::vector<RunResult>& results, const ExperimentConfig& cfg,
                 const std::string& destination);

// Exact presentation-count conservation: with flush enabled, every event's
// antigen collects exactly sample_size context counts.
bool verify_conservation(const RunResult& result, const std::vector<wbc::SignalEvent>& events,
                         std::size_t sample_size);

// Spelled names used in config files and the metadata document.
std::string to_string(Ordering o);
std::string to_string(NormalizationMode m);
Ordering parse_ordering(const std::string& name);
NormalizationMode parse_mode(const std::string& name);

}  // namespace dca
