#include "dca/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "dca/numeric_io.hpp"

namespace dca {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

int class_code(ClassLabel l) { return l == ClassLabel::Class1 ? 1 : 2; }

std::vector<wbc::SignalEvent> require_labeled(const std::vector<wbc::SignalEvent>& events,
                                              const char* ordering_name) {
  for (const auto& e : events)
    if (!e.label)
      throw std::invalid_argument(std::string(ordering_name) + " ordering requires labeled events");
  return events;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write report file: " + p.string());
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!(classification_threshold > 0.0 && classification_threshold < 1.0))
    throw std::invalid_argument("ExperimentConfig: classification_threshold must be in (0,1)");
  if (!weights.w.allFinite())
    throw std::invalid_argument("ExperimentConfig: weights must be finite");
  pool.validate();
  dc.validate();
}

std::uint64_t run_seed(std::uint64_t master_seed, std::uint32_t run_index) {
  return splitmix64(master_seed ^ (static_cast<std::uint64_t>(run_index) * 0x9E3779B97F4A7C15ULL));
}

std::vector<wbc::SignalEvent> order_items(const std::vector<wbc::SignalEvent>& events,
                                          Ordering ordering, std::uint64_t seed) {
  switch (ordering) {
    case Ordering::AsGiven:
      return events;

    case Ordering::SeededShuffle: {
      SampleRng rng(seed);
      const auto perm = rng.sample_indices(events.size(), events.size());
      std::vector<wbc::SignalEvent> out;
      out.reserve(events.size());
      for (const auto i : perm) out.push_back(events[i]);
      return out;
    }

    case Ordering::ClassByClass: {
      require_labeled(events, "class-by-class");
      std::vector<wbc::SignalEvent> out;
      out.reserve(events.size());
      for (const auto& e : events)
        if (*e.label == ClassLabel::Class1) out.push_back(e);
      for (const auto& e : events)
        if (*e.label == ClassLabel::Class2) out.push_back(e);
      return out;
    }

    case Ordering::SplitSandwich: {
      require_labeled(events, "split-sandwich");
      std::vector<const wbc::SignalEvent*> c1;
      for (const auto& e : events)
        if (*e.label == ClassLabel::Class1) c1.push_back(&e);
      if (c1.size() < 240)
        throw std::invalid_argument("split-sandwich ordering needs at least 240 Class1 items, got " +
                                    std::to_string(c1.size()));
      std::vector<wbc::SignalEvent> out;
      out.reserve(events.size());
      for (std::size_t i = 0; i < 120; ++i) out.push_back(*c1[i]);
      for (const auto& e : events)
        if (*e.label == ClassLabel::Class2) out.push_back(e);
      for (std::size_t i = 120; i < c1.size(); ++i) out.push_back(*c1[i]);
      return out;
    }
  }
  throw std::logic_error("order_items: unknown ordering");
}

std::vector<RunResult> run_experiment(const ExperimentConfig& cfg,
                                      const std::vector<wbc::SignalEvent>& events) {
  cfg.validate();
  const auto ordered = order_items(events, cfg.ordering, cfg.pool.rng_seed);

  std::vector<RunResult> results;
  results.reserve(cfg.runs);
  for (std::uint32_t r = 1; r <= cfg.runs; ++r) {
    RunResult res;
    res.run_index = r;
    res.seed = run_seed(cfg.pool.rng_seed, r);

    PoolConfig pc = cfg.pool;
    pc.rng_seed = res.seed;
    DcPoold pool(pc, cfg.dc);
    for (const auto& ev : ordered)
      for (const auto& p : pool.dispatch_event(ev.id, ev.signals, cfg.weights, cfg.mode))
        res.ledger.record(p);
    if (cfg.flush_enabled)
      for (const auto& p : pool.flush()) res.ledger.record(p);

    res.items.reserve(ordered.size());
    std::uint32_t pos = 0;
    for (const auto& ev : ordered) {
      ++pos;
      const auto& c = res.ledger.find(ev.id);
      ItemOutcome o;
      o.position = pos;
      o.id = ev.id;
      o.true_class = ev.label;
      o.mature_count = c.mature;
      o.semi_count = c.semi;
      o.fraction = res.ledger.maturity_fraction(ev.id);
      o.predicted = res.ledger.classify(ev.id, cfg.classification_threshold);
      if (ev.label) res.confusion.add(*ev.label, o.predicted);
      res.items.push_back(o);
    }
    results.push_back(std::move(res));
  }
  return results;
}

ConfusionMatrix majority_vote(const std::vector<RunResult>& results) {
  if (results.empty()) throw std::invalid_argument("majority_vote: no runs");
  const auto& first = results.front().items;
  ConfusionMatrix m;
  for (std::size_t i = 0; i < first.size(); ++i) {
    if (!first[i].true_class) continue;
    std::size_t class2_votes = 0;
    for (const auto& r : results)
      if (r.items[i].predicted == ClassLabel::Class2) ++class2_votes;
    const ClassLabel pred =
        2 * class2_votes > results.size() ? ClassLabel::Class2 : ClassLabel::Class1;
    m.add(*first[i].true_class, pred);
  }
  return m;
}

void emit_report(const std::vector<RunResult>& results, const ExperimentConfig& cfg,
                 const std::string& destination) {
  if (results.empty()) throw std::invalid_argument("emit_report: no results");
  const fs::path dest(destination);
  fs::create_directories(dest);

  {
    auto cm = open_out(dest / "confusion_matrices.csv");
    cm << "run,actual_class,predicted_class1,predicted_class2\n";
    for (const auto& r : results) {
      cm << r.run_index << ",1," << r.confusion.counts[0][0] << ',' << r.confusion.counts[0][1]
         << '\n';
      cm << r.run_index << ",2," << r.confusion.counts[1][0] << ',' << r.confusion.counts[1][1]
         << '\n';
    }
    const ConfusionMatrix mv = majority_vote(results);
    cm << "majority,1," << mv.counts[0][0] << ',' << mv.counts[0][1] << '\n';
    cm << "majority,2," << mv.counts[1][0] << ',' << mv.counts[1][1] << '\n';
  }

  for (const auto& r : results) {
    std::ostringstream name;
    name << "items_run_" << std::setfill('0') << std::setw(2) << r.run_index << ".csv";
    auto items = open_out(dest / name.str());
    items << "position,antigen_id,true_class,mature_count,semi_count,fraction,predicted_class\n";
    for (const auto& o : r.items) {
      items << o.position << ',' << o.id << ',' << (o.true_class ? class_code(*o.true_class) : 0)
            << ',' << o.mature_count << ',' << o.semi_count << ',' << format_double(o.fraction)
            << ',' << class_code(o.predicted) << '\n';
    }
  }

  {
    json meta;
    meta["master_seed"] = cfg.pool.rng_seed;
    json runs = json::array();
    for (const auto& r : results) runs.push_back({{"run", r.run_index}, {"seed", r.seed}});
    meta["runs"] = std::move(runs);
    meta["items_per_run"] = results.front().items.size();
    meta["config"] = {
        {"ordering", to_string(cfg.ordering)},
        {"runs", cfg.runs},
        {"classification_threshold", cfg.classification_threshold},
        {"pool_size", cfg.pool.pool_size},
        {"sample_size", cfg.pool.sample_size},
        {"base_migration_threshold", cfg.dc.base_migration_threshold},
        {"fuzz_fraction", cfg.dc.fuzz_fraction},
        {"mode", to_string(cfg.mode)},
        {"flush_enabled", cfg.flush_enabled},
        {"weights",
         {{cfg.weights.w(0, 0), cfg.weights.w(0, 1), cfg.weights.w(0, 2)},
          {cfg.weights.w(1, 0), cfg.weights.w(1, 1), cfg.weights.w(1, 2)},
          {cfg.weights.w(2, 0), cfg.weights.w(2, 1), cfg.weights.w(2, 2)}}},
    };
    auto mf = open_out(dest / "run_metadata.json");
    mf << meta.dump(2) << '\n';
  }
}

bool verify_conservation(const RunResult& result, const std::vector<wbc::SignalEvent>& events,
                         std::size_t sample_size) {
  std::map<Antigen, std::uint64_t> expected;
  for (const auto& ev : events) expected[ev.id] += sample_size;
  if (result.ledger.total_presentations() !=
      static_cast<std::uint64_t>(events.size()) * sample_size)
    return false;
  if (result.ledger.counts().size() != expected.size()) return false;
  for (const auto& [a, c] : result.ledger.counts()) {
    const auto it = expected.find(a);
    if (it == expected.end() || c.mature + c.semi != it->second) return false;
  }
  return true;
}

std::string to_string(Ordering o) {
  switch (o) {
    case Ordering::ClassByClass: return "class-by-class";
    case Ordering::SplitSandwich: return "split-sandwich";
    case Ordering::AsGiven: return "as-given";
    case Ordering::SeededShuffle: return "seeded-shuffle";
  }
  throw std::logic_error("to_string: unknown ordering");
}

std::string to_string(NormalizationMode m) {
  switch (m) {
    case NormalizationMode::PerOutputWeightSum: return "per-output-weight-sum";
    case NormalizationMode::Eq1TimesTwo: return "eq1-times-two";
  }
  throw std::logic_error("to_string: unknown mode");
}

Ordering parse_ordering(const std::string& name) {
  if (name == "class-by-class") return Ordering::ClassByClass;
  if (name == "split-sandwich") return Ordering::SplitSandwich;
  if (name == "as-given") return Ordering::AsGiven;
  if (name == "seeded-shuffle") return Ordering::SeededShuffle;
  throw std::invalid_argument("unknown ordering '" + name + "'");
}

NormalizationMode parse_mode(const std::string& name) {
  if (name == "per-output-weight-sum") return NormalizationMode::PerOutputWeightSum;
  if (name == "eq1-times-two") return NormalizationMode::Eq1TimesTwo;
  throw std::invalid_argument("unknown mode '" + name + "'");
}

}  // namespace dca
