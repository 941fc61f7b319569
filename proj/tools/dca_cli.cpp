#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dca/experiment.hpp"
#include "dca/numeric_io.hpp"
#include "dca/wbc_adapter.hpp"

namespace {

struct RunOptions {
  std::string data_path;
  std::string stream_path;
  std::string out_dir;
  std::string ordering{"class-by-class"};
  std::string mode{"per-output-weight-sum"};
  std::uint32_t runs{20};
  std::uint64_t seed{1};
  std::size_t pool_size{100};
  std::size_t sample_size{10};
  double migration_threshold{10.0};
  double fuzz{0.1};
  double classification_threshold{0.65};
  bool no_flush{false};
  std::vector<double> weights;  // empty = defaults, else 9 row-major values
};

// Dataset row 269: the built-in reference item whose derived signals and
// cytokine outputs have known expected values.
dca::wbc::RawRecord reference_item() {
  dca::wbc::RawRecord r;
  r.item_id = 269;
  r.source_code = "324427";
  r.attributes = {10, 8, 8, 2, 3, 4, 8, 7, 8};
  r.label = dca::ClassLabel::Class1;
  return r;
}

void print_cytokines(const char* tag, const dca::CytokineOutputd& c) {
  std::cout << "  " << tag << ": csm=" << dca::format_double(c.csm)
            << " semi=" << dca::format_double(c.semi) << " mat=" << dca::format_double(c.mat)
            << '\n';
}

int cmd_worked_example() {
  using namespace dca;
  const auto rec = reference_item();
  const auto st = wbc::SignalDerivationStats::reference();
  const auto ev = wbc::derive_event(rec, st);
  const auto w = WeightMatrixd::defaults();
  const auto out = process_signals(ev.signals, w, NormalizationMode::PerOutputWeightSum);
  const auto out2 = process_signals(ev.signals, w, NormalizationMode::Eq1TimesTwo);

  std::cout << "reference item (dataset row " << rec.item_id << ", sample code "
            << rec.source_code << ")\n";
  std::cout << "  attributes: clump=" << rec.attributes[wbc::kClumpThickness]
            << " cell_size=" << rec.attributes[wbc::kCellSize]
            << " cell_shape=" << rec.attributes[wbc::kCellShape]
            << " bare_nuclei=" << rec.attributes[wbc::kBareNuclei]
            << " normal_nucleoli=" << rec.attributes[wbc::kNormalNucleoli] << '\n';
  std::cout << "  reference stats: class1 means = {" << st.class1_means[0] << ", "
            << st.class1_means[1] << ", " << st.class1_means[2] << ", " << st.class1_means[3]
            << "}, clump median = " << st.clump_median << '\n';
  std::cout << "  derived signals: pamp=" << format_double(ev.signals.pamp)
            << " danger=" << format_double(ev.signals.danger)
            << " safe=" << format_double(ev.signals.safe)
            << " inflammatory=" << format_double(ev.signals.inflammatory) << '\n';
  print_cytokines("outputs (per-output-weight-sum)", out);
  print_cytokines("outputs (eq1-times-two)        ", out2);

  const double expected[3] = {2.7795, 6.0, -16.1025};
  const double got[3] = {out.csm, out.semi, out.mat};
  bool ok = true;
  for (int i = 0; i < 3; ++i) ok = ok && std::fabs(got[i] - expected[i]) < 1e-9;
  std::cout << "  expected (per-output-weight-sum): csm=2.7795 semi=6 mat=-16.1025 -> "
            << (ok ? "OK" : "MISMATCH") << '\n';
  return ok ? 0 : 1;
}

int cmd_derive(const std::string& data_path, const std::string& out_path) {
  using namespace dca;
  const auto records = wbc::parse_dataset(data_path);
  const auto st = wbc::compute_stats(records);
  const auto events = wbc::derive_events(records, st);

  std::cerr << "parsed " << records.size() << " records; class1 means = {"
            << format_double(st.class1_means[0]) << ", " << format_double(st.class1_means[1])
            << ", " << format_double(st.class1_means[2]) << ", "
            << format_double(st.class1_means[3]) << "}, clump median = "
            << format_double(st.clump_median) << '\n';

  if (out_path.empty()) {
    wbc::write_signal_stream(events, std::cout);
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    wbc::write_signal_stream(events, out);
    std::cerr << "signal stream written to " << out_path << '\n';
  }
  return 0;
}

int cmd_run(const RunOptions& o) {
  using namespace dca;
  std::vector<wbc::SignalEvent> events;
  if (!o.data_path.empty()) {
    const auto records = wbc::parse_dataset(o.data_path);
    events = wbc::derive_events(records, wbc::compute_stats(records));
  } else {
    events = wbc::parse_signal_stream(o.stream_path);
  }

  ExperimentConfig cfg;
  cfg.ordering = parse_ordering(o.ordering);
  cfg.runs = o.runs;
  cfg.classification_threshold = o.classification_threshold;
  cfg.pool = PoolConfig{o.pool_size, o.sample_size, o.seed};
  cfg.dc = DcConfigd{o.migration_threshold, o.fuzz};
  cfg.mode = parse_mode(o.mode);
  cfg.flush_enabled = !o.no_flush;
  if (!o.weights.empty()) {
    cfg.weights.w << o.weights[0], o.weights[1], o.weights[2], o.weights[3], o.weights[4],
        o.weights[5], o.weights[6], o.weights[7], o.weights[8];
  }

  const auto results = run_experiment(cfg, events);

  bool labeled = !events.empty();
  for (const auto& e : events) labeled = labeled && e.label.has_value();

  double total_errors = 0;
  for (const auto& r : results) {
    std::cout << "run " << std::setw(2) << r.run_index << " (seed " << r.seed << "): ";
    if (labeled) {
      std::cout << "errors=" << r.confusion.total_errors()
                << " (class1 " << r.confusion.errors_for(ClassLabel::Class1) << ", class2 "
                << r.confusion.errors_for(ClassLabel::Class2) << ")\n";
      total_errors += static_cast<double>(r.confusion.total_errors());
    } else {
      std::uint64_t c1 = 0, c2 = 0;
      for (const auto& it : r.items) (it.predicted == ClassLabel::Class1 ? c1 : c2)++;
      std::cout << "classified class1=" << c1 << " class2=" << c2 << '\n';
    }
  }

  if (labeled && !results.empty()) {
    std::cout << "mean errors over " << results.size() << " runs: "
              << format_double(total_errors / static_cast<double>(results.size())) << '\n';
    const auto mv = majority_vote(results);
    std::cout << "majority vote: actual1 -> (" << mv.counts[0][0] << ", " << mv.counts[0][1]
              << "), actual2 -> (" << mv.counts[1][0] << ", " << mv.counts[1][1] << ")\n";
  }

  if (cfg.flush_enabled) {
    for (const auto& r : results) {
      if (!verify_conservation(r, events, cfg.pool.sample_size)) {
        std::cerr << "conservation violated in run " << r.run_index << '\n';
        return 1;
      }
    }
  }

  if (!o.out_dir.empty()) {
    emit_report(results, cfg, o.out_dir);
    std::cout << "report written to " << o.out_dir << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dendritic-cell anomaly detection engine"};
  app.require_subcommand(1);
  app.fallthrough();  // lets `run --config ...` reach the app-level option
  app.set_config("--config", "",
                 "Key=value config file with a [run] section; command-line flags take precedence");

  RunOptions o;
  auto* run = app.add_subcommand("run", "Run seeded experiments over a dataset or signal stream");
  auto* data_opt =
      run->add_option("--data", o.data_path, "Raw dataset file (comma-separated, published format)")
          ->check(CLI::ExistingFile);
  auto* stream_opt =
      run->add_option("--stream", o.stream_path,
                      "Pre-derived signal stream file (antigen_id,pamp,danger,safe,"
                      "inflammatory[,true_label])")
          ->check(CLI::ExistingFile);
  data_opt->excludes(stream_opt);
  stream_opt->excludes(data_opt);
  run->add_option("--out", o.out_dir, "Directory for report files");
  run->add_option("--ordering", o.ordering, "Item ordering")
      ->check(CLI::IsMember({"class-by-class", "split-sandwich", "as-given", "seeded-shuffle"}))
      ->capture_default_str();
  run->add_option("--runs", o.runs, "Number of seeded runs")->capture_default_str();
  run->add_option("--seed", o.seed, "Master seed; per-run seeds derive from it")
      ->capture_default_str();
  run->add_option("--pool-size", o.pool_size, "Cells in the pool")->capture_default_str();
  run->add_option("--sample-size", o.sample_size, "Cells sampling each event")
      ->capture_default_str();
  run->add_option("--migration-threshold", o.migration_threshold, "Base migration threshold")
      ->capture_default_str();
  run->add_option("--fuzz", o.fuzz, "Relative half-width of the threshold fuzz band")
      ->capture_default_str();
  run->add_option("--classification-threshold", o.classification_threshold,
                  "Maturity fraction above which an item is Class2")
      ->capture_default_str();
  run->add_option("--mode", o.mode, "Cytokine normalization mode")
      ->check(CLI::IsMember({"per-output-weight-sum", "eq1-times-two"}))
      ->capture_default_str();
  run->add_flag("--no-flush", o.no_flush, "Discard unmigrated cells at end of stream");
  run->add_option("--weights", o.weights,
                  "Nine weights, row-major (csm, semi, mat) x (pamp, danger, safe)")
      ->expected(9);

  std::string derive_data, derive_out;
  auto* derive = app.add_subcommand("derive", "Derive the signal stream from a raw dataset");
  derive->add_option("--data", derive_data, "Raw dataset file")
      ->required()
      ->check(CLI::ExistingFile);
  derive->add_option("--out", derive_out, "Output file (default: stdout)");

  auto* worked =
      app.add_subcommand("worked-example", "Print the built-in reference computation and verify it");

  CLI11_PARSE(app, argc, argv);

  try {
    if (worked->parsed()) return cmd_worked_example();
    if (derive->parsed()) return cmd_derive(derive_data, derive_out);
    if (run->parsed()) {
      if (o.data_path.empty() && o.stream_path.empty())
        throw CLI::ValidationError("run", "one of --data or --stream is required");
      return cmd_run(o);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
