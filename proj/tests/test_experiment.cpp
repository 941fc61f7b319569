#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dca/experiment.hpp"

using namespace dca;
namespace fs = std::filesystem;

namespace {

const std::string kDataset = DCA_DATASET_PATH;

const std::vector<wbc::SignalEvent>& real_events() {
  static const std::vector<wbc::SignalEvent> events = [] {
    const auto records = wbc::parse_dataset(kDataset);
    return wbc::derive_events(records, wbc::compute_stats(records));
  }();
  return events;
}

ExperimentConfig base_config(Ordering ordering, std::uint32_t runs, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.ordering = ordering;
  cfg.runs = runs;
  cfg.pool.rng_seed = seed;
  return cfg;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<wbc::SignalEvent> toy_labeled(std::size_t n1, std::size_t n2) {
  std::vector<wbc::SignalEvent> events;
  Antigen id = 1;
  for (std::size_t i = 0; i < n1; ++i)
    events.push_back({id++, SignalVectord{0, 1, 0, 0}, ClassLabel::Class1});
  for (std::size_t i = 0; i < n2; ++i)
    events.push_back({id++, SignalVectord{0, 0, 1, 0}, ClassLabel::Class2});
  return events;
}

}  // namespace

TEST_CASE("class-by-class ordering: all Class1 first, file order preserved") {
  const auto ordered = order_items(real_events(), Ordering::ClassByClass, 0);
  REQUIRE(ordered.size() == 699);
  for (std::size_t i = 0; i < 241; ++i) REQUIRE(ordered[i].label == ClassLabel::Class1);
  for (std::size_t i = 241; i < 699; ++i) REQUIRE(ordered[i].label == ClassLabel::Class2);
  for (std::size_t i = 1; i < 241; ++i) REQUIRE(ordered[i].id > ordered[i - 1].id);
  for (std::size_t i = 242; i < 699; ++i) REQUIRE(ordered[i].id > ordered[i - 1].id);
}

TEST_CASE("split-sandwich ordering: 120 Class1, all Class2, remaining 121 Class1") {
  const auto ordered = order_items(real_events(), Ordering::SplitSandwich, 0);
  REQUIRE(ordered.size() == 699);
  for (std::size_t i = 0; i < 120; ++i) REQUIRE(ordered[i].label == ClassLabel::Class1);
  for (std::size_t i = 120; i < 578; ++i) REQUIRE(ordered[i].label == ClassLabel::Class2);
  for (std::size_t i = 578; i < 699; ++i) REQUIRE(ordered[i].label == ClassLabel::Class1);

  // The two Class1 stretches are the first 120 and remaining ids in file order.
  const auto cbc = order_items(real_events(), Ordering::ClassByClass, 0);
  for (std::size_t i = 0; i < 120; ++i) REQUIRE(ordered[i].id == cbc[i].id);
  for (std::size_t i = 0; i < 121; ++i) REQUIRE(ordered[578 + i].id == cbc[120 + i].id);
}

TEST_CASE("as-given ordering is the identity") {
  CHECK(order_items(real_events(), Ordering::AsGiven, 5) == real_events());
}

TEST_CASE("seeded shuffle permutes deterministically per seed") {
  const auto a = order_items(real_events(), Ordering::SeededShuffle, 123);
  const auto b = order_items(real_events(), Ordering::SeededShuffle, 123);
  const auto c = order_items(real_events(), Ordering::SeededShuffle, 124);
  CHECK(a == b);
  CHECK(a != c);
  CHECK(a != real_events());

  auto ids = std::vector<Antigen>{};
  for (const auto& e : a) ids.push_back(e.id);
  std::sort(ids.begin(), ids.end());
  for (std::size_t i = 0; i < ids.size(); ++i) REQUIRE(ids[i] == i + 1);
}

TEST_CASE("split-sandwich requires at least 240 Class1 items") {
  CHECK_THROWS_AS(order_items(toy_labeled(239, 460), Ordering::SplitSandwich, 0),
                  std::invalid_argument);
  CHECK_NOTHROW(order_items(toy_labeled(240, 460), Ordering::SplitSandwich, 0));
}

TEST_CASE("label-driven orderings reject unlabeled events") {
  std::vector<wbc::SignalEvent> events{{1, SignalVectord{0, 1, 0, 0}, std::nullopt}};
  CHECK_THROWS_AS(order_items(events, Ordering::ClassByClass, 0), std::invalid_argument);
  CHECK_THROWS_AS(order_items(events, Ordering::SplitSandwich, 0), std::invalid_argument);
  CHECK_NOTHROW(order_items(events, Ordering::AsGiven, 0));
  CHECK_NOTHROW(order_items(events, Ordering::SeededShuffle, 0));
}

TEST_CASE("per-run seeds derive deterministically and differ across runs") {
  CHECK(run_seed(1, 1) == run_seed(1, 1));
  CHECK(run_seed(1, 1) != run_seed(1, 2));
  CHECK(run_seed(1, 1) != run_seed(2, 1));
}

TEST_CASE("zero runs yield an empty result list") {
  CHECK(run_experiment(base_config(Ordering::ClassByClass, 0, 1), real_events()).empty());
}

TEST_CASE("equal configs reproduce byte-identical ledgers") {
  const auto cfg = base_config(Ordering::ClassByClass, 2, 555);
  const auto a = run_experiment(cfg, real_events());
  const auto b = run_experiment(cfg, real_events());
  REQUIRE(a.size() == 2);
  REQUIRE(b.size() == 2);
  CHECK(a[0].seed != a[1].seed);
  for (std::size_t r = 0; r < 2; ++r) {
    CHECK(a[r].ledger == b[r].ledger);
    std::ostringstream sa, sb;
    a[r].ledger.serialize(sa);
    b[r].ledger.serialize(sb);
    CHECK(sa.str() == sb.str());
    CHECK(a[r].confusion == b[r].confusion);
  }
}

TEST_CASE("a flushed run conserves every antigen's ten samplings") {
  const auto results = run_experiment(base_config(Ordering::ClassByClass, 1, 9), real_events());
  REQUIRE(results.size() == 1);
  const auto& r = results[0];
  CHECK(verify_conservation(r, real_events(), 10));
  CHECK(r.ledger.total_presentations() == 6990);  // 699 items x 10 samplings
  for (const auto& [a, c] : r.ledger.counts()) REQUIRE(c.mature + c.semi == 10);

  REQUIRE(r.items.size() == 699);
  CHECK(r.confusion.counts[0][0] + r.confusion.counts[0][1] == 241);
  CHECK(r.confusion.counts[1][0] + r.confusion.counts[1][1] == 458);
  for (std::size_t i = 0; i < r.items.size(); ++i) {
    REQUIRE(r.items[i].position == i + 1);
    REQUIRE(r.items[i].mature_count + r.items[i].semi_count == 10);
  }
}

TEST_CASE("without flush, never-presented antigens surface as a domain error") {
  // A threshold no cell can reach keeps every presentation in the pool.
  auto cfg = base_config(Ordering::AsGiven, 1, 3);
  cfg.pool = PoolConfig{10, 2, 3};
  cfg.dc = DcConfigd{1e6, 0.0};
  std::vector<wbc::SignalEvent> events;
  for (Antigen a = 1; a <= 5; ++a)
    events.push_back({a, SignalVectord{0, 1.8975, 6, 0}, ClassLabel::Class2});

  cfg.flush_enabled = false;
  CHECK_THROWS_AS(run_experiment(cfg, events), std::domain_error);

  cfg.flush_enabled = true;
  const auto results = run_experiment(cfg, events);
  REQUIRE(results.size() == 1);
  CHECK(verify_conservation(results[0], events, 2));
}

TEST_CASE("unlabeled streams classify without a confusion matrix") {
  auto cfg = base_config(Ordering::AsGiven, 1, 3);
  cfg.pool = PoolConfig{10, 2, 3};
  std::vector<wbc::SignalEvent> events;
  for (Antigen a = 1; a <= 20; ++a)
    events.push_back({a, SignalVectord{0, 1.8975, 6, 0}, std::nullopt});
  const auto results = run_experiment(cfg, events);
  REQUIRE(results.size() == 1);
  CHECK(results[0].confusion.counts[0][0] + results[0].confusion.counts[0][1] +
            results[0].confusion.counts[1][0] + results[0].confusion.counts[1][1] ==
        0);
  for (const auto& it : results[0].items) CHECK_FALSE(it.true_class.has_value());
}

TEST_CASE("majority vote breaks exact ties toward Class1") {
  RunResult a, b;
  a.items = {{1, 1, ClassLabel::Class2, 8, 2, 0.8, ClassLabel::Class2}};
  b.items = {{1, 1, ClassLabel::Class2, 2, 8, 0.2, ClassLabel::Class1}};
  const auto mv = majority_vote({a, b});
  CHECK(mv.counts[1][0] == 1);  // actual Class2 predicted Class1
  CHECK(mv.counts[1][1] == 0);

  const auto mv2 = majority_vote({a, a, b});
  CHECK(mv2.counts[1][1] == 1);  // 2-of-3 for Class2
}

TEST_CASE("report files are complete, stable, and round-trip precise") {
  const auto cfg = base_config(Ordering::ClassByClass, 2, 321);
  const auto results = run_experiment(cfg, real_events());

  const auto dir_a = fs::temp_directory_path() / "dca_report_a";
  const auto dir_b = fs::temp_directory_path() / "dca_report_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  emit_report(results, cfg, dir_a.string());
  emit_report(results, cfg, dir_b.string());

  for (const char* name :
       {"confusion_matrices.csv", "items_run_01.csv", "items_run_02.csv", "run_metadata.json"}) {
    CAPTURE(name);
    REQUIRE(fs::exists(dir_a / name));
    CHECK(read_file(dir_a / name) == read_file(dir_b / name));
  }

  std::ifstream items(dir_a / "items_run_01.csv");
  std::string header;
  std::getline(items, header);
  CHECK(header == "position,antigen_id,true_class,mature_count,semi_count,fraction,predicted_class");
  std::string first_row;
  std::getline(items, first_row);
  const auto last_comma = first_row.rfind(',');
  const auto frac_start = first_row.rfind(',', last_comma - 1) + 1;
  const std::string frac_text = first_row.substr(frac_start, last_comma - frac_start);
  CHECK(std::stod(frac_text) == results[0].items[0].fraction);

  const auto meta = nlohmann::json::parse(read_file(dir_a / "run_metadata.json"));
  CHECK(meta["master_seed"] == 321);
  CHECK(meta["runs"].size() == 2);
  CHECK(meta["config"]["ordering"] == "class-by-class");
  CHECK(meta["config"]["pool_size"] == 100);
  CHECK(meta["items_per_run"] == 699);

  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("ordering and mode names round-trip") {
  for (const auto o : {Ordering::ClassByClass, Ordering::SplitSandwich, Ordering::AsGiven,
                       Ordering::SeededShuffle})
    CHECK(parse_ordering(to_string(o)) == o);
  for (const auto m : {NormalizationMode::PerOutputWeightSum, NormalizationMode::Eq1TimesTwo})
    CHECK(parse_mode(to_string(m)) == m);
  CHECK_THROWS_AS(parse_ordering("bogus"), std::invalid_argument);
  CHECK_THROWS_AS(parse_mode("bogus"), std::invalid_argument);
}

TEST_CASE("config validation rejects out-of-range thresholds") {
  auto cfg = base_config(Ordering::ClassByClass, 1, 1);
  cfg.classification_threshold = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.classification_threshold = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.classification_threshold = 0.65;
  CHECK_NOTHROW(cfg.validate());
}
