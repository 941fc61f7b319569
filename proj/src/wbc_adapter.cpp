#include "dca/wbc_adapter.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "dca/numeric_io.hpp"

namespace dca::wbc {
namespace {

constexpr std::array<std::size_t, 4> kDangerAttrs{kCellSize, kCellShape, kBareNuclei,
                                                  kNormalNucleoli};

std::string trim(std::string_view sv) {
  const auto from = sv.find_first_not_of(" \t\r");
  if (from == std::string_view::npos) return {};
  const auto to = sv.find_last_not_of(" \t\r");
  return std::string(sv.substr(from, to - from + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(trim(std::string_view(line).substr(start)));
      return fields;
    }
    fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
    start = comma + 1;
  }
}

[[noreturn]] void fail(std::size_t line_no, const std::string& msg) {
  throw std::runtime_error("line " + std::to_string(line_no) + ": " + msg);
}

int parse_attribute(const std::string& tok, std::size_t line_no) {
  int v{};
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    fail(line_no, "bad attribute value '" + tok + "'");
  if (v < 1 || v > 10) fail(line_no, "attribute out of [1,10]: '" + tok + "'");
  return v;
}

double parse_real(const std::string& tok, std::size_t line_no, const char* what) {
  double v{};
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(v) || v < 0)
    fail(line_no, std::string("bad ") + what + " '" + tok + "'");
  return v;
}

// Mean-of-two-middles for even counts.
double median(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace

std::vector<RawRecord> parse_dataset(std::istream& in) {
  std::vector<RawRecord> records;
  std::vector<std::size_t> missing;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 11)
      fail(line_no, "expected 11 comma-separated fields, got " + std::to_string(fields.size()));

    RawRecord r;
    r.item_id = records.size() + 1;
    r.source_code = fields[0];
    for (std::size_t i = 0; i < 9; ++i) {
      if (fields[i + 1] == "?") {
        if (i != kBareNuclei) fail(line_no, "'?' is only legal for the bare nuclei attribute");
        r.attributes[i] = -1;
        missing.push_back(records.size());
      } else {
        r.attributes[i] = parse_attribute(fields[i + 1], line_no);
      }
    }
    if (fields[10] == "4")
      r.label = ClassLabel::Class1;
    else if (fields[10] == "2")
      r.label = ClassLabel::Class2;
    else
      fail(line_no, "unknown class code '" + fields[10] + "'");
    records.push_back(std::move(r));
  }

  if (!missing.empty()) {
    std::vector<int> present;
    present.reserve(records.size());
    for (const auto& r : records)
      if (r.attributes[kBareNuclei] > 0) present.push_back(r.attributes[kBareNuclei]);
    if (present.empty())
      throw std::runtime_error("bare nuclei value missing in every record; cannot impute");
    const int imputed = static_cast<int>(std::llround(median(std::move(present))));
    for (const auto idx : missing) records[idx].attributes[kBareNuclei] = imputed;
  }
  return records;
}

std::vector<RawRecord> parse_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  return parse_dataset(in);
}

SignalDerivationStats compute_stats(const std::vector<RawRecord>& records) {
  std::array<double, 4> sums{};
  std::size_t n1 = 0;
  std::vector<int> clump;
  clump.reserve(records.size());
  for (const auto& r : records) {
    clump.push_back(r.attributes[kClumpThickness]);
    if (r.label == ClassLabel::Class1) {
      ++n1;
      for (std::size_t k = 0; k < 4; ++k) sums[k] += r.attributes[kDangerAttrs[k]];
    }
  }
  if (n1 == 0) throw std::runtime_error("compute_stats: no Class1 records");

  SignalDerivationStats st;
  for (std::size_t k = 0; k < 4; ++k) st.class1_means[k] = sums[k] / static_cast<double>(n1);
  st.clump_median = median(std::move(clump));
  return st;
}

SignalEvent derive_event(const RawRecord& r, const SignalDerivationStats& st) {
  double danger = 0;
  for (std::size_t k = 0; k < 4; ++k)
    danger += std::fabs(r.attributes[kDangerAttrs[k]] - st.class1_means[k]);
  danger /= 4.0;

  SignalVectord s{};
  s.danger = danger;
  const double clump = r.attributes[kClumpThickness];
  if (clump > st.clump_median)
    s.safe = clump - st.clump_median;
  else if (clump < st.clump_median)
    s.pamp = st.clump_median - clump;
  return {r.item_id, s, r.label};
}

std::vector<SignalEvent> derive_events(const std::vector<RawRecord>& records,
                                       const SignalDerivationStats& st) {
  std::vector<SignalEvent> events;
  events.reserve(records.size());
  for (const auto& r : records) events.push_back(derive_event(r, st));
  return events;
}

std::vector<SignalEvent> parse_signal_stream(std::istream& in) {
  std::vector<SignalEvent> events;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 5 && fields.size() != 6)
      fail(line_no, "expected 5 or 6 comma-separated fields, got " + std::to_string(fields.size()));

    SignalEvent e;
    {
      const auto& tok = fields[0];
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), e.id);
      if (ec != std::errc{} || ptr != tok.data() + tok.size())
        fail(line_no, "bad antigen id '" + tok + "'");
    }
    e.signals.pamp = parse_real(fields[1], line_no, "pamp");
    e.signals.danger = parse_real(fields[2], line_no, "danger");
    e.signals.safe = parse_real(fields[3], line_no, "safe");
    e.signals.inflammatory = parse_real(fields[4], line_no, "inflammatory");
    if (fields.size() == 6) {
      if (fields[5] == "1")
        e.label = ClassLabel::Class1;
      else if (fields[5] == "2")
        e.label = ClassLabel::Class2;
      else
        fail(line_no, "true_label must be 1 or 2, got '" + fields[5] + "'");
    }
    events.push_back(std::move(e));
  }
  return events;
}

std::vector<SignalEvent> parse_signal_stream(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open signal stream file: " + path);
  return parse_signal_stream(in);
}

void write_signal_stream(const std::vector<SignalEvent>& events, std::ostream& out) {
  for (const auto& e : events) {
    out << e.id << ',' << format_double(e.signals.pamp) << ',' << format_double(e.signals.danger)
        << ',' << format_double(e.signals.safe) << ',' << format_double(e.signals.inflammatory);
    if (e.label) out << ',' << (*e.label == ClassLabel::Class1 ? 1 : 2);
    out << '\n';
  }
}

}  // namespace dca::wbc
