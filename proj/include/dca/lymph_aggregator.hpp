#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <stdexcept>

#include "dca/dendritic_cell.hpp"

namespace dca {

enum class ClassLabel { Class1, Class2 };

// Per-antigen mature/semi-mature presentation counts, the per-antigen maturity
// fraction derived from them, and threshold classification.
class PresentationLedger {
 public:
  struct Counts {
    std::uint64_t mature{0};
    std::uint64_t semi{0};

    bool operator==(const Counts&) const = default;
  };

  // An antigen appearing k times in one presentation is counted k times.
  void record(const Presentation& p) {
    for (const Antigen a : p.antigens) {
      Counts& c = counts_[a];
      if (p.context == Context::Mature)
        ++c.mature;
      else
        ++c.semi;
    }
  }

  void merge(const PresentationLedger& other) {
    for (const auto& [a, c] : other.counts_) {
      Counts& mine = counts_[a];
      mine.mature += c.mature;
      mine.semi += c.semi;
    }
  }

  double maturity_fraction(Antigen a) const {
    const Counts& c = find(a);
    return static_cast<double>(c.mature) / static_cast<double>(c.mature + c.semi);
  }

  // Class2 only when the fraction strictly exceeds the threshold.
  ClassLabel classify(Antigen a, double threshold) const {
    return maturity_fraction(a) > threshold ? ClassLabel::Class2 : ClassLabel::Class1;
  }

  const Counts& find(Antigen a) const {
    const auto it = counts_.find(a);
    if (it == counts_.end() || it->second.mature + it->second.semi == 0)
      throw std::domain_error("PresentationLedger: antigen never presented");
    return it->second;
  }

  bool contains(Antigen a) const { return counts_.contains(a); }

  std::uint64_t total_presentations() const {
    std::uint64_t total = 0;
    for (const auto& [a, c] : counts_) total += c.mature + c.semi;
    return total;
  }

  const std::map<Antigen, Counts>& counts() const { return counts_; }

  // Deterministic text form, used for byte-identity comparisons.
  void serialize(std::ostream& os) const {
    for (const auto& [a, c] : counts_) os << a << ':' << c.mature << ',' << c.semi << '\n';
  }

  bool operator==(const PresentationLedger&) const = default;

 private:
  std::map<Antigen, Counts> counts_;
};

}  // namespace dca
