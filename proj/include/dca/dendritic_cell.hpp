#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dca/rng.hpp"
#include "dca/signal_model.hpp"

namespace dca {

// Identifier of the data item flowing through the system; for dataset-driven
// experiments this is the 1-based row index (guaranteed unique, unlike the
// source file's sample codes).
using Antigen = std::uint64_t;

enum class Context { Mature, SemiMature };

template <typename Scalar>
struct DcConfig {
  Scalar base_migration_threshold{10};
  Scalar fuzz_fraction{Scalar(0.1)};  // half-width of the relative fuzz band

  void validate() const {
    if (!(base_migration_threshold > Scalar(0)))
      throw std::invalid_argument("DcConfig: base_migration_threshold must be > 0");
    if (!(fuzz_fraction >= Scalar(0) && fuzz_fraction < Scalar(1)))
      throw std::invalid_argument("DcConfig: fuzz_fraction must be in [0, 1)");
  }
};

struct Presentation {
  std::vector<Antigen> antigens;
  Context context{Context::SemiMature};

  bool operator==(const Presentation&) const = default;
};

// One virtual cell: an ordered antigen store plus component-wise cytokine
// running totals and a migration threshold fixed at creation.
template <typename Scalar>
class DendriticCell {
 public:
  explicit DendriticCell(Scalar threshold) : threshold_(threshold) {}

  // Threshold drawn uniformly from base * [1 - fuzz, 1 + fuzz].
  static DendriticCell fresh(const DcConfig<Scalar>& cfg, SampleRng& rng) {
    const double base = static_cast<double>(cfg.base_migration_threshold);
    const double fuzz = static_cast<double>(cfg.fuzz_fraction);
    return DendriticCell(
        static_cast<Scalar>(rng.uniform_real(base * (1.0 - fuzz), base * (1.0 + fuzz))));
  }

  void sample(Antigen a, const CytokineOutput<Scalar>& c) {
    collected_.push_back(a);
    totals_ += c;
  }

  bool should_migrate() const { return totals_.csm > threshold_; }

  // Mature only when mat strictly exceeds semi; ties stay semi-mature.
  Presentation present() const {
    return Presentation{collected_,
                        totals_.mat > totals_.semi ? Context::Mature : Context::SemiMature};
  }

  const CytokineOutput<Scalar>& totals() const { return totals_; }
  Scalar threshold() const { return threshold_; }
  const std::vector<Antigen>& collected() const { return collected_; }
  bool empty() const { return collected_.empty(); }

 private:
  std::vector<Antigen> collected_;
  CytokineOutput<Scalar> totals_{};
  Scalar threshold_;
};

using DcConfigd = DcConfig<double>;
using DendriticCelld = DendriticCell<double>;

}  // namespace dca
