#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dca/dendritic_cell.hpp"
#include "dca/rng.hpp"
#include "dca/signal_model.hpp"

namespace dca {

struct PoolConfig {
  std::size_t pool_size{100};
  std::size_t sample_size{10};
  std::uint64_t rng_seed{1};

  void validate() const {
    if (pool_size == 0) throw std::invalid_argument("PoolConfig: pool_size must be > 0");
    if (sample_size == 0 || sample_size > pool_size)
      throw std::invalid_argument("PoolConfig: need 1 <= sample_size <= pool_size");
  }
};

// Fixed-size pool of cells sharing one seeded generator: per event a random
// subset samples the antigen, migrants present and are replaced in place, so
// the pool size is invariant across events.
template <typename Scalar>
class DcPool {
 public:
  DcPool(const PoolConfig& cfg, const DcConfig<Scalar>& dc_cfg)
      : cfg_(cfg), dc_cfg_(dc_cfg), rng_(cfg.rng_seed) {
    cfg_.validate();
    dc_cfg_.validate();
    cells_.reserve(cfg_.pool_size);
    for (std::size_t i = 0; i < cfg_.pool_size; ++i)
      cells_.push_back(DendriticCell<Scalar>::fresh(dc_cfg_, rng_));
  }

  // All selected cells sample first; migration is then checked once per cell
  // in selection order, and each migrant is replaced by a fresh cell with a
  // newly drawn threshold before the next event.
  std::vector<Presentation> dispatch_event(Antigen a, const SignalVector<Scalar>& s,
                                           const WeightMatrix<Scalar>& w,
                                           NormalizationMode mode) {
    if (cells_.empty()) throw std::logic_error("DcPool: dispatch after flush");
    const CytokineOutput<Scalar> c = process_signals(s, w, mode);
    const auto picked = rng_.sample_indices(cfg_.sample_size, cells_.size());
    for (const auto i : picked) cells_[i].sample(a, c);

    std::vector<Presentation> out;
    for (const auto i : picked) {
      if (cells_[i].should_migrate()) {
        out.push_back(cells_[i].present());
        cells_[i] = DendriticCell<Scalar>::fresh(dc_cfg_, rng_);
      }
    }
    return out;
  }

  // End of stream: survivors with a nonempty antigen store present in their
  // current context; afterwards the pool is spent.
  std::vector<Presentation> flush() {
    std::vector<Presentation> out;
    for (const auto& cell : cells_) {
      if (!cell.empty()) out.push_back(cell.present());
    }
    cells_.clear();
    return out;
  }

  const std::vector<DendriticCell<Scalar>>& cells() const { return cells_; }

 private:
  PoolConfig cfg_;
  DcConfig<Scalar> dc_cfg_;
  SampleRng rng_;
  std::vector<DendriticCell<Scalar>> cells_;
};

using DcPoold = DcPool<double>;

}  // namespace dca
