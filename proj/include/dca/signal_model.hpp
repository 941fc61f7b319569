#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace dca {

// Input concentrations for one event: pathogenic, danger, and safe evidence
// plus the inflammatory amplifier.
template <typename Scalar>
struct SignalVector {
  Scalar pamp{0};
  Scalar danger{0};
  Scalar safe{0};
  Scalar inflammatory{0};

  Eigen::Matrix<Scalar, 3, 1> pds() const {
    return Eigen::Matrix<Scalar, 3, 1>{pamp, danger, safe};
  }

  bool finite() const {
    return std::isfinite(static_cast<double>(pamp)) &&
           std::isfinite(static_cast<double>(danger)) &&
           std::isfinite(static_cast<double>(safe)) &&
           std::isfinite(static_cast<double>(inflammatory));
  }

  bool operator==(const SignalVector&) const = default;
};

// Rows are output channels (csm, semi, mat); columns are input classes
// (pamp, danger, safe).
template <typename Scalar>
struct WeightMatrix {
  Eigen::Matrix<Scalar, 3, 3> w;

  static WeightMatrix defaults() {
    WeightMatrix m;
    m.w << Scalar(2), Scalar(1), Scalar(2),
           Scalar(0), Scalar(0), Scalar(3),
           Scalar(2), Scalar(1), Scalar(-3);
    return m;
  }
};

// Output concentrations. mat may legitimately go negative (the safe weight on
// the mat channel is negative); values are accumulated as-is, never clamped.
template <typename Scalar>
struct CytokineOutput {
  Scalar csm{0};
  Scalar semi{0};
  Scalar mat{0};

  Eigen::Matrix<Scalar, 3, 1> vec() const {
    return Eigen::Matrix<Scalar, 3, 1>{csm, semi, mat};
  }

  CytokineOutput& operator+=(const CytokineOutput& o) {
    csm += o.csm;
    semi += o.semi;
    mat += o.mat;
    return *this;
  }
};

// Per-channel normalization: PerOutputWeightSum divides each channel by the
// sum of its own three weights (zero sum treated as one), which reproduces
// the published worked example exactly. Eq1TimesTwo additionally doubles the
// result, matching the formula as printed rather than as exemplified.
enum class NormalizationMode { PerOutputWeightSum, Eq1TimesTwo };

// The inflammatory factor (1 + IC) amplifies the whole weighted sum of every
// channel, not just the danger term.
template <typename Scalar>
CytokineOutput<Scalar> process_signals(const SignalVector<Scalar>& s,
                                       const WeightMatrix<Scalar>& w,
                                       NormalizationMode mode) {
  if (!s.finite()) throw std::domain_error("process_signals: non-finite signal");
  if (!w.w.allFinite()) throw std::domain_error("process_signals: non-finite weight");

  Eigen::Matrix<Scalar, 3, 1> raw = (w.w * s.pds()) * (Scalar(1) + s.inflammatory);
  Eigen::Matrix<Scalar, 3, 1> den = w.w.rowwise().sum();
  for (int r = 0; r < 3; ++r) {
    if (den(r) == Scalar(0)) den(r) = Scalar(1);
  }
  Eigen::Matrix<Scalar, 3, 1> out = raw.cwiseQuotient(den);
  if (mode == NormalizationMode::Eq1TimesTwo) out *= Scalar(2);
  return {out(0), out(1), out(2)};
}

using SignalVectord = SignalVector<double>;
using WeightMatrixd = WeightMatrix<double>;
using CytokineOutputd = CytokineOutput<double>;

}  // namespace dca
