#pragma once

#include <vector>

#include "eitsim/dynamics.hpp"
#include "eitsim/model.hpp"

namespace eitsim::cli {

struct SpectrumRow {
  int m = 0;
  int k = 0;
  int n = 0;
  double closed_form = 0.0;
  double numeric = 0.0;
  double abs_error = 0.0;
};

/// Dressed-state energies of one excitation sector next to the numerical
/// eigenvalues. Labels are paired with eigenvalues by sorted energy, so
/// degenerate labels share a value.
std::vector<SpectrumRow> spectrum_rows(const ModelParams& params, int sector);

/// Fraction of |d_1> left in the photon-free spin-wave state after a write sweep.
double transfer_fidelity(const Drive& drive, double dt = 0.0);

struct RoundTrip {
  TransferResult stored;
  TransferResult retrieved;
  double fidelity = 0.0;
  double sign_deviation = 0.0;  // max |stored(n,m) - (-1)^(n+m) rho(n,m)|
};

RoundTrip store_then_retrieve(const DensityMatrix& rho, const Drive& write, const EvolveOptions& options = {});

}  // namespace eitsim::cli
