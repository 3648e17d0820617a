#include "cli/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace eitsim::cli {

std::vector<SpectrumRow> spectrum_rows(const ModelParams& params, int sector) {
  std::vector<SpectrumRow> rows;
  for (int m = sector; m >= 0; --m)
    for (int k = sector - m; k >= 0; --k) rows.push_back({m, k, sector - m - k, dressed_energy(m, k, params)});

  const auto basis = model_basis(sector, sector);
  const Eigen::VectorXd numeric = hermitian_eigen(build_hamiltonian(params, basis).dense()).values;

  std::vector<std::size_t> order(rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rows[a].closed_form < rows[b].closed_form; });
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    auto& row = rows[order[rank]];
    row.numeric = numeric(static_cast<Eigen::Index>(rank));
    row.abs_error = std::abs(row.numeric - row.closed_form);
  }
  return rows;
}

double transfer_fidelity(const Drive& drive, double dt) {
  const auto basis = model_basis(1, 1);
  const auto initial = dark_state(1, mixing_angle(drive.params_at(drive.profile.t_start())), basis);
  EvolveOptions options;
  options.dt = dt;
  options.sample_count = 2;
  options.keep_snapshots = false;
  return std::norm(evolve(initial, drive, options).final_state.amplitude({0, 0, 1}));
}

RoundTrip store_then_retrieve(const DensityMatrix& rho, const Drive& write, const EvolveOptions& options) {
  RoundTrip out;
  out.stored = store(rho, write, options);
  const Drive read{write.g_sqrt_n, write.delta_c, write.profile.reversed()};
  out.retrieved = retrieve(out.stored.output, read, options);
  out.fidelity = state_fidelity(rho, out.retrieved.output);
  for (Eigen::Index n = 0; n < rho.rows(); ++n)
    for (Eigen::Index m = 0; m < rho.cols(); ++m) {
      const double sign = (n + m) % 2 == 0 ? 1.0 : -1.0;
      out.sign_deviation = std::max(out.sign_deviation, std::abs(out.stored.output(n, m) - sign * rho(n, m)));
    }
  return out;
}

}  // namespace eitsim::cli
