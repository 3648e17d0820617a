// Acceptance run: one PASS/FAIL line per criterion, each with its measured
// quantity and wall-clock budget. Exit status is nonzero if any line fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli/commands.hpp"
#include "eitsim/dynamics.hpp"
#include "eitsim/exact_spin.hpp"
#include "eitsim/model.hpp"

using namespace eitsim;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double budget_seconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("threw ") + e.what()};
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = budget_seconds <= 0.0 || elapsed <= budget_seconds;
  const bool ok = o.passed && in_time;
  if (!ok) ++failures;
  std::printf("%s %d %s: %s [%.2f s", ok ? "PASS" : "FAIL", id, title, o.detail.c_str(), elapsed);
  if (budget_seconds > 0.0) std::printf(" / %.0f s budget%s", budget_seconds, in_time ? "" : ", over budget");
  std::printf("]\n");
  std::fflush(stdout);
}

std::string fmt(const char* format, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

// Independent oracle: sorted multiset {m e+ + k e- : m + k + n = s}.
std::vector<double> oracle_levels(const ModelParams& p, int s) {
  const double big = std::sqrt(p.delta_c * p.delta_c + 4.0 * p.epsilon() * p.epsilon());
  const double ep = 0.5 * (p.delta_c + big), em = 0.5 * (p.delta_c - big);
  std::vector<double> out;
  for (int m = 0; m <= s; ++m)
    for (int k = 0; m + k <= s; ++k) out.push_back(m * ep + k * em);
  std::sort(out.begin(), out.end());
  return out;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Drive tanh_write(double duration, double delta_c = 0.0) {
  return Drive{1.0, delta_c, write_profile(ProfileKind::kTanh, duration, 1.0)};
}

double spin_wave_fidelity(const Drive& drive, double dt = 0.0) {
  const auto b = model_basis(1, 1);
  EvolveOptions opts;
  opts.dt = dt;
  opts.keep_snapshots = false;
  const auto traj = evolve(dark_state(1, mixing_angle(drive.params_at(drive.profile.t_start())), b), drive, opts);
  return std::norm(traj.final_state.amplitude({0, 0, 1}));
}

}  // namespace

int main() {
  criterion(1, "dark-state nullity", 1.0, [] {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> omega(0.0, 10.0), dc(-5.0, 5.0);
    const auto basis = model_basis(4);
    double worst = 0.0;
    for (int draw = 0; draw < 20; ++draw) {
      const auto p = ModelParams::make(1.0, omega(rng), dc(rng));
      const auto h = build_hamiltonian(p, basis);
      for (int n = 0; n <= 4; ++n)
        worst = std::max(worst, norm(apply(h, dark_state(n, mixing_angle(p), basis))) / p.epsilon());
    }
    return Outcome{worst <= 1e-10, fmt("max |H d_n|/eps = %.2e over 20 draws, n <= 4 (limit 1e-10)", worst)};
  });

  criterion(2, "dressed spectrum", 5.0, [] {
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> g(0.5, 2.0), omega(0.0, 10.0), dc(-5.0, 5.0);
    double worst = 0.0, worst_other_sign = 0.0;
    for (int draw = 0; draw < 10; ++draw) {
      const auto p = ModelParams::make(g(rng), omega(rng), dc(rng));
      const auto sd = spectral_data(p);
      for (int s = 0; s <= 4; ++s) {
        const auto numeric = hermitian_eigen(build_hamiltonian(p, model_basis(s, s)).dense()).values;
        const auto expected = oracle_levels(p, s);
        if (std::size_t(numeric.size()) != expected.size()) return Outcome{false, "multiplicity mismatch"};
        for (std::size_t i = 0; i < expected.size(); ++i)
          worst = std::max(worst, std::abs(numeric(Eigen::Index(i)) - expected[i]));
        // library closed form agrees with the oracle
        for (int m = 0; m <= s; ++m)
          for (int k = 0; m + k <= s; ++k) {
            const double e = dressed_energy(m, k, p);
            const double other = m * sd.e_plus - k * sd.e_minus;
            const auto hit = std::min_element(expected.begin(), expected.end(), [&](double a, double b) {
              return std::abs(a - e) < std::abs(b - e);
            });
            worst = std::max(worst, std::abs(*hit - e));
            const auto miss = std::min_element(expected.begin(), expected.end(), [&](double a, double b) {
              return std::abs(a - other) < std::abs(b - other);
            });
            worst_other_sign = std::max(worst_other_sign, std::abs(*miss - other));
          }
      }
    }
    return Outcome{worst <= 1e-8,
                   fmt("levels m*e+ + k*e-: max error %.2e over 10 draws, s <= 4 (limit 1e-8); "
                       "the m*e+ - k*e- form misses by up to %.2f",
                       worst, worst_other_sign)};
  });

  criterion(3, "normal-mode energies", 0.0, [] {
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    double worst = 0.0;
    for (int draw = 0; draw < 50; ++draw) {
      const auto p = ModelParams::make(std::abs(u(rng)) + 0.1, std::abs(u(rng)), u(rng));
      const auto sd = spectral_data(p);
      Eigen::Matrix2cd m;
      m << p.delta_c, p.epsilon(), p.epsilon(), 0.0;
      const auto v = hermitian_eigen(m).values;
      worst = std::max({worst, std::abs(v(1) - sd.e_plus), std::abs(v(0) - sd.e_minus)});
    }
    const auto sd = spectral_data(ModelParams::make(1, 1, 1));
    const bool exact = sd.e_plus == 2.0 && sd.e_minus == -1.0;
    return Outcome{worst <= 1e-12 && exact,
                   fmt("max |e - eig| = %.2e (limit 1e-12); (1,1,1) -> (%.17g, %.17g)", worst, sd.e_plus,
                       sd.e_minus)};
  });

  criterion(4, "collective-spin algebra", 10.0, [] {
    double worst_exact = 0.0;
    std::vector<double> ns, aa, ac;
    for (int n_atoms : {1, 2, 4, 8, 16, 32}) {
      const auto r = commutator_defect(n_atoms);
      worst_exact = std::max(worst_exact, r.worst_exact());
      // N = 1 cannot hold the whole n_a + n_c <= 2 window, so the power law is fitted from N = 2
      if (n_atoms >= 2) {
        ns.push_back(n_atoms);
        aa.push_back(r.boson_aa_defect);
        ac.push_back(r.boson_ac_defect);
      }
    }
    const double s_aa = slope(ns, aa), s_ac = slope(ns, ac);
    const bool ok = worst_exact <= 1e-12 && std::abs(s_aa + 1) <= 0.2 && std::abs(s_ac + 1) <= 0.2;
    return Outcome{ok, fmt("exact relations <= %.2e; fitted exponents [A,A+]-1: %.4f, [A,C+]: %.4f (target -1 +- 0.2)",
                           worst_exact, s_aa, s_ac)};
  });

  criterion(5, "finite-N dark states", 10.0, [] {
    const auto p = ModelParams::make(1.0, 1.0, 0.0);
    double worst_n1 = 0.0;
    for (int n_atoms : {1, 2, 4, 8, 16, 32})
      worst_n1 = std::max(worst_n1, bosonic_defect(n_atoms, 1, p).nullity_residual);
    const double r16 = bosonic_defect(16, 2, p).nullity_residual;
    const double r32 = bosonic_defect(32, 2, p).nullity_residual;
    const double ratio = r16 / r32;
    return Outcome{worst_n1 <= 1e-12 && std::abs(ratio - 2.0) <= 0.1,
                   fmt("n=1 residual <= %.2e for N in 1..32; n=2 residual N=16 %.3e, N=32 %.3e, ratio %.4f",
                       worst_n1, r16, r32, ratio)};
  });

  criterion(6, "nonadiabatic couplings", 5.0, [] {
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> omega(0.0, 5.0), dc(-3.0, 3.0), wdot(-1.0, 1.0);
    const auto basis = model_basis(4);
    double worst_allowed = 0.0, worst_forbidden = 0.0;
    for (int draw = 0; draw < 5; ++draw) {
      const auto p = ModelParams::make(1.0, omega(rng), dc(rng));
      const double w = wdot(rng);
      const auto sd = spectral_data(p);
      const double thetadot = -p.g_sqrt_n * w / (sd.epsilon * sd.epsilon);
      for (int l = 0; l <= 3; ++l)
        for (int n = 0; n <= 3; ++n)
          for (int m = 0; m <= 2; ++m)
            for (int k = 0; k <= 2; ++k) {
              if (m + k + n > 4) continue;
              const Complex fd = nonadiabatic_coupling(m, k, n, l, p, w, basis);
              const bool allowed = n == l - 1 && m + k == 1;
              if (allowed) {
                // oracle written out independently of the library's closed form
                const double amp = m == 0 ? std::sqrt((sd.big_theta + p.delta_c) / (2 * sd.big_theta))
                                          : -std::sqrt((sd.big_theta - p.delta_c) / (2 * sd.big_theta));
                const double expected = std::sqrt(double(l)) * thetadot * amp;
                worst_allowed = std::max(worst_allowed, std::abs(fd - expected));
                worst_allowed = std::max(
                    worst_allowed, std::abs(nonadiabatic_coupling_closed_form(m, k, n, l, p, w) - expected));
              } else {
                worst_forbidden = std::max(worst_forbidden, std::abs(fd));
              }
            }
    }
    return Outcome{worst_allowed <= 1e-6 && worst_forbidden <= 1e-8,
                   fmt("allowed |fd - closed| = %.2e (limit 1e-6); forbidden max %.2e (limit 1e-8)", worst_allowed,
                       worst_forbidden)};
  });

  criterion(7, "adiabatic transfer", 30.0, [] {
    const Drive slow = tanh_write(100.0), fast = tanh_write(3.0);
    const double eta_slow = max_adiabaticity(slow), eta_fast = max_adiabaticity(fast);
    const double f_slow = spin_wave_fidelity(slow), f_fast = spin_wave_fidelity(fast);
    const double dt = default_time_step(slow, 1);
    const double halving = std::abs(spin_wave_fidelity(slow, dt) - spin_wave_fidelity(slow, 0.5 * dt));
    double reduction = 0.0;
    std::mt19937_64 rng(707);
    std::uniform_real_distribution<double> u(0.1, 5.0);
    for (int draw = 0; draw < 50; ++draw) {
      const auto p = ModelParams::make(u(rng), u(rng) - 0.1, 0.0);
      const double w = u(rng) - 2.5;
      const double eps = p.epsilon();
      const double expected = p.g_sqrt_n * std::abs(w) / (eps * eps * eps);
      reduction = std::max(reduction, std::abs(adiabaticity(p, w) - expected) / expected);
    }
    const bool ok = eta_slow <= 0.05 && f_slow >= 0.99 && eta_fast >= 1.0 && f_fast <= 0.9 && halving < 1e-8 &&
                    reduction <= 1e-14;
    std::ostringstream s;
    s << fmt("eta %.3f -> F %.6f; eta %.3f -> F %.4f; ", eta_slow, f_slow, eta_fast, f_fast)
      << fmt("dt halving changes F by %.1e; delta_c=0 formula rel. error %.1e", halving, reduction);
    return Outcome{ok, s.str()};
  });

  criterion(8, "write/read maps", 60.0, [] {
    const Drive write = tanh_write(100.0);
    const Drive read{1.0, 0.0, write.profile.reversed()};
    const DensityMatrix rho = DensityMatrix::Constant(2, 2, 0.5);
    const auto stored = store(rho, write);
    const double bound = stored.worst_infidelity();
    double deviation = 0.0;
    for (int n = 0; n < 2; ++n)
      for (int m = 0; m < 2; ++m)
        deviation = std::max(deviation, std::abs(stored.output(n, m) - ((n + m) % 2 ? -1.0 : 1.0) * rho(n, m)));
    const double fidelity = state_fidelity(rho, retrieve(stored.output, read).output);
    const bool ok = deviation <= bound && stored.output(0, 1).real() < 0 && fidelity >= 0.98;
    return Outcome{ok, fmt("stored off-diagonal %.4f, |dev from (-1)^(n+m) rho| %.2e <= sweep infidelity %.2e; "
                           "round trip F = %.5f (limit 0.98)",
                           stored.output(0, 1).real(), deviation, bound, fidelity)};
  });

  criterion(9, "deterministic verify report", 0.0, [] {
    std::ostringstream out1, err1, out2, err2;
    const int c1 = cli::run_cli({"verify"}, out1, err1);
    const int c2 = cli::run_cli({"verify"}, out2, err2);
    const bool same = out1.str() == out2.str();
    return Outcome{c1 == 0 && c2 == 0 && same && !out1.str().empty(),
                   fmt("exit codes %g/%g, %g-byte reports %s", c1, c2, double(out1.str().size())) +
                       (same ? "identical" : "differ")};
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
