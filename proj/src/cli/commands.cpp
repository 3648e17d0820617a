#include "cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "cli/analysis.hpp"
#include "cli/format.hpp"
#include "cli/verify.hpp"

namespace eitsim::cli {

namespace {

using nlohmann::ordered_json;

struct Output {
  std::string path;
  std::string format = "csv";
};

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::kConfig, "out: cannot write '" + path + "'");
  file << text;
}

ordered_json rho_entries(const DensityMatrix& rho) {
  ordered_json list = ordered_json::array();
  for (Eigen::Index n = 0; n < rho.rows(); ++n)
    for (Eigen::Index m = 0; m < rho.cols(); ++m)
      list.push_back({{"n", n}, {"m", m}, {"re", rho(n, m).real()}, {"im", rho(n, m).imag()}});
  return list;
}

std::string table_as_json(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  ordered_json list = ordered_json::array();
  for (const auto& row : rows) {
    ordered_json entry;
    for (std::size_t i = 0; i < header.size(); ++i) entry[header[i]] = row[i];
    list.push_back(std::move(entry));
  }
  return ordered_json{{"rows", std::move(list)}}.dump(2) + "\n";
}

std::string table_as_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  CsvWriter csv(header);
  for (const auto& row : rows) {
    std::vector<std::string> cells;
    for (double v : row) cells.push_back(format_double(v));
    csv.row(cells);
  }
  return csv.str();
}

std::string table(const Output& o, const std::vector<std::string>& header,
                  const std::vector<std::vector<double>>& rows) {
  return o.format == "json" ? table_as_json(header, rows) : table_as_csv(header, rows);
}

int cmd_verify(const RunConfig& config, const Output& o, std::ostream& out, std::ostream& err) {
  const VerifyReport report = run_verify(config);
  emit(report.to_json(config), o.path, out);
  for (const auto& c : report.checks)
    if (!c.passed) err << "check failed: " << c.name << "\n";
  return report.passed() ? kExitOk : kExitCheckFailed;
}

constexpr double kSpectrumTolerance = 1e-8;

int cmd_spectrum(const RunConfig& config, const Output& o, std::ostream& out, std::ostream& err) {
  const auto rows = spectrum_rows(config.params(), config.sector);
  std::vector<std::vector<double>> cells;
  bool ok = true;
  for (const auto& r : rows) {
    cells.push_back({double(r.m), double(r.k), double(r.n), r.closed_form, r.numeric, r.abs_error});
    if (!(r.abs_error <= kSpectrumTolerance)) {
      ok = false;
      err << "spectrum: (" << r.m << "," << r.k << "," << r.n << ") misses its closed form by " << r.abs_error
          << "\n";
    }
  }
  emit(table(o, {"m", "k", "n", "E_closed_form", "E_numeric", "abs_error"}, cells), o.path, out);
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_store_retrieve(const RunConfig& config, const Output& o, std::ostream& out) {
  const DensityMatrix rho = config.density_matrix();
  const Drive write = config.write_drive(config.duration, config.delta_c);
  EvolveOptions options;
  options.dt = config.dt;
  options.keep_snapshots = false;
  const RoundTrip trip = store_then_retrieve(rho, write, options);
  const double max_eta = std::max(trip.stored.max_eta, trip.retrieved.max_eta);

  ordered_json summary;
  summary["config"] = config.canonical();
  summary["input_rho"] = rho_entries(rho);
  summary["stored_rho"] = rho_entries(trip.stored.output);
  summary["retrieved_rho"] = rho_entries(trip.retrieved.output);
  summary["round_trip_fidelity"] = trip.fidelity;
  summary["max_eta"] = max_eta;
  summary["regime"] = regime_for(max_eta);
  summary["sign_deviation"] = trip.sign_deviation;
  summary["sign_bound"] = trip.stored.worst_infidelity();
  const std::string summary_text = summary.dump(2) + "\n";

  if (o.format == "json") {
    emit(summary_text, o.path, out);
    return kExitOk;
  }
  // the read sweep starts where the write sweep ends
  const double offset = write.profile.duration() - write.profile.reversed().t_start();
  std::vector<std::vector<double>> cells;
  for (const auto& s : trip.stored.samples) cells.push_back({s.t, s.omega, s.theta, s.eta, s.dark_fidelity});
  for (const auto& s : trip.retrieved.samples)
    cells.push_back({s.t + offset, s.omega, s.theta, s.eta, s.dark_fidelity});
  emit(table_as_csv({"t", "omega", "theta", "eta", "dark_fidelity"}, cells), o.path, out);
  if (!config.summary.empty()) emit(summary_text, config.summary, out);
  return kExitOk;
}

int cmd_sweep(const RunConfig& config, const Output& o, std::ostream& out) {
  std::vector<std::vector<double>> cells;
  for (const auto& r : run_sweep(config)) cells.push_back({r.duration, r.delta_c, r.max_eta, r.final_infidelity});
  emit(table(o, {"duration", "delta_c", "max_eta", "final_infidelity"}, cells), o.path, out);
  return kExitOk;
}

}  // namespace

unsigned worker_count(std::size_t jobs) {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("EITSIM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) cap = static_cast<unsigned>(v);
  }
  return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(cap, jobs)));
}

std::vector<SweepRow> run_sweep(const RunConfig& config) {
  const std::vector<double> durations = config.durations.empty() ? std::vector{config.duration} : config.durations;
  const std::vector<double> detunings = config.delta_cs.empty() ? std::vector{config.delta_c} : config.delta_cs;

  std::vector<SweepRow> rows;
  for (double dc : detunings)
    for (double d : durations) rows.push_back({d, dc, 0.0, 0.0});
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return a.delta_c != b.delta_c ? a.delta_c < b.delta_c : a.duration < b.duration;
  });

  std::vector<std::exception_ptr> failures(rows.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      try {
        const Drive drive = config.write_drive(rows[i].duration, rows[i].delta_c);
        rows[i].max_eta = max_adiabaticity(drive);
        rows[i].final_infidelity = 1.0 - transfer_fidelity(drive, config.dt);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned workers = worker_count(rows.size());
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);
  return rows;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Three-mode EIT quantum-memory simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> assignments;
  Output output;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--out", output.path, "output file (default: stdout)");
  app.add_option("--format", output.format, "table format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--set", assignments, "KEY=VALUE override, repeatable");

  // flag -> config key; applied after the config file so flags win
  const std::vector<std::pair<std::string, std::string>> flag_keys = {
      {"--g-sqrt-n", "g_sqrt_n"}, {"--omega", "omega"},       {"--delta-c", "delta_c"},
      {"--n-atoms", "n_atoms"},   {"--cutoff", "cutoff"},     {"--sector", "sector"},
      {"--dt", "dt"},             {"--profile", "profile"},   {"--duration", "duration"},
      {"--summary", "summary"}};
  std::vector<std::string> flag_values(flag_keys.size());
  std::vector<CLI::Option*> flag_options;
  for (std::size_t i = 0; i < flag_keys.size(); ++i)
    flag_options.push_back(app.add_option(flag_keys[i].first, flag_values[i]));

  std::string chosen;
  for (const char* name : {"verify", "spectrum", "store-retrieve", "sweep"}) {
    auto* sub = app.add_subcommand(name);
    sub->fallthrough();
    sub->callback([&chosen, name] { chosen = name; });
  }
  app.get_subcommand("verify")->description("run the invariant suite and write a JSON report");
  app.get_subcommand("spectrum")->description("closed-form vs numerical energies of one excitation sector");
  app.get_subcommand("store-retrieve")->description("write then read a photon density matrix");
  app.get_subcommand("sweep")->description("max adiabaticity and transfer infidelity over a grid");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig config = config_path.empty() ? RunConfig{} : load_config_file(config_path);
    for (std::size_t i = 0; i < flag_keys.size(); ++i)
      if (flag_options[i]->count() > 0) config.set(flag_keys[i].second, flag_values[i]);
    for (const auto& a : assignments) {
      const auto eq = a.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::kConfig, "--set: expected KEY=VALUE, got '" + a + "'");
      config.set(a.substr(0, eq), a.substr(eq + 1));
    }
    config.validate();

    if (chosen == "verify") return cmd_verify(config, output, out, err);
    if (chosen == "spectrum") return cmd_spectrum(config, output, out, err);
    if (chosen == "store-retrieve") return cmd_store_retrieve(config, output, out);
    return cmd_sweep(config, output, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace eitsim::cli
