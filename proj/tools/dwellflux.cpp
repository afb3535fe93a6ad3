#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "dwellflux/approximation.hpp"
#include "dwellflux/ffcf.hpp"
#include "dwellflux/freemotion.hpp"
#include "dwellflux/report.hpp"

using namespace dwell;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

struct Common {
  std::string config;
  std::string out = ".";
  double tol = 1e-6;
};

std::filesystem::path prepare_out(const std::string& dir) {
  std::filesystem::path p(dir);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
  return p;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

// Non-finite values are written as null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void check_tolerance(const char* what, double value, double err, double tol) {
  if (!(err <= tol * std::abs(value)))
    throw ConvergenceError(std::string(what) + ": estimated relative error " +
                               std::to_string(err / std::abs(value)) + " above --tol",
                           value, err);
}

struct MomentsArgs {
  std::optional<double> k_min, k_max, L;
  int k_points = 0;
};

int cmd_moments(const Common& c, const MomentsArgs& a) {
  RunConfig cfg = c.config.empty() ? RunConfig() : RunConfig::load(c.config);
  const UnitSystem units = cfg.units();
  const double L = a.L ? *a.L : cfg.has("L") ? cfg.number("L") : cfg.region().width();
  const double k_min = a.k_min ? *a.k_min : cfg.number("k_min");
  const double k_max = a.k_max ? *a.k_max : cfg.number_or("k_max", k_min);
  int n = a.k_points > 0 ? a.k_points : cfg.integer_or("k_points", k_max > k_min ? 200 : 1);
  if (!(L > 0.0)) throw ConfigError("moments: L must be positive");
  if (!(k_min > 0.0) || k_max < k_min) throw ConfigError("moments: need 0 < k-min <= k-max");
  if (k_max == k_min) n = 1;
  const Region region(0.0, L);

  const auto dir = prepare_out(c.out);
  CsvWriter csv((dir / "moments.csv").string(), {"k", "T_kk", "T2_kk", "T3_kk", "pm_third", "Tkk_squared"});
  json rows = json::array();
  for (double k : linspace(k_min, k_max, n)) {
    const auto d = onshell_moments(k, region, units);
    const double pm3 = pm_third_moment(k, region, units);
    csv.row({k, d.m1, d.m2, d.m3, pm3, d.m1 * d.m1});
    rows.push_back({{"k", k},
                    {"T_kk", d.m1},
                    {"T2_kk", d.m2},
                    {"T3_kk", d.m3},
                    {"pm_third", pm3},
                    {"Tkk_squared", d.m1 * d.m1},
                    {"t_plus", d.t_plus},
                    {"t_minus", d.t_minus},
                    {"degenerate", dwell_eigenvalues(k, region, units).degenerate}});
  }
  write_json(dir / "moments.json",
             {{"L", L}, {"hbar", units.hbar}, {"mass", units.mass}, {"rows", rows}});
  return kExitOk;
}

int cmd_distribution(const Common& c) {
  if (c.config.empty()) throw ConfigError("distribution: --config is required");
  const RunConfig cfg = RunConfig::load(c.config);
  const UnitSystem units = cfg.units();
  const Region region = cfg.region();
  const auto psi = cfg.packet().amplitude();

  const double overlap = initial_overlap(psi, region, units);
  if (overlap > 1e-8)
    throw ConfigError("distribution: packet initially inside the region (overlap " +
                      std::to_string(overlap) + ")");

  CorrelationOptions opts;
  opts.tau_min_cutoff = cfg.number_or("tau_cutoff", 0.0);
  // Quadrature targets stop at what double precision supports; a stricter
  // --tol then fails the check below instead of grinding.
  const double quad_tol = std::clamp(0.1 * c.tol, 1e-10, 1e-7);
  opts.tau_rel_tol = quad_tol;
  const CorrelationFunction C(psi, region, units, opts);
  const DwellDistribution Pi(psi, region, units);

  const auto hump = C.hump();
  const auto mC = C.moments();
  const auto m1Pi = Pi.moment(1, std::max(0.1 * c.tol, 1e-12));
  const auto m2Pi = Pi.moment(2, std::max(0.1 * c.tol, 1e-12));
  check_tolerance("moment1_C", mC[1].value, mC[1].est_error, c.tol);
  check_tolerance("moment2_C", mC[2].value, mC[2].est_error, c.tol);
  check_tolerance("moment1_Pi", m1Pi.value, m1Pi.est_error, c.tol);
  check_tolerance("moment2_Pi", m2Pi.value, m2Pi.est_error, c.tol);

  const double tau_lo = cfg.number_or("tau_min", C.tau_min_cutoff());
  const double tau_hi = cfg.number_or("tau_max", 1.05 * hump.tau_right);
  const int points = cfg.integer_or("tau_points", 1000);
  if (tau_lo < C.tau_min_cutoff())
    throw ConfigError("distribution: tau_min below the cutoff " + std::to_string(C.tau_min_cutoff()));
  const auto grid = linspace(tau_lo, tau_hi, points);
  const bool covered = grid.front() <= hump.tau_left && grid.back() >= hump.tau_right;

  const auto dir = prepare_out(c.out);
  CsvWriter csv((dir / "distribution.csv").string(), {"tau", "Pi", "pi", "C"});
  for (double t : grid)
    csv.row({t, Pi(t), heuristic_distribution(psi, region, units, t), C(t)});

  json summary = {
      {"hump_area", hump.area},
      {"hump_area_error", hump.est_error},
      {"hump_tau_left", hump.tau_left},
      {"hump_tau_peak", hump.tau_peak},
      {"hump_tau_right", hump.tau_right},
      {"moment0_C", mC[0].value},
      {"moment0_C_error", mC[0].est_error},
      {"moment1_Pi", m1Pi.value},
      {"moment1_Pi_error", m1Pi.est_error},
      {"moment1_C", mC[1].value},
      {"moment1_C_error", mC[1].est_error},
      {"moment2_Pi", m2Pi.value},
      {"moment2_Pi_error", m2Pi.est_error},
      {"moment2_C", mC[2].value},
      {"moment2_C_error", mC[2].est_error},
      {"moment1_closed_form", wavepacket_dwell_moments(psi, region, units, 1)},
      {"moment2_closed_form", wavepacket_dwell_moments(psi, region, units, 2)},
      {"tau_min_cutoff", C.tau_min_cutoff()},
      {"tau_max", C.tau_max()},
      {"initial_overlap", number(overlap)},
      {"coverage_complete", covered},
  };
  write_json(dir / "summary.json", summary);
  if (!covered) std::cerr << "warning: tau grid does not cover the hump [" << hump.tau_left << ", "
                          << hump.tau_right << "]\n";
  return kExitOk;
}

int cmd_approx_error(const Common& c, std::vector<double> dks, int basis_order) {
  if (c.config.empty()) throw ConfigError("approx-error: --config is required");
  const RunConfig cfg = RunConfig::load(c.config);
  if (dks.empty()) dks = cfg.list("dk_list");
  if (basis_order < 0) basis_order = cfg.integer_or("basis_order", 0);
  if (basis_order < 0 || basis_order > kMaxBasisOrder) throw ConfigError("approx-error: bad basis order");
  const UnitSystem units = cfg.units();
  const Region region = cfg.region();

  const auto dir = prepare_out(c.out);
  std::vector<std::string> header = {"dk", "relative_error"};
  if (basis_order > 0) header.push_back("relative_error_c0_c1");
  CsvWriter csv((dir / "approx_error.csv").string(), header);
  json rows = json::array();
  for (double dk : dks) {
    const auto psi = cfg.packet_with_dk(dk).amplitude();
    const double overlap = initial_overlap(psi, region, units);
    if (overlap > 1e-8)
      throw ConfigError("approx-error: packet initially inside the region for dk = " + format_number(dk));
    const auto e = approximation_error(psi, region, units, basis_order);
    std::vector<double> row = {dk, e.rel_error_c0};
    if (basis_order > 0) row.push_back(e.rel_error_c01);
    csv.row(row);
    rows.push_back({{"dk", dk},
                    {"tau_d", e.tau_d},
                    {"moment1_C0", e.moment_c0},
                    {"moment1_C0_C1", e.moment_c01},
                    {"relative_error", e.rel_error_c0},
                    {"relative_error_c0_c1", e.rel_error_c01},
                    {"flux_mass_x1", e.flux_mass_x1},
                    {"flux_mass_x2", e.flux_mass_x2}});
  }
  write_json(dir / "approx_error.json", {{"basis_order", basis_order}, {"rows", rows}});
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dwell-time distributions and flux-flux correlation functions for free wavepackets"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "Configuration file (key = value or JSON)");
    sub->add_option("--out", common.out, "Output directory")->capture_default_str();
    sub->add_option("--tol", common.tol, "Relative tolerance for reported moments")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
  };

  MomentsArgs margs;
  auto* moments = app.add_subcommand("moments", "On-shell dwell moments on a k-grid");
  add_common(moments);
  moments->add_option("--k-min", margs.k_min, "Smallest k");
  moments->add_option("--k-max", margs.k_max, "Largest k");
  moments->add_option("--L", margs.L, "Region width");
  moments->add_option("--k-points", margs.k_points, "Number of k values");

  auto* distribution = app.add_subcommand("distribution", "Pi(tau), pi(tau) and C(tau) for a packet");
  add_common(distribution);

  std::vector<double> dks;
  int basis_order = -1;
  auto* approx = app.add_subcommand("approx-error", "First-moment error of the product approximation");
  add_common(approx);
  approx->add_option("--dk", dks, "Momentum widths (overrides dk_list)")->delimiter(',');
  approx->add_option("--basis-order", basis_order, "Orthogonal-complement order for C1 (0 = C0 only)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*moments) return cmd_moments(common, margs);
    if (*distribution) return cmd_distribution(common);
    if (*approx) return cmd_approx_error(common, dks, basis_order);
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
