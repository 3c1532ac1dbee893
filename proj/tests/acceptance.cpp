// Acceptance checks. Each criterion prints one PASS/FAIL line with the
// measured quantities; `acceptance <id>...` runs a subset, no arguments
// runs everything. Exit status is nonzero if any selected criterion fails.

#include "qtransport/observables.hpp"
#include "qtransport/scenarios.hpp"
#include "qtransport/solvers.hpp"
#include "qtransport/toymodel.hpp"

#include "rates_reference.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace qtransport;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << (ok ? "" : "[fail] ") << what;
  }
};

std::string num(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Scenario ring(RingKind kind) { return ring_preset(kind).scenario(to_string(kind)); }

struct Curve {
  std::vector<double> tau;
  std::vector<double> chi;
  std::vector<SweepPoint> points;
};

const Curve& profile_curve(RingKind kind) {
  static std::map<RingKind, Curve> cache;
  auto it = cache.find(kind);
  if (it != cache.end()) return it->second;
  Curve c;
  c.tau = default_tau_grid();
  c.points = sweep_temperature(ring(kind), c.tau);
  for (const auto& p : c.points) {
    if (!p.report) throw std::runtime_error(to_string(kind) + " sweep point failed: " + p.error);
    c.chi.push_back(p.report->chi);
  }
  return cache.emplace(kind, std::move(c)).first->second;
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

// index of the first rise larger than `slack`, or size() when none
std::size_t first_rise(const std::vector<double>& v, double slack) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (v[k] > v[k - 1] + slack) return k;
  return v.size();
}

DensityMatrix random_state(std::size_t n, std::mt19937& rng) {
  std::normal_distribution<double> normal;
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
  Eigen::MatrixXcd a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = cplx(normal(rng), normal(rng));
  Eigen::MatrixXcd rho = a * a.adjoint();
  return DensityMatrix(rho / rho.trace());
}

// ---------------------------------------------------------------------------

void thermalization(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  NetworkSpec spec;
  spec.emitters.push_back({Vec3::Zero(), 1, Role::plain});
  double worst = 0.0;
  for (double n : {0.0, 0.5, 1.0, 5.0}) {
    const auto table = build_coupling_table(spec, BathSpec::from_occupation(n));
    const auto ss = steady_state(assemble(table, {}, {0, 0}));
    // detailed balance: n (1 - p) = (1 + n) p
    worst = std::max(worst, std::abs(ss.rho.population(0) - n / (1.0 + 2.0 * n)));
  }
  const double t = seconds_since(t0);
  o.require(worst < 1e-8, "max |p - n/(1+2n)| = " + num(worst) + " (tol 1e-8, n in {0,0.5,1,5})");
  o.require(t < 1.0, "runtime " + num(t, 3) + " s (limit 1 s)");
}

void invariants(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937 rng(2024);
  double trace_err = 0.0, herm_err = 0.0, min_eig = 1.0;
  std::size_t count = 0;
  for (auto kind : {RingKind::RP, RingKind::CH, RingKind::NH}) {
    const auto s = ring(kind);
    const auto sites = resolve_drive_sites(s.network);
    for (double tau : log_grid(0.05, 5.0, 5)) {
      const auto table = build_coupling_table(s.network, BathSpec::from_reduced_temperature(tau));
      const auto l = assemble(table, s.drive, sites, s.options);
      double scale = 0.0;
      for (Eigen::Index k = 0; k < l.matrix.nonZeros(); ++k) scale = std::max(scale, std::abs(l.matrix.valuePtr()[k]));
      trace_err = std::max(trace_err, trace_annihilation_error(l) / scale);
      for (int trial = 0; trial < 3; ++trial) {
        const Eigen::MatrixXcd x = random_state(5, rng).matrix() * cplx(1.0, 0.3) +
                                   random_state(5, rng).matrix() * cplx(0.0, 1.0);
        const Eigen::MatrixXcd lx = qtransport::apply(l, x);
        const Eigen::MatrixXcd lxd = qtransport::apply(l, Eigen::MatrixXcd(x.adjoint()));
        herm_err = std::max(herm_err, (lxd - lx.adjoint()).norm() / lx.norm());
      }
      min_eig = std::min(min_eig, steady_state(l).rho.min_eigenvalue());
      ++count;
    }
  }
  const double t = seconds_since(t0);
  o.require(trace_err < 1e-14, "trace annihilation " + num(trace_err) + " relative to max|L| (tol 1e-14)");
  o.require(herm_err < 1e-13, "Hermiticity preservation " + num(herm_err) + " relative (tol 1e-13)");
  o.require(min_eig >= -1e-8, "min steady-state eigenvalue " + num(min_eig) + " (>= -1e-8)");
  o.detail << "; " << count << " generators (RP/CH/NH x 5 tau)";
  o.require(t < 30.0, "runtime " + num(t, 3) + " s (limit 30 s)");
}

void rate_formulas(Outcome& o) {
  double worst = 0.0, worst_x = 0.0;
  std::size_t below = 0;
  for (int k = 0; k < 1000; ++k) {
    const double x = std::pow(10.0, -4.0 + 7.0 * k / 999.0);
    if (x < 1e-2) ++below;
    const auto ref = testing::reference_rates(x);
    const auto a = alpha_coefficients(x);
    for (auto [got, want] : {std::pair{a.alpha1, ref.alpha1}, std::pair{a.alpha2, ref.alpha2},
                             std::pair{dipole_f(x), ref.f}, std::pair{dipole_g(x), ref.g}}) {
      const double rel = std::abs(got - want) / std::abs(want);
      if (rel > worst) worst = rel, worst_x = x;
    }
  }
  o.require(worst < 1e-12, "max relative error " + num(worst) + " at x = " + num(worst_x) +
                               " over 1000 points in [1e-4, 1e3], " + std::to_string(below) +
                               " below 1e-2 (tol 1e-12)");
  const auto small = alpha_coefficients(1e-4);
  const double lim = std::max(std::abs(small.alpha1 - 1.0), std::abs(small.alpha2 - 1.0));
  o.require(lim < 1e-6, "|alpha(1e-4) - 1| = " + num(lim) + " (tol 1e-6)");
}

void toy_oracle(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const double g = 0.5;
  const auto nh = log_grid(1e-3, 1e2, 20);
  double worst = 0.0;
  bool interior = true;
  std::ostringstream peaks;
  for (double nb : {0.0, 0.1, 0.5}) {
    std::vector<double> mag;
    for (double h : nh) {
      const toy::ToyParams p{h, nb, g};
      const double c = toy::coherence_closed_form(p);
      worst = std::max(worst, std::abs(c - toy::coherence_numeric(p)));
      mag.push_back(std::abs(c));
    }
    // largest |c| on the hot branch n_h > n_B must sit strictly inside it
    std::size_t lo = 0;
    while (lo < nh.size() && nh[lo] <= nb) ++lo;
    const std::vector<double> hot(mag.begin() + static_cast<std::ptrdiff_t>(lo), mag.end());
    const std::size_t k = argmax(hot);
    const auto opt = toy::optimal_hot_occupation(nb, g);
    const bool bracketed = k > 0 && k + 1 < hot.size() && opt.n_h > nh[lo + k - 1] && opt.n_h < nh[lo + k + 1];
    interior = interior && bracketed;
    peaks << " n_B=" << nb << ": n_h*=" << num(opt.n_h) << " |c*|=" << num(std::abs(opt.coherence))
          << " |c(0)|=" << num(std::abs(toy::coherence_closed_form({0.0, nb, g})))
          << " |c(10 n_h*)|=" << num(std::abs(toy::coherence_closed_form({10.0 * opt.n_h, nb, g})));
  }
  const double t = seconds_since(t0);
  o.require(worst < 1e-8, "max |closed form - numeric| = " + num(worst) + " on 3x20 grid (tol 1e-8)");
  o.require(interior, "interior maximum of |c| over n_h > n_B:" + peaks.str());
  o.require(t < 10.0, "runtime " + num(t, 3) + " s (limit 10 s)");
}

void temperature_profiles(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& nh = profile_curve(RingKind::NH);
  const auto& rp = profile_curve(RingKind::RP);
  const auto& ch = profile_curve(RingKind::CH);
  const double t = seconds_since(t0);
  const double slack = 1e-9;

  const std::size_t k = argmax(nh.chi);
  o.require(k > 0 && k + 1 < nh.chi.size() && nh.chi[k] > 3.0,
            "(a) NH peak chi = " + num(nh.chi[k]) + " at tau = " + num(nh.tau[k]) + " (interior, > 3)");

  const std::size_t r = first_rise(rp.chi, slack);
  const bool rp_drop = rp.chi.back() < 0.1 * rp.chi.front();
  o.require(r == rp.chi.size() && rp_drop,
            "(b) RP chi " + num(rp.chi.front()) + " -> " + num(rp.chi.back()) +
                (r == rp.chi.size() ? std::string(", monotone")
                                    : ", rises at tau = " + num(rp.tau[r]) + " (min " +
                                          num(*std::min_element(rp.chi.begin(), rp.chi.end())) + ")"));

  const std::size_t c = first_rise(ch.chi, slack);
  o.require(c == ch.chi.size(),
            "(c) CH chi " + num(ch.chi.front()) + " -> " + num(ch.chi.back()) +
                (c == ch.chi.size() ? std::string(", monotone")
                                    : ", rises at tau = " + num(ch.tau[c]) + " from " +
                                          num(ch.chi[c - 1]) + " to " + num(ch.chi[c])));
  o.require(t < 300.0, "runtime " + num(t, 3) + " s for 3 x 40 points (limit 300 s)");
}

void angle_optimum(Outcome& o) {
  const auto thetas = linear_grid(0.0, 0.6, 13);
  const auto taus = default_tau_grid();
  const auto pts = sweep_angle(ring_preset(RingKind::NH), "p", thetas, taus);
  double best = -1e300, best_theta = 0.0, best_tau = 0.0;
  std::size_t failed = 0;
  for (const auto& p : pts) {
    if (!p.report) {
      ++failed;
      continue;
    }
    if (p.report->chi > best) best = p.report->chi, best_theta = p.parameter, best_tau = p.secondary;
  }
  double nearest = thetas.front();
  for (double th : thetas)
    if (std::abs(th - preset_displacement) < std::abs(nearest - preset_displacement)) nearest = th;
  o.require(failed == 0, std::to_string(failed) + " failed points of " + std::to_string(pts.size()));
  o.require(std::abs(best_theta - nearest) < 1e-12,
            "global max chi = " + num(best) + " at theta_p = " + num(best_theta) + ", tau = " +
                num(best_tau) + " (expected theta_p = " + num(nearest) + ")");
}

void transient(Outcome& o) {
  const auto& curve = profile_curve(RingKind::NH);
  const double tau = curve.tau[argmax(curve.chi)];
  const auto bath = BathSpec::from_reduced_temperature(tau);

  const auto nh = ring(RingKind::NH);
  const auto grid = log_time_grid(0.01, 2000.0, 60);
  const auto t0 = std::chrono::steady_clock::now();
  const auto dyn = solve_dynamics(nh, bath, grid);
  const double t_nh = seconds_since(t0);
  double t_cross = -1.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (dyn.chi_flux[k] > 1.0) {
      t_cross = grid[k];
      break;
    }
  }
  o.require(t_cross > 0.0 && t_cross <= 200.0,
            "NH tau = " + num(tau) + ": chi(t) > 1 first at grid time " + num(t_cross) + " (<= 200)");
  const auto ss = solve_stationary(nh, bath);
  const double td = trace_distance(dyn.pumped.states.back(), ss.pumped.rho);
  o.require(td < 1e-6, "trace distance to steady state at t = 2000: " + num(td) + " (tol 1e-6), chi(2000) = " +
                           num(dyn.chi_flux.back()) + " vs chi_stat = " + num(ss.report.chi));

  const auto ch = ring(RingKind::CH);
  const auto ch_ss = solve_stationary(ch, bath);
  const auto ch_dyn = solve_dynamics(ch, bath, log_time_grid(0.01, 10.0, 30));
  const double chi10 = ch_dyn.chi_flux.back();
  const double rel = std::abs(chi10 - ch_ss.report.chi) / std::abs(ch_ss.report.chi);
  o.require(rel < 0.1, "CH plateau: |chi(10) - chi_stat| / chi_stat = " + num(rel) + " (chi(10) = " +
                           num(chi10) + ", chi_stat = " + num(ch_ss.report.chi) + ", tol 0.1)");
  o.detail << "; NH trajectory " << num(t_nh, 3) << " s";
}

void seven_site(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  ImportedScenario imp;
  imp.path = QTRANSPORT_DATA_DIR "/fmo_approx.txt";
  const auto on = imp.scenario("on");
  auto off = on;
  off.options.terms.nonlocal = false;
  const auto taus = log_grid(0.05, 5.0, 20);
  const auto a = sweep_temperature(on, taus);
  const auto b = sweep_temperature(off, taus);
  std::vector<double> chi_on;
  std::size_t below = 0;
  double first_below = -1.0;
  for (std::size_t k = 0; k < taus.size(); ++k) {
    if (!a[k].report || !b[k].report) throw std::runtime_error("seven-site point failed: " + a[k].error + b[k].error);
    chi_on.push_back(a[k].report->chi);
    if (!(a[k].report->chi > b[k].report->chi)) {
      if (below++ == 0) first_below = taus[k];
    }
  }
  const std::size_t k = argmax(chi_on);
  o.require(below == 0, "on > off at " + std::to_string(taus.size() - below) + "/" + std::to_string(taus.size()) +
                            " tau" + (below ? " (off exceeds on from tau = " + num(first_below) + ")" : ""));
  o.require(k > 0 && k + 1 < chi_on.size(),
            "on-curve peak chi = " + num(chi_on[k]) + " at tau = " + num(taus[k]) + " (interior)");
  o.detail << "; approximate coordinates, runtime " << num(seconds_since(t0), 3) << " s (target 1200 s)";
}

void energy_balance(Outcome& o) {
  double rate = 0.0, channels = 0.0, closure = 0.0;
  std::size_t states = 0;
  for (auto kind : {RingKind::RP, RingKind::CH, RingKind::NH}) {
    const auto s = ring(kind);
    const auto sites = resolve_drive_sites(s.network);
    DriveSpec drive0 = s.drive;
    drive0.gamma_in = 0.0;
    for (const auto& p : profile_curve(kind).points) {
      const auto& r = *p.report;
      rate = std::max(rate, std::abs(r.energy_rate));
      channels = std::max(channels, r.stationarity_error());
      closure = std::max(closure, r.balance_error());
      // the pump-off states behind E0
      const auto table = build_coupling_table(s.network, BathSpec::from_occupation(p.occupation));
      const auto l0 = assemble(table, drive0, sites, s.options);
      const auto base = steady_state(l0).rho;
      rate = std::max(rate, std::abs(energy_rate(l0, base)));
      for (std::size_t j = 0; j < s.network.size(); ++j)
        channels = std::max(channels, std::abs(site_energy_rate(l0, base, j)));
      states += 2;
    }
  }
  o.require(rate < 1e-10, "max |Tr(H_a L rho)| = " + num(rate) + " (tol 1e-10)");
  o.require(channels < 1e-9, "max per-site channel sum " + num(channels) + " (tol 1e-9)");
  o.require(closure < 1e-9, "channel decomposition vs generator " + num(closure) + " (tol 1e-9)");
  o.detail << "; " << states << " steady states (RP/CH/NH x 40 tau, pumped and pump-off)";
}

void path_decomposition(Outcome& o) {
  auto at_peak = [](RingKind kind) {
    const auto& c = profile_curve(kind);
    return c.points[argmax(c.chi)];
  };
  const auto nh = at_peak(RingKind::NH);
  const auto ch = at_peak(RingKind::CH);
  const auto& nr = *nh.report;
  const auto& cr = *ch.report;
  o.require(nr.paths[0].nu > nr.paths[0].eta, "NH peak tau = " + num(nh.parameter) + ": nu_p2,35 = " +
                                                  num(nr.paths[0].nu) + " > eta_p2,35 = " + num(nr.paths[0].eta));
  o.require(cr.paths[0].eta > cr.paths[0].nu && std::abs(cr.paths[0].nu) < 0.05,
            "CH peak tau = " + num(ch.parameter) + ": eta_p2,35 = " + num(cr.paths[0].eta) + ", |nu_p2,35| = " +
                num(std::abs(cr.paths[0].nu)) + " (< 0.05)");
  for (const auto* p : {&nh, &ch}) {
    const auto& r = *p->report;
    const double rel = std::abs(r.paths[1].eta - r.chi) / std::abs(r.chi);
    o.require(rel < 0.25, "eta_35,e = " + num(r.paths[1].eta) + " vs chi = " + num(r.chi) + " (rel " + num(rel) +
                              ", tol 0.25)");
  }
  const auto& other = profile_curve(RingKind::CH).points[argmax(profile_curve(RingKind::NH).chi)];
  o.detail << "; CH at the NH peak tau: nu_p2,35 = " << num(other.report->paths[0].nu)
           << ", chi = " << num(other.report->chi);
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"thermalization", thermalization},
      {"invariants", invariants},
      {"rates", rate_formulas},
      {"toy", toy_oracle},
      {"temperature_profiles", temperature_profiles},
      {"angle_optimum", angle_optimum},
      {"transient", transient},
      {"seven_site", seven_site},
      {"energy_balance", energy_balance},
      {"path_decomposition", path_decomposition},
  };
  std::vector<std::string> selected(argv + 1, argv + argc);
  if (selected.empty())
    for (const auto& c : criteria) selected.push_back(c.first);

  int failures = 0;
  for (const auto& id : selected) {
    const auto it = std::find_if(criteria.begin(), criteria.end(), [&](const auto& c) { return c.first == id; });
    if (it == criteria.end()) {
      std::cerr << "unknown criterion '" << id << "'\n";
      return 2;
    }
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      it->second(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << id << ": " << o.detail.str() << " [" << num(seconds_since(t0), 3)
              << " s]" << std::endl;
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
