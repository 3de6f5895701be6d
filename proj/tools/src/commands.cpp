#include "commands.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "weaktime/arrival.hpp"
#include "weaktime/errors.hpp"
#include "weaktime/numerics.hpp"
#include "weaktime/scattering.hpp"
#include "weaktime/time_densities.hpp"
#include "weaktime/two_level.hpp"
#include "weaktime/wavepacket.hpp"
#include "weaktime/weak_sim.hpp"

namespace weaktime::cli {

namespace {

// Builds a core object, reporting invariant violations as configuration errors.
template <class F>
auto checked(const std::string& section, F&& make) {
  try {
    return make();
  } catch (const DomainError& e) {
    throw ConfigError(section + ": " + e.what());
  }
}

Units units_from(const Config& cfg) {
  Units u{cfg.get_double("units.hbar", 1.0), cfg.get_double("units.mass", 1.0)};
  checked("units", [&] {
    u.validate();
    return 0;
  });
  return u;
}

Barrier barrier_from(const Config& cfg, const Units& u) {
  const std::string type = cfg.get_string("barrier.type");
  if (type == "free") return Barrier::free(u);
  if (type == "delta") {
    const double strength = cfg.get_double("barrier.strength");
    return checked("barrier", [&] { return Barrier::delta(strength, u); });
  }
  if (type == "rectangular") {
    const double height = cfg.get_double("barrier.height");
    const double width = cfg.get_double("barrier.width");
    return checked("barrier", [&] { return Barrier::rectangular(height, width, u); });
  }
  throw ConfigError("barrier.type: expected free, delta or rectangular, got '" + type + "'");
}

GaussianPacket packet_from(const Config& cfg, const Units& u) {
  const double p = cfg.get_double("packet.p_mean");
  const double sigma = cfg.get_double("packet.sigma");
  const auto x0 = cfg.get_optional("packet.x0");
  return checked("packet", [&] { return GaussianPacket(p, sigma, x0, u); });
}

DensityOptions density_options(const Config& cfg, const RunOptions& run) {
  DensityOptions o;
  o.tolerance = run.tolerance ? *run.tolerance : cfg.get_double("quad.tolerance", 1e-8);
  if (!(o.tolerance > 0.0 && o.tolerance < 1.0)) {
    throw ConfigError(std::string(run.tolerance ? "--tolerance" : "quad.tolerance") + ": must lie in (0, 1)");
  }
  const long panels = cfg.get_int("quad.max_panels", 20000);
  if (panels < 2) throw ConfigError("quad.max_panels: must be at least 2");
  o.max_panels = static_cast<std::size_t>(panels);
  return o;
}

std::vector<double> make_grid(double lo, double hi, long n, const std::string& prefix, bool log_spacing = false) {
  if (n < 1) throw ConfigError(prefix + ".points: grid is empty");
  if (n > 10000000) throw ConfigError(prefix + ".points: too many points");
  if (n > 1 && !(hi > lo)) throw ConfigError(prefix + ".max: must exceed " + prefix + ".min");
  if (log_spacing && !(lo > 0.0)) throw ConfigError(prefix + ".min: must be positive for log spacing");
  std::vector<double> g(static_cast<std::size_t>(n));
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  for (long i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(n - 1);
    g[static_cast<std::size_t>(i)] = log_spacing ? lo * std::pow(hi / lo, s) : lo + (hi - lo) * s;
  }
  g.back() = hi;
  return g;
}

std::vector<std::string> echo_header(const std::string& command, const Config& cfg) {
  std::vector<std::string> h{"weaktime " + command};
  for (const auto& [key, value] : cfg.values()) h.push_back(key + " = " + value);
  return h;
}

std::string kv(const std::string& key, double value) { return key + " = " + format_real(value); }

TwoLevelConfig two_level_from(const Config& cfg, const Units& u) {
  TwoLevelConfig tc;
  tc.omega = cfg.get_double("twolevel.omega");
  tc.v = std::polar(cfg.get_double("twolevel.v"), cfg.get_double("twolevel.v_phase", 0.0));
  tc.hbar = u.hbar;
  checked("twolevel", [&] {
    tc.validate();
    return 0;
  });
  return tc;
}

}  // namespace

ResultTable cmd_times(const Config& cfg, const RunOptions& run) {
  const Units u = units_from(cfg);
  const Barrier barrier = barrier_from(cfg, u);
  const GaussianPacket packet = packet_from(cfg, u);
  const auto grid = make_grid(cfg.get_double("grid.min"), cfg.get_double("grid.max"), cfg.get_int("grid.points"),
                              "grid");
  const auto opts = density_options(cfg, run);

  const TimeDensities td(packet, barrier, opts);
  const auto prof = td.profile(grid, run.threads);

  ResultTable t;
  t.header = echo_header("times", cfg);
  t.columns = {"x", "tau_dw", "tau_tun", "tau_corr", "tau_refl"};
  t.units = {"length", "time/length", "time/length", "time/length", "time/length"};
  for (const auto& p : prof.points) t.add_row({p.x, p.dwell, p.tunnel, p.correction, p.reflect});

  const double E = 0.5 * packet.p_mean() * packet.p_mean() / u.mass;
  t.footer = {kv("T", prof.T), kv("R", prof.R), kv("t_T^Ph", phase_time(barrier, E)),
              kv("t_T^Im", imaginary_time(barrier, E))};
  return t;
}

ResultTable cmd_asymptotic(const Config& cfg, const RunOptions& run) {
  const Units u = units_from(cfg);
  const Barrier barrier = barrier_from(cfg, u);
  const GaussianPacket packet = packet_from(cfg, u);
  const auto opts = density_options(cfg, run);

  std::vector<double> x2s;
  if (cfg.has("asymptotic.x2")) {
    x2s = cfg.get_list("asymptotic.x2");
  } else {
    x2s = {-packet.x0()};
  }
  std::sort(x2s.begin(), x2s.end());
  for (double x2 : x2s) {
    if (!(x2 > barrier.width())) throw ConfigError("asymptotic.x2: must lie to the right of the barrier");
  }

  const TimeDensities td(packet, barrier, opts);
  ResultTable t;
  t.header = echo_header("asymptotic", cfg);
  t.columns = {"x2",          "t_tun_re",        "t_tun_im",         "flight_time",
               "t_tun_minus_flight", "phase_time", "packet_phase_time", "imaginary_time",
               "correction_integral", "correction_packet_zone", "correction_barrier_region"};
  t.units = {"length", "time", "time", "time", "time", "time", "time", "time", "time", "time", "time"};
  for (double x2 : x2s) {
    const auto a = td.asymptotic(x2);
    t.add_row({a.x2, a.tunneling_time.real(), a.tunneling_time.imag(), a.flight_time,
               a.tunneling_time.real() - a.flight_time, a.phase_time, a.packet_phase_time, a.imaginary_time,
               a.correction_integral, a.correction_packet_zone, a.correction_barrier_region});
  }
  t.footer = {kv("T", td.T()), kv("R", td.R())};
  return t;
}

ResultTable cmd_twolevel(const Config& cfg, const RunOptions&) {
  const Units u = units_from(cfg);
  const TwoLevelConfig tc = two_level_from(cfg, u);
  const auto grid = make_grid(cfg.get_double("twolevel.t_min", 0.0), cfg.get_double("twolevel.t_max"),
                              cfg.get_int("twolevel.points"), "twolevel");
  if (grid.front() < 0.0) throw ConfigError("twolevel.t_min: must be non-negative");

  ResultTable t;
  t.header = echo_header("twolevel", cfg);
  t.header.push_back(kv("Omega", tc.Omega()));
  t.header.push_back("tau0_c1_level1 is derived by completeness as t - tau0_c1_level0");
  t.columns = {"t", "tau0", "tau1", "tau1_c1", "tau0_c1_level0", "tau0_c1_level1", "tau0_c2"};
  t.units = {"time", "time", "time", "time", "time", "time", "time"};
  for (const auto& r : time_table(tc, grid)) {
    t.add_row({r.t, r.tau0, r.tau1, r.tau1_c1, r.tau0_c1_level0, r.tau0_c1_level1, r.tau0_c2});
    if (r.singular) t.footer.push_back("singular " + kv("t", r.t));
  }
  return t;
}

ResultTable cmd_arrival(const Config& cfg, const RunOptions&) {
  const Units u = units_from(cfg);
  const std::string sweep = cfg.get_string("arrival.sweep", "momentum");
  const std::string spacing = cfg.get_string("arrival.spacing", sweep == "dt" ? "log" : "linear");
  if (spacing != "linear" && spacing != "log") throw ConfigError("arrival.spacing: expected linear or log");
  const auto grid = make_grid(cfg.get_double("arrival.min"), cfg.get_double("arrival.max"),
                              cfg.get_int("arrival.points"), "arrival", spacing == "log");

  ArrivalConfig ac{cfg.get_double("arrival.X", 0.0), 1.0, u.hbar, u.mass};
  ResultTable t;
  t.header = echo_header("arrival", cfg);
  t.units = {"", "1/time", "1/time", "1/time"};
  if (sweep == "momentum") {
    ac.dt = cfg.get_double("arrival.dt");
    checked("arrival", [&] {
      ac.validate();
      return 0;
    });
    t.columns = {"p", "re_pi", "im_pi", "classical_j_plus"};
    t.units[0] = "momentum";
    for (double p : grid) {
      const cplx v = pi_diagonal(p, ac);
      t.add_row({p, v.real(), v.imag(), std::max(p, 0.0) / u.mass});
    }
  } else if (sweep == "dt") {
    const double p = cfg.get_double("arrival.p");
    t.columns = {"dt", "re_pi", "im_pi", "classical_j_plus"};
    t.units[0] = "time";
    for (double dt : grid) {
      ac.dt = dt;
      checked("arrival", [&] {
        ac.validate();
        return 0;
      });
      const cplx v = pi_diagonal(p, ac);
      t.add_row({dt, v.real(), v.imag(), std::max(p, 0.0) / u.mass});
    }
  } else if (sweep == "time") {
    // Packet arriving at X; the grid doubles as the normalization window.
    ac.dt = cfg.get_double("arrival.dt");
    checked("arrival", [&] {
      ac.validate();
      return 0;
    });
    const MomentumPacket pk{cfg.get_double("arrival.packet_p_mean"), cfg.get_double("arrival.packet_sigma"),
                            cfg.get_double("arrival.packet_x0"), 0.0};
    checked("arrival", [&] {
      pk.validate();
      return 0;
    });
    const auto rho = free_gaussian_ensemble(pk.x0, u.hbar / (2.0 * pk.sigma), pk.p_mean, pk.sigma, u.mass);
    t.columns = {"t", "re_pi", "im_pi", "classical_j_plus", "re_pi_normalized", "classical_j_plus_normalized"};
    t.units = {"time", "1/time", "1/time", "1/time", "1/time", "1/time"};
    std::vector<std::array<double, 4>> raw;
    for (double time : grid) {
      MomentumPacket at = pk;
      at.time = time;
      const auto a = arrival_distribution(at, ac);
      raw.push_back({time, a.pi1, a.pi2, classical_arrival(rho, ac.X, time, Side::plus, u.mass)});
    }
    auto window_integral = [&](int col) {
      double s = 0.0;
      for (std::size_t i = 1; i < raw.size(); ++i) s += 0.5 * (raw[i][0] - raw[i - 1][0]) * (raw[i][col] + raw[i - 1][col]);
      return s;
    };
    const double n_pi = window_integral(1);
    const double n_cl = window_integral(3);
    if (raw.size() < 2 || !(n_pi != 0.0) || !(n_cl > 0.0)) {
      throw DomainError("arrival: nothing arrives inside the time window");
    }
    for (const auto& r : raw) t.add_row({r[0], r[1], r[2], r[3], r[1] / n_pi, r[3] / n_cl});
    t.footer = {kv("window_re_pi", n_pi), kv("window_classical_j_plus", n_cl),
                kv("resolution_bound", resolution_bound(0.5 * pk.p_mean * pk.p_mean / u.mass, u.hbar))};
  } else {
    throw ConfigError("arrival.sweep: expected momentum, dt or time, got '" + sweep + "'");
  }
  return t;
}

ResultTable cmd_weak_sim(const Config& cfg, const RunOptions&) {
  const Units u = units_from(cfg);
  const TwoLevelConfig tc = two_level_from(cfg, u);
  const double tau = cfg.get_double("weak.tau");
  const double lambda = cfg.get_double("weak.lambda", 1e-3);
  const long levels = cfg.get_int("weak.levels", 3);
  if (levels < 2) throw ConfigError("weak.levels: need at least 2 coupling strengths to extrapolate");
  const long level = cfg.get_int("weak.level", 0);
  if (level != 0 && level != 1) throw ConfigError("weak.level: expected 0 or 1");
  const std::string final_state = cfg.get_string("weak.final", "none");
  if (final_state != "none" && final_state != "0" && final_state != "1") {
    throw ConfigError("weak.final: expected none, 0 or 1");
  }
  const double coefficient = cfg.get_double("weak.coefficient", 0.0);
  const double sigma_q = cfg.get_double("weak.sigma_q", 1.0);
  const double dt_post = cfg.get_double("weak.dt_post", 0.0);
  if (!(sigma_q > 0.0)) throw ConfigError("weak.sigma_q: must be positive");

  const FiniteSystem sys = two_level_system(tc.omega, tc.v, static_cast<int>(level), u.hbar);
  const DetectorState det =
      checked("weak", [&] { return DetectorState::gaussian(0.0, 0.0, sigma_q * sigma_q, -coefficient, u.hbar); });
  const Eigen::MatrixXcd B = final_state == "none" ? Eigen::MatrixXcd::Identity(2, 2)
                                                   : level_projector(final_state == "0" ? 0 : 1);
  checked("weak", [&] {
    CouplingConfig{lambda, tau}.validate();
    return 0;
  });

  const auto an = weak_value_analytic(sys, det, tau, B, dt_post);
  const double analytic = an.value * tau;

  std::vector<double> lambdas;
  std::vector<WeakSimResult> results;
  for (long k = 0; k < levels; ++k) {
    const double lam = lambda / std::ldexp(1.0, static_cast<int>(k));
    lambdas.push_back(lam);
    results.push_back(weak_value_conditional(sys, det, {lam, tau}, B, dt_post));
  }
  const double extrapolated = richardson_lambda(results[results.size() - 2].time, results.back().time);

  ResultTable t;
  t.header = echo_header("weak-sim", cfg);
  t.columns = {"lambda", "simulated", "analytic", "abs_error"};
  t.units = {"1/time", "time", "time", "time"};
  t.add_row({0.0, extrapolated, analytic, std::abs(extrapolated - analytic)});
  for (std::size_t k = lambdas.size(); k-- > 0;) {
    t.add_row({lambdas[k], results[k].time, analytic, std::abs(results[k].time - analytic)});
  }
  t.footer = {kv("postselection_probability", an.probability), kv("symmetric_part", an.symmetric * tau),
              kv("commutator_part", an.commutator * tau),
              kv("weakness_parameter", results.front().weakness_parameter),
              "slices = " + std::to_string(results.back().slices)};
  return t;
}

ResultTable cmd_validate(const Config& cfg, const RunOptions& run) {
  const long samples = cfg.get_int("validate.samples", 200);
  if (samples < 1) throw ConfigError("validate.samples: must be positive");
  std::mt19937_64 rng(run.seed);
  auto uniform = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };

  ResultTable t;
  t.header = echo_header("validate", cfg);
  t.header.push_back("seed = " + std::to_string(run.seed));
  t.columns = {"check", "passed", "measured", "bound"};
  t.units = {"", "", "", ""};
  auto record = [&](const std::string& name, double measured, double bound) {
    const double id = static_cast<double>(t.rows.size() + 1);
    t.add_row({id, measured <= bound ? 1.0 : 0.0, measured, bound});
    t.footer.push_back("check " + std::to_string(t.rows.size()) + ": " + name);
  };

  double dev = 0.0;
  for (long i = 0; i < samples; ++i) {
    const auto a = amplitudes(Barrier::delta(uniform(0.1, 5.0)), uniform(0.01, 10.0));
    dev = std::max(dev, std::abs(std::norm(a.t) + std::norm(a.r) - 1.0));
  }
  record("delta barrier unitarity", dev, 1e-10);

  dev = 0.0;
  for (long i = 0; i < samples; ++i) {
    const auto a = amplitudes(Barrier::rectangular(uniform(0.1, 5.0), uniform(0.1, 5.0)), uniform(0.01, 10.0));
    dev = std::max(dev, std::abs(std::norm(a.t) + std::norm(a.r) - 1.0));
  }
  record("rectangular barrier unitarity", dev, 1e-10);

  double refl = 0.0;
  double conj_dev = 0.0;
  for (long i = 0; i < samples; ++i) {
    const cplx z(uniform(-3.0, 3.0), uniform(-3.0, 3.0));
    const cplx a = erfc_complex(z);
    const cplx b = erfc_complex(-z);
    refl = std::max(refl, std::abs(a + b - 2.0) / (std::abs(a) + std::abs(b)));
    conj_dev = std::max(conj_dev, std::abs(erfc_complex(std::conj(z)) - std::conj(a)) / std::abs(a));
  }
  record("erfc(z) + erfc(-z) = 2", refl, 1e-13);
  record("erfc(conj z) = conj erfc(z)", conj_dev, 1e-13);

  double sum_dev = 0.0;
  double avg_dev = 0.0;
  double half_dev = 0.0;
  for (long i = 0; i < samples; ++i) {
    const TwoLevelConfig tc{uniform(0.1, 5.0), uniform(0.1, 3.0), 1.0};
    const double tm = uniform(0.0, 10.0);
    const auto d = dwell_times(tc, tm);
    sum_dev = std::max(sum_dev, std::abs(d.level0 + d.level1 - tm) / std::max(1.0, tm));
    double avg = 0.0;
    try {
      for (int f = 0; f < 2; ++f) {
        avg += occupation_probability(tc, tm, f) * conditional_components(tc, tm, f).tau1_level0;
      }
      avg_dev = std::max(avg_dev, std::abs(avg - d.level0) / std::max(1.0, tm));
      half_dev = std::max(half_dev, std::abs(conditional_components(tc, tm, 1).tau1_level0 - 0.5 * tm));
    } catch (const SingularityError&) {
    }
  }
  record("tau(0,t) + tau(1,t) = t", sum_dev, 1e-10);
  record("probability-weighted conditional times", avg_dev, 1e-10);
  record("tau_1^(1)(0,t) = t/2", half_dev, 1e-12);

  double diag_dev = 0.0;
  for (long i = 0; i < samples; ++i) {
    const ArrivalConfig ac{uniform(-2.0, 2.0), uniform(0.01, 5.0), 1.0, 1.0};
    const double p = uniform(-3.0, 3.0);
    const cplx d = pi_diagonal(p, ac);
    diag_dev = std::max(diag_dev, std::abs(pi_matrix_element(p, p, ac) - d) / std::max(1e-3, std::abs(d)));
  }
  record("arrival element diagonal consistency", diag_dev, 1e-10);

  const MomentumPacket pk{1.0, 0.1, -5.0, 5.0};
  const cplx diff = arrival_current_difference(pk, {0.0, 1e-4, 1.0, 1.0});
  const double flux = packet_flux(pk, 0.0);
  record("arrival current identity", std::abs(diff - flux) / std::abs(flux), 1e-3);

  const TimeDensities td(GaussianPacket(1.0, 0.05), Barrier::delta(2.0), density_options(cfg, run));
  double decomposition = 0.0;
  for (int i = 0; i < 8; ++i) {
    const auto p = td.at(uniform(-60.0, 60.0));
    decomposition = std::max(decomposition, std::abs(p.dwell - td.T() * p.tunnel - td.R() * p.reflect));
  }
  record("dwell decomposition", decomposition, 1e-6);

  long mismatches = 0;
  std::uniform_int_distribution<std::uint64_t> bits;
  for (long i = 0; i < samples; ++i) {
    double v = 0.0;
    do {
      const std::uint64_t b = bits(rng);
      std::memcpy(&v, &b, sizeof v);
    } while (!std::isfinite(v));
    const double back = parse_real(format_real(v));
    if (std::memcmp(&v, &back, sizeof v) != 0 && v != 0.0) ++mismatches;
  }
  record("17-digit round trip", static_cast<double>(mismatches), 0.0);
  return t;
}

ResultTable run_command(const std::string& name, const Config& cfg, const RunOptions& run) {
  if (name == "times") return cmd_times(cfg, run);
  if (name == "asymptotic") return cmd_asymptotic(cfg, run);
  if (name == "twolevel" || name == "two-level") return cmd_twolevel(cfg, run);
  if (name == "arrival") return cmd_arrival(cfg, run);
  if (name == "weak-sim") return cmd_weak_sim(cfg, run);
  if (name == "validate") return cmd_validate(cfg, run);
  throw std::invalid_argument("unknown command '" + name + "'");
}

bool validation_passed(const ResultTable& table) {
  return std::all_of(table.rows.begin(), table.rows.end(), [](const auto& r) { return r.at(1) == 1.0; });
}

int exit_code_for_current_exception(std::string& message) {
  try {
    throw;
  } catch (const ConfigError& e) {
    message = std::string("config error: ") + e.what();
    return 2;
  } catch (const ConvergenceError& e) {
    std::ostringstream ss;
    ss << "numerical non-convergence: " << e.what() << " (panels " << e.panels() << ", residual "
       << e.residual() << ")";
    message = ss.str();
    return 3;
  } catch (const DomainError& e) {
    message = std::string("domain error: ") + e.what();
    return 4;
  } catch (const OverflowError& e) {
    message = std::string("domain error: ") + e.what();
    return 4;
  } catch (const WeaknessError& e) {
    message = std::string("domain error: ") + e.what();
    return 4;
  } catch (const RarePostselectionError& e) {
    message = std::string("domain error: ") + e.what();
    return 4;
  } catch (const std::exception& e) {
    message = std::string("error: ") + e.what();
    return 1;
  }
}

}  // namespace weaktime::cli
