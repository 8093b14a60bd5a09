#include "qutrit/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "qutrit/algebra.hpp"
#include "qutrit/dynamics.hpp"
#include "qutrit/io.hpp"
#include "qutrit/pulses.hpp"
#include "qutrit/synth.hpp"
#include "qutrit/tomo.hpp"

namespace qutrit {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Criterion {
  int id;
  std::string name;
  bool pass;
  std::string details;
};

std::string fmt_tol(double v) { return io::fmt(v); }

// --- 1: recomposition over Haar-random targets -----------------------------
Criterion check_recomposition(std::uint64_t seed) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(derive_seed(seed, 1));
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const Mat3 u = haar_su3(rng);
    for (Scheme s : {Scheme::SingleTone, Scheme::DualTone}) {
      const PulseSequence seq = decompose(u, s);
      worst = std::max(worst, distance_mod_phase(sequence_unitary(seq), u));
    }
  }
  const bool in_time = seconds_since(t0) <= 60.0;
  return {1, "recomposition",
          worst <= 1e-9 && in_time,
          "worst distance " + fmt_tol(worst) + " over 1000 targets x 2 schemes" +
              (in_time ? "" : "; runtime limit exceeded")};
}

// --- 2: closed-form sequences against the transform ------------------------
Criterion check_fourier_forms() {
  const Mat3 f = fourier_matrix();
  const double d1 =
      distance_mod_phase(sequence_unitary(fourier_single_tone()), perm_12() * f);
  const double d2 = distance_mod_phase(sequence_unitary(fourier_dual_tone()),
                                       perm_01() * f * perm_01());
  return {2, "fourier closed forms", d1 <= 1e-9 && d2 <= 1e-9,
          "single-tone dist " + fmt_tol(d1) + ", dual-tone dist " + fmt_tol(d2)};
}

// --- 3: dual-tone generator identity ----------------------------------------
Criterion check_dual_tone_identity(std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed(seed, 3));
  std::uniform_real_distribution<double> mag(0.2, 5.0), ang(-pi, pi);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const cplx oa = 2 * pi * 1000 * mag(rng) * std::exp(cplx(0, ang(rng)));
    const cplx ob = 2 * pi * 1000 * mag(rng) * std::exp(cplx(0, ang(rng)));
    DriveConfig d;
    d.omega_a = oa;
    d.omega_b = ob;
    const double t_ab = dual_tone_period(oa, ob);
    const Mat3 u = exp_hermitian(cplx(0, 1) * drive_generator(d, 0.0), t_ab);
    const double alpha = 2 * std::atan(std::abs(oa / ob));
    const double beta = std::arg(oa / ob);
    worst = std::max(worst, (u - tone_ab(alpha, beta)).cwiseAbs().maxCoeff());
  }
  return {3, "dual-tone identity", worst <= 1e-10,
          "worst entrywise error " + fmt_tol(worst) + " over 100 couplings"};
}

// --- 4: readout matrices and generator constructions ------------------------
Criterion check_readout_tables() {
  const double s2 = 1.0 / std::sqrt(2.0);
  const cplx i1(0, 1);
  Mat3 expected[6];
  expected[0] << s2, -s2, 0, s2, s2, 0, 0, 0, 1;
  expected[1] << s2, -i1 * s2, 0, -i1 * s2, s2, 0, 0, 0, 1;
  expected[2] << 1, 0, 0, 0, s2, s2, 0, -s2, s2;
  expected[3] << 1, 0, 0, 0, s2, -i1 * s2, 0, -i1 * s2, s2;
  expected[4] << s2, 0, -s2, 0, -1, 0, -s2, 0, -s2;
  expected[5] << s2, 0, -i1 * s2, 0, -1, 0, i1 * s2, 0, -s2;
  double worst_r = 0, worst_g = 0;
  for (int i = 0; i < 6; ++i)
    worst_r = std::max(
        worst_r, (readout_unitary(i) - expected[i]).cwiseAbs().maxCoeff());
  for (int k = 1; k <= 8; ++k)
    worst_g = std::max(worst_g, (gell_mann_from_readouts(k) - gell_mann(k))
                                    .cwiseAbs()
                                    .maxCoeff());
  return {4, "readout tables", worst_r <= 1e-12 && worst_g <= 1e-12,
          "readout error " + fmt_tol(worst_r) + ", generator-construction error " +
              fmt_tol(worst_g)};
}

// --- 5: MLE round trip -------------------------------------------------------
Criterion check_mle_roundtrip(std::uint64_t seed) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(derive_seed(seed, 5));
  double worst_td = 0, worst_drop = 0;
  int worst_iters = 0;
  bool all_converged = true;
  for (int i = 0; i < 200; ++i) {
    Mat3 rho;
    if (i < 100) {
      const Vec3 psi = random_pure_state(rng);
      rho = psi * psi.adjoint();
    } else {
      rho = random_mixed_state(rng);
    }
    const MleResult r = mle_reconstruct(simulate_fractions(rho));
    worst_td = std::max(worst_td, trace_distance(r.rho, rho));
    worst_drop = std::max(worst_drop, r.max_loglik_decrease);
    worst_iters = std::max(worst_iters, r.iterations);
    all_converged = all_converged && r.converged;
  }
  const bool in_time = seconds_since(t0) <= 120.0;
  return {5, "mle round trip",
          worst_td <= 1e-5 && worst_drop <= 1e-12 && all_converged &&
              worst_iters <= 5000 && in_time,
          "worst trace distance " + fmt_tol(worst_td) + ", max likelihood drop " +
              fmt_tol(worst_drop) + ", max iterations " +
              std::to_string(worst_iters) +
              (in_time ? "" : "; runtime limit exceeded")};
}

// --- 6: resonant limit -------------------------------------------------------
PulseSequence random_sequence(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nchan(0, 2), len(3, 5);
  std::uniform_real_distribution<double> tau(0.05, 4.5), alpha(0.05, pi - 0.05),
      ang(-pi, pi);
  PulseSequence seq;
  const int n = len(rng);
  for (int i = 0; i < n; ++i) {
    const Channel ch = static_cast<Channel>(nchan(rng));
    const double theta = ch == Channel::AB ? alpha(rng) : tau(rng);
    seq.pulses.push_back({ch, theta, ang(rng)});
  }
  seq.eta = ang(rng);
  seq.eps = ang(rng);
  seq.global_phase = ang(rng);
  return seq;
}

Criterion check_resonant_limit(std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed(seed, 6));
  const double omega = 2 * pi * 2000;
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const PulseSequence seq = random_sequence(rng);
    const Mat3 u = propagate(seq, omega, 0.0, 0.0);
    worst = std::max(worst, (u - sequence_unitary(seq)).cwiseAbs().maxCoeff());
  }
  // intermediate level must empty after one dual-tone cycle
  std::uniform_real_distribution<double> mag(0.3, 3.0), ang(-pi, pi);
  double worst_p1 = 0, worst_sum = 0;
  for (int i = 0; i < 10; ++i) {
    const cplx oa = omega * mag(rng) * std::exp(cplx(0, ang(rng)));
    const cplx ob = omega * mag(rng) * std::exp(cplx(0, ang(rng)));
    const double t_ab = dual_tone_period(oa, ob);
    std::vector<double> grid;
    for (int k = 0; k <= 40; ++k) grid.push_back(k * t_ab / 40);
    const auto pts = population_scan(oa, ob, Vec3(1, 0, 0), grid);
    for (const auto& p : pts)
      worst_sum = std::max(worst_sum, std::abs(p.p0 + p.p1 + p.p2 - 1));
    worst_p1 = std::max(worst_p1, pts.back().p1);
  }
  return {6, "resonant limit",
          worst <= 1e-6 && worst_p1 <= 1e-9 && worst_sum <= 1e-9,
          "worst propagator error " + fmt_tol(worst) +
              ", residual intermediate population " + fmt_tol(worst_p1) +
              ", population sum error " + fmt_tol(worst_sum)};
}

// --- 7: detuning sweep -------------------------------------------------------
Criterion check_detuning_sweep(const std::string& outdir) {
  const double omega = 2 * pi * 2000;
  std::vector<double> grid;
  for (int i = -20; i <= 20; ++i) grid.push_back(0.05 * i / 20.0);
  double f0 = 0, worst_ref = 0, worst_over = 0;
  std::vector<std::vector<std::string>> rows;
  for (const auto& [name, seq] :
       {std::pair<std::string, PulseSequence>{"single_tone",
                                              fourier_single_tone()},
        {"dual_tone", fourier_dual_tone()}}) {
    const auto pts = detuning_sweep(seq, omega, grid);
    const auto ref = detuning_sweep(seq, omega, grid, DetuningFrame::PerPulse, 0.5);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      worst_ref = std::max(worst_ref,
                           std::abs(pts[i].avg_fidelity - ref[i].avg_fidelity));
      worst_over = std::max(worst_over, pts[i].avg_fidelity - 1.0);
      if (pts[i].delta_over_omega == 0.0)
        f0 = std::max(f0, std::abs(pts[i].avg_fidelity - 1.0));
      rows.push_back({name, io::fmt(pts[i].delta_over_omega),
                      io::fmt(pts[i].avg_fidelity),
                      io::fmt(ref[i].avg_fidelity)});
    }
  }
  io::write_file(outdir + "/sweep.csv",
                 io::csv_table({"detuning sweep, delta_a = -delta_b, averaged "
                                "over the three basis inputs",
                                "omega_rad_s = " + io::fmt(omega)},
                               {"gate", "delta_over_omega", "avg_fidelity",
                                "avg_fidelity_halved_step"},
                               rows));
  return {7, "detuning sweep",
          f0 <= 1e-6 && worst_ref <= 1e-6 && worst_over <= 1e-12,
          "on-resonance error " + fmt_tol(f0) + ", step-refinement error " +
              fmt_tol(worst_ref) + ", bound overshoot " + fmt_tol(worst_over)};
}

// --- 8/9: trap-ensemble tables ----------------------------------------------
struct StarkRow {
  std::string gate;
  int input;
  StateMetrics metrics;
  double target_p, target_f, target_fp;
};

std::vector<StarkRow> stark_rows_cache;

std::vector<StarkRow> compute_stark_rows() {
  const TrapModel trap;  // printed-value defaults
  const EnsembleSpec spec = ensemble_detunings(trap);
  const double omega = 2 * pi * 2000;
  const std::vector<Vec3> basis = {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
  const double targets[2][3][3] = {
      {{0.953, 0.980, 1.009}, {0.950, 0.974, 1.008}, {0.953, 0.980, 1.009}},
      {{0.963, 0.981, 1.006}, {0.965, 0.986, 1.007}, {0.965, 0.986, 1.007}}};
  const std::pair<std::string, PulseSequence> gates[2] = {
      {"dual_tone", fourier_dual_tone()}, {"single_tone", fourier_single_tone()}};

  std::vector<StarkRow> rows;
  for (int g = 0; g < 2; ++g) {
    const auto& [name, seq] = gates[g];
    const Mat3 ideal = sequence_unitary(seq);
    const auto data = ensemble_fractions(seq, spec, basis, omega);
    for (int n = 0; n < 3; ++n) {
      const MleResult rec = mle_reconstruct(data[n]);
      const StateMetrics m = state_metrics(rec.rho, ideal.col(n));
      rows.push_back({name, n, m, targets[g][n][0], targets[g][n][1],
                      targets[g][n][2]});
    }
  }
  return rows;
}

const std::vector<StarkRow>& stark_rows() {
  if (stark_rows_cache.empty()) stark_rows_cache = compute_stark_rows();
  return stark_rows_cache;
}

Criterion check_stark_table(const std::string& outdir) {
  const auto t0 = Clock::now();
  const auto& rows = stark_rows();
  double worst = 0;
  std::vector<std::vector<std::string>> csv;
  for (const StarkRow& r : rows) {
    worst = std::max({worst, std::abs(r.metrics.purity - r.target_p),
                      std::abs(r.metrics.fidelity - r.target_f),
                      std::abs(r.metrics.fidelity_pure - r.target_fp)});
    csv.push_back({r.gate, std::to_string(r.input), io::fmt(r.metrics.purity),
                   io::fmt(r.metrics.fidelity), io::fmt(r.metrics.fidelity_pure),
                   io::fmt(r.target_p), io::fmt(r.target_f),
                   io::fmt(r.target_fp)});
  }
  io::write_file(
      outdir + "/stark_table.csv",
      io::csv_table({"trap-ensemble simulation, tomography round trip",
                     "r_tf_m = 6.5e-06; tensor_center_hz = 25800; "
                     "tensor_edge_hz = 25300; samples = 1000; omega_rad_s = " +
                         io::fmt(2 * pi * 2000)},
                    {"gate", "input", "purity", "fidelity", "fidelity_pure",
                     "expected_purity", "expected_fidelity",
                     "expected_fidelity_pure"},
                    csv));
  const bool in_time = seconds_since(t0) <= 300.0;
  return {8, "trap ensemble tables", worst <= 0.02 && in_time,
          "worst deviation from reference values " + fmt_tol(worst) +
              " across 6 rows" + (in_time ? "" : "; runtime limit exceeded")};
}

Criterion check_purity_recovery() {
  double lowest = 1e9;
  for (const StarkRow& r : stark_rows())
    lowest = std::min(lowest, r.metrics.fidelity_pure);
  return {9, "purity recovery", lowest >= 0.99,
          "lowest purity-rescaled fidelity " + fmt_tol(lowest)};
}

// --- 10: scan averaging ------------------------------------------------------
Criterion check_averaging(std::uint64_t seed, const std::string& outdir) {
  const PulseSequence seq = fourier_dual_tone();
  const Mat3 ideal = sequence_unitary(seq);
  const Vec3 psi = ideal.col(0);
  const Mat3 rho = psi * psi.adjoint();
  const auto pts =
      averaging_study(rho, psi, 15, 20, 100000, derive_seed(seed, 10));
  std::vector<std::vector<std::string>> rows;
  for (const auto& p : pts)
    rows.push_back({std::to_string(p.scans), io::fmt(p.mean_f),
                    io::fmt(p.min_f), io::fmt(p.max_f), io::fmt(p.mean_p),
                    io::fmt(p.min_p), io::fmt(p.max_p), io::fmt(p.mean_fp),
                    io::fmt(p.min_fp), io::fmt(p.max_fp)});
  io::write_file(outdir + "/averaging.csv",
                 io::csv_table({"repeated-scan averaging study, multinomial "
                                "counting noise, 20 trials per scan count",
                                "atoms = 100000"},
                               {"scans", "mean_fidelity", "min_fidelity",
                                "max_fidelity", "mean_purity", "min_purity",
                                "max_purity", "mean_fidelity_pure",
                                "min_fidelity_pure", "max_fidelity_pure"},
                               rows));
  const AveragingPoint &first = pts.front(), &last = pts.back();
  const double spread1 = first.max_f - first.min_f;
  const double spread15 = last.max_f - last.min_f;
  const bool shrink = spread15 <= spread1 / 2;
  const bool stable = last.mean_f >= first.min_f && last.mean_f <= first.max_f;
  return {10, "scan averaging", shrink && stable,
          "fidelity spread " + fmt_tol(spread1) + " at 1 scan vs " +
              fmt_tol(spread15) + " at 15 scans; 15-scan mean " +
              fmt_tol(last.mean_f) + " within the 1-scan envelope [" +
              fmt_tol(first.min_f) + ", " + fmt_tol(first.max_f) + "]"};
}

std::string render(const std::vector<Criterion>& cs) {
  std::ostringstream os;
  for (const Criterion& c : cs)
    os << (c.pass ? "PASS" : "FAIL") << "  " << c.id << "  " << c.name << ": "
       << c.details << "\n";
  return os.str();
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

} // namespace

SelftestResult run_report(std::uint64_t seed, const std::string& outdir) {
  fs::create_directories(outdir);
  stark_rows_cache.clear();  // recompute per run so runs are independent

  std::vector<Criterion> cs;
  cs.push_back(check_recomposition(seed));
  cs.push_back(check_fourier_forms());
  cs.push_back(check_dual_tone_identity(seed));
  cs.push_back(check_readout_tables());
  cs.push_back(check_mle_roundtrip(seed));
  cs.push_back(check_resonant_limit(seed));
  cs.push_back(check_detuning_sweep(outdir));
  cs.push_back(check_stark_table(outdir));
  cs.push_back(check_purity_recovery());
  cs.push_back(check_averaging(seed, outdir));

  SelftestResult res;
  res.all_passed = true;
  for (const Criterion& c : cs) res.all_passed = res.all_passed && c.pass;
  res.report = render(cs);

  io::json summary;
  summary["seed"] = seed;
  io::json arr = io::json::array();
  for (const Criterion& c : cs)
    arr.push_back({{"id", c.id},
                   {"name", c.name},
                   {"pass", c.pass},
                   {"details", c.details}});
  summary["criteria"] = arr;
  io::write_file(outdir + "/summary.json", summary.dump(2) + "\n");
  return res;
}

SelftestResult run_acceptance(std::uint64_t seed, const std::string& outdir) {
  fs::create_directories(outdir);
  const std::string d1 = outdir + "/run1", d2 = outdir + "/run2";
  const SelftestResult r1 = run_report(seed, d1);
  const SelftestResult r2 = run_report(seed, d2);

  bool identical = r1.report == r2.report;
  std::string mismatch;
  for (const char* f :
       {"summary.json", "sweep.csv", "stark_table.csv", "averaging.csv"}) {
    if (slurp(d1 + "/" + std::string(f)) != slurp(d2 + "/" + std::string(f))) {
      identical = false;
      mismatch += std::string(mismatch.empty() ? "" : ", ") + f;
    }
  }
  Criterion c11{11, "determinism", identical,
                identical ? "two runs with seed " + std::to_string(seed) +
                                " produced byte-identical artifacts"
                          : "artifact mismatch: " +
                                (mismatch.empty() ? "report text" : mismatch)};

  SelftestResult res;
  res.report = r1.report + render({c11});
  res.all_passed = r1.all_passed && c11.pass;
  io::write_file(outdir + "/report.txt", res.report);
  return res;
}

} // namespace qutrit
