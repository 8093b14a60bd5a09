#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "qutrit/dynamics.hpp"
#include "qutrit/synth.hpp"

using namespace qutrit;

namespace {

PulseSequence random_sequence(std::mt19937_64& rng, int n = 4) {
  std::uniform_int_distribution<int> chan(0, 2);
  std::uniform_real_distribution<double> tau(0.05, 4.5), alpha(0.05, pi - 0.05),
      ang(-pi, pi);
  PulseSequence seq;
  for (int i = 0; i < n; ++i) {
    const Channel ch = static_cast<Channel>(chan(rng));
    seq.pulses.push_back(
        {ch, ch == Channel::AB ? alpha(rng) : tau(rng), ang(rng)});
  }
  seq.eta = ang(rng);
  seq.eps = ang(rng);
  seq.global_phase = ang(rng);
  return seq;
}

} // namespace

TEST_CASE("segment edge cases") {
  DriveConfig d;
  d.omega_a = 2 * pi * 1000;
  CHECK((propagate_segment(d) - Mat3::Identity()).cwiseAbs().maxCoeff() == 0);
  d.duration = -1;
  CHECK_THROWS_AS(propagate_segment(d), std::invalid_argument);
}

TEST_CASE("resonant single pulse reproduces the closed form") {
  const double omega = 2 * pi * 2000;
  const Pulse p{Channel::A, pi / 4, 0.6};  // pi/2 pulse area
  PulseSequence seq;
  seq.pulses = {p};
  const Mat3 u = propagate(seq, omega, 0, 0);
  CHECK((u - tone_a(pi / 4, 0.6)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("resonant sequences match pulse products") {
  std::mt19937_64 rng(41);
  const double omega = 2 * pi * 2000;
  for (int trial = 0; trial < 12; ++trial) {
    const PulseSequence seq = random_sequence(rng);
    const Mat3 u = propagate(seq, omega, 0, 0);
    CHECK((u - sequence_unitary(seq)).cwiseAbs().maxCoeff() < 1e-6);
  }
  // and the dual-tone closed-form gate specifically
  const Mat3 f2 = propagate(fourier_dual_tone(), omega, 0, 0);
  CHECK(distance_mod_phase(f2, perm_01() * fourier_matrix() * perm_01()) < 1e-6);
}

TEST_CASE("propagator stays unitary under detuning") {
  std::mt19937_64 rng(42);
  const double omega = 2 * pi * 2000;
  for (DetuningFrame frame :
       {DetuningFrame::GlobalPhase, DetuningFrame::PerPulse}) {
    for (int trial = 0; trial < 5; ++trial) {
      const PulseSequence seq = random_sequence(rng);
      const Mat3 u = propagate(seq, omega, 0.05 * omega, -0.05 * omega, frame);
      CHECK((u.adjoint() * u - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("oscillating generator against the midpoint-exponential oracle") {
  DriveConfig d;
  d.omega_a = 2 * pi * 1500.0 * std::exp(cplx(0, 0.3));
  d.omega_b = 2 * pi * 900.0 * std::exp(cplx(0, -1.1));
  d.delta_a = 2 * pi * 80.0;
  d.delta_b = -2 * pi * 55.0;
  d.duration = 1.3e-3;
  d.clock_origin = 2.2e-4;
  const Mat3 u = propagate_segment(d);
  const Mat3 ref = oracle::integrate_midpoint(
      [&](double t) { return drive_generator(d, t); }, d.clock_origin,
      d.duration, 40000);
  CHECK((u - ref).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("shifted-frame generator companion relation") {
  // For a segment starting its clock at zero,
  //   U_osc(T; da, db) = diag(1, e^{-i da T}, e^{-i (da - db) T})
  //                      * U_const(T; da, -db),
  // where U_const integrates (1/2)K_res + i diag(0, delta_a, delta_a+delta_b).
  DriveConfig osc;
  osc.omega_a = 2 * pi * 1200.0 * std::exp(cplx(0, 0.9));
  osc.omega_b = 2 * pi * 1700.0 * std::exp(cplx(0, -0.4));
  osc.delta_a = 2 * pi * 130.0;
  osc.delta_b = 2 * pi * 75.0;
  osc.duration = 8.0e-4;

  DriveConfig con = osc;
  con.shifted_frame = true;
  con.delta_b = -osc.delta_b;

  const double T = osc.duration;
  Mat3 frame = Mat3::Zero();
  frame(0, 0) = 1;
  frame(1, 1) = std::exp(cplx(0, -osc.delta_a * T));
  frame(2, 2) = std::exp(cplx(0, -(osc.delta_a - osc.delta_b) * T));

  const Mat3 lhs = propagate_segment(osc);
  const Mat3 rhs = frame * propagate_segment(con);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("per-step detuning pulls the average fidelity below one") {
  const double omega = 2 * pi * 2000;
  const std::vector<double> grid = {0.05};
  const auto pts = detuning_sweep(fourier_single_tone(), omega, grid,
                                  DetuningFrame::PerPulse);
  CHECK(pts[0].avg_fidelity < 1.0);
  CHECK(pts[0].avg_fidelity > 0.5);
  // halved-step agreement
  const auto fine = detuning_sweep(fourier_single_tone(), omega, grid,
                                   DetuningFrame::PerPulse, 0.5);
  CHECK(std::abs(pts[0].avg_fidelity - fine[0].avg_fidelity) < 1e-6);
}

TEST_CASE("detuning sweep basics") {
  const double omega = 2 * pi * 2000;
  const std::vector<double> grid = {-0.03, 0.0, 0.03};
  for (const PulseSequence& seq : {fourier_single_tone(), fourier_dual_tone()}) {
    const auto pts = detuning_sweep(seq, omega, grid);
    CHECK(pts[1].avg_fidelity >= 1 - 1e-6);
    for (const auto& p : pts) CHECK(p.avg_fidelity <= 1 + 1e-12);
  }
}

TEST_CASE("population scan") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> mag(0.4, 2.5), ang(-pi, pi);
  const cplx oa = 2 * pi * 1000 * mag(rng) * std::exp(cplx(0, ang(rng)));
  const cplx ob = 2 * pi * 1000 * mag(rng) * std::exp(cplx(0, ang(rng)));
  const double t_ab = dual_tone_period(oa, ob);
  CHECK(t_ab ==
        doctest::Approx(2 * pi / std::hypot(std::abs(oa), std::abs(ob)))
            .epsilon(1e-12));

  Vec3 psi0 = Vec3::Zero();
  psi0(0) = 1;
  std::vector<double> grid;
  for (int k = 0; k <= 50; ++k) grid.push_back(k * t_ab / 50);
  const auto pts = population_scan(oa, ob, psi0, grid);

  CHECK(pts.front().p0 == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& p : pts)
    CHECK(std::abs(p.p0 + p.p1 + p.p2 - 1) < 1e-9);

  // after one full cycle the intermediate level is empty and the transfer
  // follows the mixing angle
  const double alpha = 2 * std::atan(std::abs(oa / ob));
  CHECK(pts.back().p1 < 1e-9);
  CHECK(pts.back().p0 == doctest::Approx(std::cos(alpha) * std::cos(alpha))
                             .epsilon(1e-9));
  CHECK(pts.back().p2 == doctest::Approx(std::sin(alpha) * std::sin(alpha))
                             .epsilon(1e-9));

  // equal couplings: full transfer to the far level
  const auto eq = population_scan(cplx(2 * pi * 1000, 0), cplx(2 * pi * 1000, 0),
                                  psi0, {dual_tone_period(2 * pi * 1000, 2 * pi * 1000)});
  CHECK(eq[0].p2 == doctest::Approx(1.0).epsilon(1e-9));

  CHECK_THROWS_AS(dual_tone_period(0, 0), std::invalid_argument);
}

TEST_CASE("stark profile endpoints and midpoint") {
  const TrapModel m;
  CHECK(stark_profile(m, 0).tensor_hz == doctest::Approx(25800));
  CHECK(stark_profile(m, m.r_tf).tensor_hz == doctest::Approx(25300));
  CHECK(stark_profile(m, m.r_tf / std::sqrt(2.0)).tensor_hz ==
        doctest::Approx(25550));
  // clamped outside the trap
  CHECK(stark_profile(m, 2 * m.r_tf).tensor_hz == doctest::Approx(25300));
}

TEST_CASE("thomas-fermi density") {
  const TrapModel m;
  CHECK(tf_density(m, 0) == 0);
  CHECK(tf_density(m, m.r_tf) == 0);
  CHECK(tf_density(m, -1) == 0);
  const double integral = oracle::simpson(
      [&](double r) { return tf_density(m, r); }, 0, m.r_tf, 4000);
  CHECK(std::abs(integral - 1) < 1e-9);
  // mode at r = R/sqrt(2)
  double best_r = 0, best = -1;
  for (int i = 0; i <= 10000; ++i) {
    const double r = i * m.r_tf / 10000;
    if (tf_density(m, r) > best) {
      best = tf_density(m, r);
      best_r = r;
    }
  }
  CHECK(best_r / m.r_tf == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-3));
}

TEST_CASE("ensemble detunings") {
  TrapModel m;
  m.samples = 1000;
  const EnsembleSpec spec = ensemble_detunings(m);
  REQUIRE(static_cast<int>(spec.samples.size()) == m.samples);

  double wsum = 0, mean_a = 0;
  for (const auto& s : spec.samples) {
    wsum += s.weight;
    mean_a += s.weight * s.delta_a;
    CHECK(std::abs(s.delta_b + s.delta_a) < 1e-9);
  }
  CHECK(std::abs(wsum - 1) < 1e-12);
  CHECK(std::abs(mean_a) < 1e-9 * 2 * pi * 500);

  // implied mean shift against quadrature and the closed form
  const double r0 = 0.5 * m.r_tf / m.samples;
  const double e_mean =
      stark_profile(m, r0).tensor_hz - spec.samples[0].delta_a / (2 * pi);
  const double closed = oracle::tf_mean_shift(m.tensor_center_hz, m.tensor_edge_hz);
  const double quad = oracle::simpson(
      [&](double r) { return tf_density(m, r) * stark_profile(m, r).tensor_hz; },
      0, m.r_tf, 4000);
  CHECK(std::abs(e_mean - closed) < 1e-6 * closed);
  CHECK(std::abs(quad - closed) < 1e-6 * closed);

  // flat profile: no inhomogeneity at all
  TrapModel flat = m;
  flat.tensor_center_hz = flat.tensor_edge_hz = 25300;
  for (const auto& s : ensemble_detunings(flat).samples) {
    CHECK(std::abs(s.delta_a) < 1e-9);
    CHECK(std::abs(s.delta_b) < 1e-9);
  }

  // the optional common-mode channel enters both detunings with equal sign
  TrapModel scal = flat;
  scal.scalar_center_hz = 120;
  scal.scalar_edge_hz = 20;
  for (const auto& s : ensemble_detunings(scal).samples)
    CHECK(std::abs(s.delta_a - s.delta_b) < 1e-8);

  TrapModel bad = m;
  bad.samples = 0;
  CHECK_THROWS_AS(ensemble_detunings(bad), std::invalid_argument);
  bad = m;
  bad.tensor_center_hz = 25000;  // below the edge value
  CHECK_THROWS_AS(ensemble_detunings(bad), std::invalid_argument);
}

TEST_CASE("ensemble density matrix invariants") {
  const double omega = 2 * pi * 2000;
  TrapModel m;
  m.samples = 60;  // coarse quadrature keeps this fast; invariants are exact
  Vec3 psi0 = Vec3::Zero();
  psi0(0) = 1;

  const Mat3 rho = ensemble_density_matrix(
      fourier_dual_tone(), ensemble_detunings(m), psi0, omega);
  CHECK(std::abs(std::real(rho.trace()) - 1) < 1e-12);
  CHECK((rho - rho.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Mat3> es(rho);
  CHECK(es.eigenvalues().minCoeff() > -1e-9);
  CHECK(purity(rho) <= 1 + 1e-12);

  // single zero-detuning sample: pure ideal output
  EnsembleSpec single;
  single.samples = {{0.0, 0.0, 1.0}};
  const Mat3 pure_rho =
      ensemble_density_matrix(fourier_single_tone(), single, psi0, omega);
  CHECK(purity(pure_rho) > 1 - 1e-8);

  // unnormalized weights are rejected
  EnsembleSpec bad;
  bad.samples = {{0.0, 0.0, 0.7}};
  CHECK_THROWS_AS(ensemble_density_matrix(fourier_dual_tone(), bad, psi0, omega),
                  std::invalid_argument);
}

TEST_CASE("purity decreases as the shift spread grows") {
  const double omega = 2 * pi * 2000;
  Vec3 psi0 = Vec3::Zero();
  psi0(0) = 1;
  double prev = 2;
  for (int k = 0; k <= 4; ++k) {
    TrapModel m;
    m.samples = 60;
    m.tensor_edge_hz = 25300;
    m.tensor_center_hz = 25300 + 500.0 * k / 2;  // spread 0 .. 2x
    const Mat3 rho = ensemble_density_matrix(
        fourier_dual_tone(), ensemble_detunings(m), psi0, omega);
    const double p = purity(rho);
    CHECK(p <= 1 + 1e-12);
    CHECK(p <= prev + 1e-12);
    prev = p;
  }
}
