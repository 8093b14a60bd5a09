#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "qutrit/synth.hpp"
#include "qutrit/tomo.hpp"

using namespace qutrit;

TEST_CASE("projector completeness and rank") {
  for (int i = 0; i < 6; ++i) {
    Mat3 sum = Mat3::Zero();
    for (int j = 0; j < 3; ++j) {
      const Mat3& p = readout_projector(i, j);
      sum += p;
      CHECK((p - p.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
      CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-14);  // idempotent
      CHECK(std::abs(std::real(p.trace()) - 1) < 1e-12);  // rank 1
    }
    CHECK((sum - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS(readout_projector(6, 0));
  CHECK_THROWS(readout_projector(0, 3));
}

TEST_CASE("exact fractions") {
  const Mat3 third = Mat3::Identity() / 3.0;
  const TomographyData d = simulate_fractions(third);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(d.fractions[i][j] == doctest::Approx(1.0 / 3).epsilon(1e-12));

  Vec3 e0 = Vec3::Zero();
  e0(0) = 1;
  const TomographyData d0 = simulate_fractions(e0 * e0.adjoint());
  // first read-out mixes levels 0 and 1 by a half rotation
  CHECK(d0.fractions[0][0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d0.fractions[0][1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d0.fractions[0][2] == doctest::Approx(0.0).scale(1).epsilon(1e-12));

  std::mt19937_64 rng(51);
  const Mat3 rho = random_mixed_state(rng);
  const TomographyData dr = simulate_fractions(rho);
  for (int i = 0; i < 6; ++i) {
    const double s = dr.fractions[i][0] + dr.fractions[i][1] + dr.fractions[i][2];
    CHECK(std::abs(s - 1) < 1e-14);
  }
}

TEST_CASE("maximally mixed data is a fixed point") {
  const TomographyData d = simulate_fractions(Mat3::Identity() / 3.0);
  const MleResult r = mle_reconstruct(d);
  CHECK(r.converged);
  CHECK((r.rho - Mat3::Identity() / 3.0).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(r.iterations <= 3);
}

TEST_CASE("round trip on random states") {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 100; ++trial) {
    const bool pure = trial % 2 == 0;
    Mat3 rho;
    if (pure) {
      const Vec3 psi = random_pure_state(rng);
      rho = psi * psi.adjoint();
    } else {
      rho = random_mixed_state(rng);
    }
    const MleResult r = mle_reconstruct(simulate_fractions(rho));
    CHECK(trace_distance(r.rho, rho) < 1e-5);
    CHECK(r.iterations <= 5000);
    CHECK(r.max_loglik_decrease <= 1e-12);
    CHECK(std::abs(std::real(r.rho.trace()) - 1) < 1e-10);
    Eigen::SelfAdjointEigenSolver<Mat3> es(r.rho);
    CHECK(es.eigenvalues().minCoeff() > -1e-9);
  }
}

TEST_CASE("pure-state fidelity after reconstruction") {
  std::mt19937_64 rng(53);
  const Vec3 psi = random_pure_state(rng);
  const MleResult r = mle_reconstruct(simulate_fractions(psi * psi.adjoint()));
  CHECK(state_fidelity(r.rho, psi) >= 1 - 1e-6);
}

TEST_CASE("reconstruction of a trap-ensemble state") {
  TrapModel m;
  m.samples = 50;
  Vec3 psi0 = Vec3::Zero();
  psi0(0) = 1;
  const Mat3 rho = ensemble_density_matrix(
      fourier_dual_tone(), ensemble_detunings(m), psi0, 2 * pi * 2000);
  const MleResult r = mle_reconstruct(simulate_fractions(rho));
  CHECK(trace_distance(r.rho, rho) < 1e-4);
}

TEST_CASE("counted fractions") {
  std::mt19937_64 rng(54);
  const Mat3 rho = random_mixed_state(rng);
  CHECK_THROWS_AS(simulate_fractions_multinomial(rho, 0, 7),
                  std::invalid_argument);

  const TomographyData exact = simulate_fractions(rho);
  const TomographyData big = simulate_fractions_multinomial(rho, 10000000, 7);
  double dev = 0;
  for (int i = 0; i < 6; ++i) {
    double s = 0;
    for (int j = 0; j < 3; ++j) {
      dev = std::max(dev, std::abs(big.fractions[i][j] - exact.fractions[i][j]));
      s += big.fractions[i][j];
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-15));  // counts over N
  }
  CHECK(dev < 3e-3);

  // deterministic in the seed
  const TomographyData again = simulate_fractions_multinomial(rho, 10000000, 7);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(big.fractions[i][j] == again.fractions[i][j]);
  const TomographyData other = simulate_fractions_multinomial(rho, 10000000, 8);
  double diff = 0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 3; ++j)
      diff += std::abs(big.fractions[i][j] - other.fractions[i][j]);
  CHECK(diff > 0);

  // noise around an arbitrary fraction table keeps rows normalized
  const TomographyData noisy = add_counting_noise(exact, 1000, 9);
  for (int i = 0; i < 6; ++i)
    CHECK(noisy.fractions[i][0] + noisy.fractions[i][1] + noisy.fractions[i][2] ==
          doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("state metrics") {
  std::mt19937_64 rng(55);
  const Vec3 psi = random_pure_state(rng);
  const StateMetrics m = state_metrics(psi * psi.adjoint(), psi);
  CHECK(m.purity == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.fidelity == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.fidelity_pure == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("averaging study") {
  std::mt19937_64 rng(56);
  const Vec3 psi = random_pure_state(rng);
  const Mat3 rho = psi * psi.adjoint();

  // degenerate average: one scan, one trial equals a single reconstruction
  const auto single = averaging_study(rho, psi, 1, 1, 5000, 99);
  const MleResult direct =
      mle_reconstruct(simulate_fractions_multinomial(rho, 5000, derive_seed(99, 0)));
  const StateMetrics dm = state_metrics(direct.rho, psi);
  CHECK(single[0].mean_f == doctest::Approx(dm.fidelity).epsilon(1e-12));
  CHECK(single[0].min_f == single[0].max_f);

  // zero counting noise collapses every spread
  const auto clean = averaging_study(rho, psi, 3, 4, 0, 99);
  for (const auto& p : clean) {
    CHECK(p.max_f - p.min_f == 0);
    CHECK(p.max_p - p.min_p == 0);
    CHECK(p.max_fp - p.min_fp == 0);
  }

  CHECK_THROWS_AS(averaging_study(rho, psi, 0, 1, 100, 1), std::invalid_argument);
}

TEST_CASE("ensemble tomography fractions are normalized and reconstructable") {
  TrapModel m;
  m.samples = 40;
  Vec3 psi0 = Vec3::Zero();
  psi0(0) = 1;
  const auto data = ensemble_fractions(fourier_dual_tone(),
                                       ensemble_detunings(m), {psi0},
                                       2 * pi * 2000);
  REQUIRE(data.size() == 1);
  for (int i = 0; i < 6; ++i) {
    const double s =
        data[0].fractions[i][0] + data[0].fractions[i][1] + data[0].fractions[i][2];
    CHECK(std::abs(s - 1) < 1e-9);
  }
  const MleResult r = mle_reconstruct(data[0]);
  CHECK(r.converged);
  // the reconstructed state resembles the ideal gate output
  const Vec3 ideal = sequence_unitary(fourier_dual_tone()) * psi0;
  CHECK(state_fidelity(r.rho, ideal) > 0.9);
}
