#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "qutrit/dynamics.hpp"
#include "qutrit/pulses.hpp"

namespace qutrit {

// Measured cloud fractions: readout index 0..5, outcome 0..2.
struct TomographyData {
  std::array<std::array<double, 3>, 6> fractions{};
  std::optional<long long> atoms;  // per-shot atom count in counted mode
  int scans = 1;                   // how many scans were averaged in
};

// Projector R_i^dagger |j><j| R_i of readout i, outcome j.
const Mat3& readout_projector(int readout, int outcome);

// Exact fractions f^i_j = Tr(readout_projector(i,j) rho).
TomographyData simulate_fractions(const Mat3& rho);

// Counted fractions: per readout, a multinomial draw of `atoms` atoms over
// the three outcomes (exact inverse-CDF sampling, deterministic in seed).
TomographyData simulate_fractions_multinomial(const Mat3& rho, long long atoms,
                                              std::uint64_t seed);

// Same counting noise applied to an existing fraction table (e.g. one
// produced by ensemble_fractions).
TomographyData add_counting_noise(const TomographyData& exact, long long atoms,
                                  std::uint64_t seed);

struct MleResult {
  Mat3 rho = Mat3::Identity() / 3.0;
  int iterations = 0;
  bool converged = false;
  bool regularized = false;        // zero-probability blend was applied
  double max_loglik_decrease = 0;  // largest accepted per-step drop
  double loglik = 0;
};

// Iterative maximum-likelihood reconstruction from rho0 = identity/3 via the
// fixed-point map rho <- Q rho Q / Tr(Q rho Q),
//   Q(rho) = sum_ij f_ij / Tr(P_ij rho) * P_ij.
// Each iteration also evaluates spectrally accelerated variants Q^g rho Q^g
// and a PSD-projected linear-inversion candidate, keeping whichever has the
// highest log-likelihood; the plain map converges only as O(1/k) when the
// target sits on the boundary of the physical set (pure states), which the
// accelerated candidates repair while sharing the same fixed points.
// Stops when the Frobenius step falls below step_tol, when no candidate
// improves the log-likelihood (fixed point reached), or at max_iters.
MleResult mle_reconstruct(const TomographyData& data, int max_iters = 5000,
                          double step_tol = 1e-10);

// Purity, fidelity against a pure target state, and the purity-rescaled
// fidelity (F - 1/3)/P + 1/3 (may exceed 1 for slightly impure states).
struct StateMetrics {
  double purity, fidelity, fidelity_pure;
};
StateMetrics state_metrics(const Mat3& rho, const Vec3& ideal_state);

// Simulated tomography of a gate applied to each input state under an
// inhomogeneous detuning ensemble.  For every sample the physical gate
// pulses and then each phase-folded readout pulse are integrated under the
// same frame convention; outcome fractions are ensemble-weighted.  One
// TomographyData per input state.
std::vector<TomographyData> ensemble_fractions(
    const PulseSequence& seq, const EnsembleSpec& spec,
    const std::vector<Vec3>& inputs, double omega,
    DetuningFrame frame = DetuningFrame::PerPulse, double step_scale = 1.0);

// Repeated-scan averaging study on a fixed state: for each scan count
// N = 1..max_scans, `trials` independent experiments each average N
// multinomial datasets, reconstruct, and report the metric statistics
// across trials (mean and min/max envelope).  atoms <= 0 disables counting
// noise (every dataset is exact, so all spreads collapse to zero).
struct AveragingPoint {
  int scans;
  double mean_f, min_f, max_f;
  double mean_p, min_p, max_p;
  double mean_fp, min_fp, max_fp;
};
std::vector<AveragingPoint> averaging_study(const Mat3& rho,
                                            const Vec3& ideal_state,
                                            int max_scans, int trials,
                                            long long atoms,
                                            std::uint64_t seed);

} // namespace qutrit
