#pragma once

#include <vector>

#include "qutrit/pulses.hpp"

namespace qutrit {

// Phase-continuity convention for the detuning factors across a sequence.
//   GlobalPhase: one clock spans the whole sequence; every segment
//     integrates the oscillating-coupling generator on that clock.
//   PerPulse: every pulse restarts its clock at zero, and dual-tone
//     segments use the equivalent constant shifted-frame generator.
enum class DetuningFrame { GlobalPhase, PerPulse };

// One timed drive segment with physical couplings.
struct DriveConfig {
  cplx omega_a{0.0, 0.0};      // complex coupling on |0>-|1>, rad/s
  cplx omega_b{0.0, 0.0};      // complex coupling on |1>-|2>, rad/s
  double delta_a = 0.0;        // tone-A detuning, rad/s
  double delta_b = 0.0;        // tone-B detuning, rad/s
  double duration = 0.0;       // s
  double clock_origin = 0.0;   // segment start on the sequence clock, s
  bool shifted_frame = false;  // use the constant shifted-frame generator
};

// Generator G(t) of dU/dt = G(t) U at sequence-clock time t.
// Oscillating form (shifted_frame = false):
//   G = (1/2) [[0, -W_A, 0], [W_A^*, 0, W_B^*], [0, -W_B, 0]],
//   W_A = omega_a e^{i delta_a t},  W_B = omega_b e^{i delta_b t}.
// Constant shifted-frame form (shifted_frame = true):
//   G = (1/2) K_res + i diag(0, delta_a, delta_a + delta_b),
// where K_res is the oscillating K at zero detuning.  For a segment
// starting at t = 0 the two are related by
//   U_osc(T) = diag(1, e^{-i delta_a T}, e^{-i (delta_a - delta_b) T}) * U_c(T)
// with U_c integrated under the constant form taken at (delta_a, -delta_b).
Mat3 drive_generator(const DriveConfig& d, double t);

// Classical fixed-step RK4 over one segment with
//   step <= step_scale * min(duration/1000, 1/(100 max(|omega|, |delta|))).
// step_scale = 0.5 halves the step for refinement self-checks.
Mat3 propagate_segment(const DriveConfig& d, double step_scale = 1.0);

// Physical drive segments realizing `seq` at base Rabi frequency omega
// (rad/s) under the given frame convention.  Virtual phase parameters are
// not represented here; propagate() applies them exactly.
std::vector<DriveConfig> drive_sequence(const PulseSequence& seq, double omega,
                                        double delta_a, double delta_b,
                                        DetuningFrame frame);

// Time-ordered product of the integrated physical pulses only, without the
// virtual phase gate (used when the phase gate is folded into later pulses).
Mat3 propagate_pulses(const PulseSequence& seq, double omega, double delta_a,
                      double delta_b,
                      DetuningFrame frame = DetuningFrame::GlobalPhase,
                      double step_scale = 1.0);

// Time-ordered propagator of the whole sequence: integrated physical
// pulses, then the exact virtual phase gate and global phase.
Mat3 propagate(const PulseSequence& seq, double omega, double delta_a,
               double delta_b,
               DetuningFrame frame = DetuningFrame::GlobalPhase,
               double step_scale = 1.0);

// Populations of the basis states while a constant resonant two-tone drive
// acts on psi_in, evaluated at each time in t_grid (exact exponential).
struct PopulationPoint {
  double t, p0, p1, p2;
};
std::vector<PopulationPoint> population_scan(cplx omega_a, cplx omega_b,
                                             const Vec3& psi_in,
                                             const std::vector<double>& t_grid);

// Dual-tone cycle time 2 pi / sqrt(|omega_a|^2 + |omega_b|^2): the moment
// the intermediate state empties again.
double dual_tone_period(cplx omega_a, cplx omega_b);

// Fidelity |<n|U_ideal^dag U(delta)|n>|^2 averaged over the three basis
// inputs, for delta_a = +delta, delta_b = -delta at each grid value of
// delta/omega.
struct SweepPoint {
  double delta_over_omega;
  double avg_fidelity;
};
std::vector<SweepPoint> detuning_sweep(
    const PulseSequence& seq, double omega,
    const std::vector<double>& delta_over_omega,
    DetuningFrame frame = DetuningFrame::PerPulse, double step_scale = 1.0);

// --- trap-induced inhomogeneous detunings ---------------------------------

struct TrapModel {
  double r_tf = 6.5e-6;             // Thomas-Fermi radius, m
  double tensor_center_hz = 25800;  // |1> tensor shift at r = 0, Hz
  double tensor_edge_hz = 25300;    // at r = R_TF
  double scalar_center_hz = 0;      // common-mode channel, default off
  double scalar_edge_hz = 0;
  double omega_ho = 2 * pi * 100;   // trap frequency, rad/s (informational)
  int samples = 1000;
};

struct StarkShift {
  double tensor_hz, scalar_hz;
};

// Intensity-proportional quadratic profile inside the trap:
// shift(r) = edge + (center - edge)(1 - r^2/R_TF^2), clamped to edge outside.
StarkShift stark_profile(const TrapModel& m, double r);

// Normalized Thomas-Fermi radial density r^2 (1 - r^2/R_TF^2) on [0, R_TF],
// zero outside; integrates to 1.
double tf_density(const TrapModel& m, double r);

struct EnsembleSample {
  double delta_a, delta_b, weight;
};
struct EnsembleSpec {
  std::vector<EnsembleSample> samples;
};

// Deterministic midpoint-node ensemble: r_i = (i + 1/2) R_TF / N, weights
// proportional to tf_density and normalized to 1.  The tensor shift minus
// its density-weighted mean maps to opposite-sign detunings
// (delta_a = +2 pi Delta(r), delta_b = -delta_a); the optional scalar
// channel adds with equal sign to both.
EnsembleSpec ensemble_detunings(const TrapModel& m);

// rho = sum_i w_i U_i |psi_in><psi_in| U_i^dagger, one propagation per
// ensemble sample.
Mat3 ensemble_density_matrix(const PulseSequence& seq,
                             const EnsembleSpec& spec, const Vec3& psi_in,
                             double omega,
                             DetuningFrame frame = DetuningFrame::PerPulse,
                             double step_scale = 1.0);

} // namespace qutrit
