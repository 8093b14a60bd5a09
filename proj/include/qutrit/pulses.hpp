#pragma once

#include <array>
#include <vector>

#include "qutrit/algebra.hpp"

namespace qutrit {

// Physical two-tone channels: A drives |0>-|1>, B drives |1>-|2>, AB drives
// both tones simultaneously for one full cycle, synthesizing a |0>-|2>
// coupling.
enum class Channel { A, B, AB };

// One physical pulse. For channels A and B, `theta` is the pulse area tau
// (|Omega| t / 2) and `phase` the tone phase phi. For channel AB, `theta` is
// the mixing angle alpha = 2 atan|Omega_A/Omega_B| and `phase` the relative
// tone phase beta; the duration is always one full cycle.
struct Pulse {
  Channel ch;
  double theta;
  double phase;
};

/// A gate as executed: physical pulses in time order, a final virtual phase
// gate diag(e^{i eta}, e^{i eps}, e^{-i(eta+eps)}), and a bookkeeping global
// phase.
struct PulseSequence {
  std::vector<Pulse> pulses;
  double eta = 0.0;
  double eps = 0.0;
  double global_phase = 0.0;
};

// Closed-form pulse unitaries.
Mat3 tone_a(double tau, double phi);
Mat3 tone_b(double tau, double phi);
Mat3 tone_ab(double alpha, double beta);
Mat3 phase_gate(double eta, double eps);

Mat3 pulse_unitary(const Pulse& p);

// Product of all pulses (time order), then the virtual phase gate and global
// phase.
Mat3 sequence_unitary(const PulseSequence& seq);

// Complex tone amplitudes and duration realizing one pulse at tone magnitude
// `omega` (rad/s). A/B: Omega = omega e^{i phi}, t = 2 tau / omega.
// AB: Omega_A = omega sin(alpha/2) e^{i beta}, Omega_B = omega cos(alpha/2),
// t = 2 pi / omega.
struct ToneDrive {
  cplx omega_a;
  cplx omega_b;
  double duration;
};
ToneDrive tone_drive(const Pulse& p, double omega);

// The six tomography read-out pulses: pi/2-area rotations about two axes per
// channel.
const std::array<Pulse, 6>& readout_pulses();
Mat3 readout_unitary(int i); // i = 0..5, closed form of readout_pulses()[i]

// Push a pending virtual phase gate through a pulse: returns the same pulse
// with its tone phase advanced so that applying it after the (virtual) phase
// gate is equivalent to applying the phase gate last. Derived from
// U_theta^dag R U_theta: channel A shifts phi by eps - eta, channel B by
// eta + 2 eps, channel AB shifts beta by -(eps + 2 eta).
Pulse fold_phase(const Pulse& p, double eta, double eps);

// Gell-Mann matrices assembled from read-out conjugations of bare projectors,
// lambda_k = sum_j c_j R^dag |j><j| R. Useful as an independent construction
// of the SU(3) basis from executable operations.
Mat3 gell_mann_from_readouts(int k);

} // namespace qutrit
