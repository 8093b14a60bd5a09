#pragma once

#include "qutrit/pulses.hpp"

namespace qutrit {

// Two compilation schemes for an arbitrary 3x3 unitary:
//   SingleTone: U = e^{ig} U_theta . B(tau2,phi2) . A(tau1,phi1) . B(tau0,phi0)
//   DualTone:   U = e^{ig} U_theta . B(tau1,phi1) . A(tau0,phi0) . AB(alpha,beta)
// The first pulse zeroes the (0,2) entry of U acted on from the right, the A
// pulse zeroes (0,1) (which forces the rest of row/column 0), and the last B
// pulse diagonalizes the remaining 1-2 block; the leftover diagonal becomes
// the virtual phase gate plus a global phase.
enum class Scheme { SingleTone, DualTone };

// Decompose an (approximately) unitary matrix into a pulse sequence.
// Throws std::invalid_argument if u is not unitary within `unitary_tol`.
PulseSequence decompose(const Mat3& u, Scheme scheme,
                        double unitary_tol = 1e-9);

// The qutrit discrete Fourier transform, F_{jk} = omega^{jk}/sqrt(3),
// omega = e^{2 pi i / 3}.
Mat3 fourier_matrix();

// Basis permutation of the Fourier transform realized by each closed-form
// sequence below: swap of |1>,|2> applied on one side (single-tone), swap of
// |0>,|1> applied on both sides (dual-tone).
Mat3 perm_12();
Mat3 perm_01();

// Closed-form Fourier-transform sequences (fixed pulse parameters).
// sequence_unitary(fourier_single_tone()) == perm_12() * fourier_matrix(),
// sequence_unitary(fourier_dual_tone()) == perm_01()*fourier_matrix()*perm_01(),
// both including the global phase.
PulseSequence fourier_single_tone();
PulseSequence fourier_dual_tone();

} // namespace qutrit
