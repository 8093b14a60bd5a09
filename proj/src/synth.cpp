#include "qutrit/synth.hpp"

#include <cmath>
#include <stdexcept>

namespace qutrit {

namespace {

struct GivensParams {
  double theta, phi;
};

// Tone-A pulse G with (v*G)(r,1) == 0 given a = v(r,0), b = v(r,1).
// Right-multiplication mixes columns 0,1:
//   (vG)(r,1) = -a e^{i phi} sin + b cos,
// zeroed by tan(theta) = |b|/|a|, phi = arg(b) - arg(a).
GivensParams zero_col1_a(cplx a, cplx b) {
  if (std::abs(b) < 1e-15) return {0.0, 0.0};
  if (std::abs(a) < 1e-15) return {pi / 2, std::arg(b)};
  return {std::atan2(std::abs(b), std::abs(a)), std::arg(b) - std::arg(a)};
}

// Tone-B pulse G with (v*G)(r,2) == 0 given a = v(r,1), b = v(r,2):
//   (vG)(r,2) = a e^{-i phi} sin + b cos,
// zeroed by tan(theta) = |b|/|a|, phi = arg(a) - arg(b) + pi.
GivensParams zero_col2_b(cplx a, cplx b) {
  if (std::abs(b) < 1e-15) return {0.0, 0.0};
  if (std::abs(a) < 1e-15) return {pi / 2, std::arg(-b)};
  return {std::atan2(std::abs(b), std::abs(a)), std::arg(a) - std::arg(b) + pi};
}

// Dual-tone pulse G with (v*G)(r,2) == 0 given a = v(r,0), b = v(r,2):
//   (vG)(r,2) = -a e^{i beta} sin - b cos,
// zeroed by tan(alpha) = |b|/|a|, beta = arg(b) - arg(a) + pi.
GivensParams zero_col2_ab(cplx a, cplx b) {
  if (std::abs(b) < 1e-15) return {0.0, 0.0};
  if (std::abs(a) < 1e-15) return {pi / 2, std::arg(b)};
  return {std::atan2(std::abs(b), std::abs(a)), std::arg(b) - std::arg(a) + pi};
}

// Adjoint of a pulse expressed as a pulse on the same channel.  Single tones
// satisfy u(theta, phi)^dagger = u(theta, phi + pi); the dual tone is a
// Hermitian involution and is its own adjoint.
Pulse adjoint_pulse(const Pulse& p) {
  if (p.ch == Channel::AB) return p;
  return Pulse{p.ch, p.theta, p.phase + pi};
}

} // namespace

Mat3 fourier_matrix() {
  const cplx w = std::exp(cplx(0, 2 * pi / 3));
  Mat3 f;
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) f(j, k) = std::pow(w, j * k);
  return f / std::sqrt(3.0);
}

Mat3 perm_12() {
  Mat3 p = Mat3::Zero();
  p(0, 0) = 1;
  p(1, 2) = 1;
  p(2, 1) = 1;
  return p;
}

Mat3 perm_01() {
  Mat3 p = Mat3::Zero();
  p(0, 1) = 1;
  p(1, 0) = 1;
  p(2, 2) = 1;
  return p;
}

PulseSequence fourier_single_tone() {
  PulseSequence seq;
  seq.pulses = {
      Pulse{Channel::B, pi / 4, 0.0},
      Pulse{Channel::A, std::acos(-1.0 / 3.0) / 2, pi},
      Pulse{Channel::B, 5 * pi / 4, pi / 2},
  };
  seq.eta = -pi / 6;
  seq.eps = -pi / 6;
  seq.global_phase = pi / 6;
  return seq;
}

PulseSequence fourier_dual_tone() {
  PulseSequence seq;
  seq.pulses = {
      Pulse{Channel::AB, pi / 4, -2 * pi / 3},
      Pulse{Channel::B, pi + std::atan(1.0 / std::sqrt(2.0)), pi / 3},
      Pulse{Channel::A, pi / 4, pi / 6},
  };
  seq.eta = pi / 3;
  seq.eps = -pi / 2;
  seq.global_phase = pi / 2;
  return seq;
}

PulseSequence decompose(const Mat3& u, Scheme scheme, double unitary_tol) {
  const double unit_err =
      (u.adjoint() * u - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (unit_err > unitary_tol)
    throw std::invalid_argument("decompose: input is not unitary");

  // Find forward pulses g0, g1, g2 with u * g0 * g1 * g2 diagonal; then
  // u = diag * g2^d * g1^d * g0^d, i.e. the executed sequence is
  // [g0^d, g1^d, g2^d] in time order followed by the phase gate.
  Mat3 v = u;
  std::vector<Pulse> fwd;

  if (scheme == Scheme::SingleTone) {
    GivensParams p0 = zero_col2_b(v(0, 1), v(0, 2));
    fwd.push_back(Pulse{Channel::B, p0.theta, p0.phi});
  } else {
    GivensParams p0 = zero_col2_ab(v(0, 0), v(0, 2));
    fwd.push_back(Pulse{Channel::AB, p0.theta, p0.phi});
  }
  v = v * pulse_unitary(fwd.back());
  if (std::abs(v(0, 2)) > 1e-10)
    throw std::logic_error("decompose: failed to zero (0,2)");

  {
    GivensParams p1 = zero_col1_a(v(0, 0), v(0, 1));
    fwd.push_back(Pulse{Channel::A, p1.theta, p1.phi});
    v = v * pulse_unitary(fwd.back());
  }
  if (std::abs(v(0, 1)) > 1e-10)
    throw std::logic_error("decompose: failed to zero (0,1)");

  // Row 0 is now e^{i t0} e_0, so column 0 below the diagonal vanishes by
  // unitarity; one tone-B pulse clears the remaining 1-2 block.
  {
    GivensParams p2 = zero_col2_b(v(1, 1), v(1, 2));
    fwd.push_back(Pulse{Channel::B, p2.theta, p2.phi});
    v = v * pulse_unitary(fwd.back());
  }
  const double off = std::max({std::abs(v(0, 1)), std::abs(v(0, 2)),
                               std::abs(v(1, 0)), std::abs(v(1, 2)),
                               std::abs(v(2, 0)), std::abs(v(2, 1))});
  if (off > 1e-9) throw std::logic_error("decompose: residual not diagonal");

  // diag(e^{i t0}, e^{i t1}, e^{i t2}) = e^{ig} diag(e^{i eta}, e^{i eps},
  // e^{-i(eta+eps)}) with g = (t0+t1+t2)/3; the third entry checks out
  // exactly since g - eta - eps = t2.
  const double t0 = std::arg(v(0, 0));
  const double t1 = std::arg(v(1, 1));
  const double t2 = std::arg(v(2, 2));
  const double g = (t0 + t1 + t2) / 3.0;

  PulseSequence seq;
  seq.pulses = {adjoint_pulse(fwd[0]), adjoint_pulse(fwd[1]),
                adjoint_pulse(fwd[2])};
  seq.eta = t0 - g;
  seq.eps = t1 - g;
  seq.global_phase = g;
  return seq;
}

} // namespace qutrit
