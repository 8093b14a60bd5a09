#include "qutrit/pulses.hpp"

#include <cmath>
#include <stdexcept>

namespace qutrit {

namespace {
cplx eip(double x) { return std::exp(cplx(0.0, x)); }
} // namespace

Mat3 tone_a(double tau, double phi) {
  const double c = std::cos(tau), s = std::sin(tau);
  Mat3 u;
  u << c, -eip(phi) * s, 0, eip(-phi) * s, c, 0, 0, 0, 1;
  return u;
}

Mat3 tone_b(double tau, double phi) {
  const double c = std::cos(tau), s = std::sin(tau);
  Mat3 u;
  u << 1, 0, 0, 0, c, eip(-phi) * s, 0, -eip(phi) * s, c;
  return u;
}

Mat3 tone_ab(double alpha, double beta) {
  const double c = std::cos(alpha), s = std::sin(alpha);
  Mat3 u;
  u << c, 0, -eip(beta) * s, 0, -1, 0, -eip(-beta) * s, 0, -c;
  return u;
}

Mat3 phase_gate(double eta, double eps) {
  Mat3 u = Mat3::Zero();
  u(0, 0) = eip(eta);
  u(1, 1) = eip(eps);
  u(2, 2) = eip(-(eta + eps));
  return u;
}

Mat3 pulse_unitary(const Pulse& p) {
  switch (p.ch) {
    case Channel::A: return tone_a(p.theta, p.phase);
    case Channel::B: return tone_b(p.theta, p.phase);
    case Channel::AB: return tone_ab(p.theta, p.phase);
  }
  throw std::invalid_argument("pulse_unitary: bad channel");
}

Mat3 sequence_unitary(const PulseSequence& seq) {
  Mat3 u = Mat3::Identity();
  for (const Pulse& p : seq.pulses) u = pulse_unitary(p) * u;
  return eip(seq.global_phase) * phase_gate(seq.eta, seq.eps) * u;
}

ToneDrive tone_drive(const Pulse& p, double omega) {
  if (omega <= 0.0) throw std::invalid_argument("tone_drive: omega must be > 0");
  switch (p.ch) {
    case Channel::A:
      return {omega * eip(p.phase), 0.0, 2.0 * p.theta / omega};
    case Channel::B:
      return {0.0, omega * eip(p.phase), 2.0 * p.theta / omega};
    case Channel::AB:
      return {omega * std::sin(p.theta / 2.0) * eip(p.phase),
              omega * std::cos(p.theta / 2.0), 2.0 * pi / omega};
  }
  throw std::invalid_argument("tone_drive: bad channel");
}

const std::array<Pulse, 6>& readout_pulses() {
  static const std::array<Pulse, 6> r = {{
      {Channel::A, pi / 4.0, 0.0},
      {Channel::A, pi / 4.0, pi / 2.0},
      {Channel::B, pi / 4.0, 0.0},
      {Channel::B, pi / 4.0, pi / 2.0},
      {Channel::AB, pi / 4.0, 0.0},
      {Channel::AB, pi / 4.0, pi / 2.0},
  }};
  return r;
}

Mat3 readout_unitary(int i) {
  if (i < 0 || i > 5) throw std::invalid_argument("readout_unitary: i must be 0..5");
  return pulse_unitary(readout_pulses()[static_cast<std::size_t>(i)]);
}

Pulse fold_phase(const Pulse& p, double eta, double eps) {
  Pulse q = p;
  switch (p.ch) {
    case Channel::A: q.phase += eps - eta; break;
    case Channel::B: q.phase += eta + 2.0 * eps; break;
    case Channel::AB: q.phase -= eps + 2.0 * eta; break;
  }
  return q;
}

Mat3 gell_mann_from_readouts(int k) {
  auto proj = [](int j) {
    Mat3 m = Mat3::Zero();
    m(j, j) = 1.0;
    return m;
  };
  auto conj = [&](int i, const Mat3& m) {
    const Mat3 r = readout_unitary(i);
    return Mat3(r.adjoint() * m * r);
  };
  switch (k) {
    case 1: return conj(0, proj(1) - proj(0));
    case 2: return conj(1, proj(0) - proj(1));
    case 3: return Mat3(conj(2, proj(0)) - conj(4, proj(1)));
    case 4: return conj(4, proj(2) - proj(0));
    case 5: return conj(5, proj(0) - proj(2));
    case 6: return conj(2, proj(1) - proj(2));
    case 7: return conj(3, proj(1) - proj(2));
    case 8:
      return Mat3((conj(2, proj(0)) + conj(4, proj(1)) -
                   2.0 * conj(0, proj(2))) /
                  std::sqrt(3.0));
  }
  throw std::invalid_argument("gell_mann_from_readouts: k must be 1..8");
}

} // namespace qutrit
