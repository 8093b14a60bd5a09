#include "qutrit/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qutrit/algebra.hpp"

namespace qutrit {

Mat3 drive_generator(const DriveConfig& d, double t) {
  Mat3 g = Mat3::Zero();
  if (d.shifted_frame) {
    g(0, 1) = -0.5 * d.omega_a;
    g(1, 0) = 0.5 * std::conj(d.omega_a);
    g(1, 2) = 0.5 * std::conj(d.omega_b);
    g(2, 1) = -0.5 * d.omega_b;
    g(1, 1) = cplx(0, d.delta_a);
    g(2, 2) = cplx(0, d.delta_a + d.delta_b);
    return g;
  }
  const cplx wa = d.omega_a * std::exp(cplx(0, d.delta_a * t));
  const cplx wb = d.omega_b * std::exp(cplx(0, d.delta_b * t));
  g(0, 1) = -0.5 * wa;
  g(1, 0) = 0.5 * std::conj(wa);
  g(1, 2) = 0.5 * std::conj(wb);
  g(2, 1) = -0.5 * wb;
  return g;
}

Mat3 propagate_segment(const DriveConfig& d, double step_scale) {
  if (d.duration < 0) throw std::invalid_argument("propagate_segment: negative duration");
  if (d.duration == 0) return Mat3::Identity();
  const double scale = std::max({std::abs(d.omega_a), std::abs(d.omega_b),
                                 std::abs(d.delta_a), std::abs(d.delta_b)});
  double step = d.duration / 1000.0;
  if (scale > 0) step = std::min(step, 1.0 / (100.0 * scale));
  step *= step_scale;
  const int n = static_cast<int>(std::ceil(d.duration / step));
  const double h = d.duration / n;

  Mat3 u = Mat3::Identity();
  const double t0 = d.clock_origin;
  for (int i = 0; i < n; ++i) {
    const double t = t0 + i * h;
    const Mat3 k1 = drive_generator(d, t) * u;
    const Mat3 k2 = drive_generator(d, t + h / 2) * (u + (h / 2) * k1);
    const Mat3 k3 = drive_generator(d, t + h / 2) * (u + (h / 2) * k2);
    const Mat3 k4 = drive_generator(d, t + h) * (u + h * k3);
    u += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return u;
}

std::vector<DriveConfig> drive_sequence(const PulseSequence& seq, double omega,
                                        double delta_a, double delta_b,
                                        DetuningFrame frame) {
  std::vector<DriveConfig> segs;
  segs.reserve(seq.pulses.size());
  double clock = 0.0;
  for (const Pulse& p : seq.pulses) {
    const ToneDrive td = tone_drive(p, omega);
    DriveConfig d;
    d.omega_a = td.omega_a;
    d.omega_b = td.omega_b;
    d.delta_a = delta_a;
    d.delta_b = delta_b;
    d.duration = td.duration;
    if (frame == DetuningFrame::GlobalPhase) {
      d.clock_origin = clock;
    } else {
      d.clock_origin = 0.0;
      d.shifted_frame = (p.ch == Channel::AB);
    }
    segs.push_back(d);
    clock += td.duration;
  }
  return segs;
}

Mat3 propagate_pulses(const PulseSequence& seq, double omega, double delta_a,
                      double delta_b, DetuningFrame frame, double step_scale) {
  Mat3 u = Mat3::Identity();
  for (const DriveConfig& d :
       drive_sequence(seq, omega, delta_a, delta_b, frame))
    u = propagate_segment(d, step_scale) * u;
  return u;
}

Mat3 propagate(const PulseSequence& seq, double omega, double delta_a,
               double delta_b, DetuningFrame frame, double step_scale) {
  const Mat3 u = propagate_pulses(seq, omega, delta_a, delta_b, frame, step_scale);
  const cplx g = std::exp(cplx(0, seq.global_phase));
  return g * phase_gate(seq.eta, seq.eps) * u;
}

std::vector<PopulationPoint> population_scan(
    cplx omega_a, cplx omega_b, const Vec3& psi_in,
    const std::vector<double>& t_grid) {
  DriveConfig d;
  d.omega_a = omega_a;
  d.omega_b = omega_b;
  // Resonant constant generator: exponentiate exactly via i*G Hermitian.
  const Mat3 h = cplx(0, 1) * drive_generator(d, 0.0);
  std::vector<PopulationPoint> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    const Vec3 psi = exp_hermitian(h, t) * psi_in;
    out.push_back({t, std::norm(psi(0)), std::norm(psi(1)), std::norm(psi(2))});
  }
  return out;
}

double dual_tone_period(cplx omega_a, cplx omega_b) {
  const double wt = std::hypot(std::abs(omega_a), std::abs(omega_b));
  if (wt <= 0) throw std::invalid_argument("dual_tone_period: zero coupling");
  return 2 * pi / wt;
}

std::vector<SweepPoint> detuning_sweep(
    const PulseSequence& seq, double omega,
    const std::vector<double>& delta_over_omega, DetuningFrame frame,
    double step_scale) {
  const Mat3 ideal = sequence_unitary(seq);
  std::vector<SweepPoint> out;
  out.reserve(delta_over_omega.size());
  for (double x : delta_over_omega) {
    const double delta = x * omega;
    const Mat3 u = propagate(seq, omega, delta, -delta, frame, step_scale);
    double f = 0;
    for (int n = 0; n < 3; ++n)
      f += std::norm(ideal.col(n).dot(u.col(n)));
    out.push_back({x, f / 3});
  }
  return out;
}

StarkShift stark_profile(const TrapModel& m, double r) {
  if (m.r_tf <= 0) throw std::invalid_argument("stark_profile: R_TF must be > 0");
  const double x = std::min(r * r / (m.r_tf * m.r_tf), 1.0);
  return {m.tensor_edge_hz + (m.tensor_center_hz - m.tensor_edge_hz) * (1 - x),
          m.scalar_edge_hz + (m.scalar_center_hz - m.scalar_edge_hz) * (1 - x)};
}

double tf_density(const TrapModel& m, double r) {
  if (m.r_tf <= 0) throw std::invalid_argument("tf_density: R_TF must be > 0");
  if (r < 0 || r > m.r_tf) return 0.0;
  const double x = r / m.r_tf;
  // r^2 (1 - r^2/R^2) normalized: integral over [0, R] is 2 R^3 / 15.
  return x * x * (1 - x * x) * 15.0 / (2.0 * m.r_tf);
}

EnsembleSpec ensemble_detunings(const TrapModel& m) {
  if (m.samples < 1) throw std::invalid_argument("ensemble_detunings: samples < 1");
  if (m.tensor_center_hz < m.tensor_edge_hz)
    throw std::invalid_argument("ensemble_detunings: center shift below edge shift");
  const int n = m.samples;
  std::vector<double> w(n), tens(n), scal(n);
  double wsum = 0, tmean = 0, smean = 0;
  for (int i = 0; i < n; ++i) {
    const double r = (i + 0.5) * m.r_tf / n;
    const StarkShift s = stark_profile(m, r);
    w[i] = tf_density(m, r);
    tens[i] = s.tensor_hz;
    scal[i] = s.scalar_hz;
    wsum += w[i];
  }
  for (int i = 0; i < n; ++i) {
    w[i] /= wsum;
    tmean += w[i] * tens[i];
    smean += w[i] * scal[i];
  }
  EnsembleSpec spec;
  spec.samples.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double dt = 2 * pi * (tens[i] - tmean);  // opposite-sign channel
    const double ds = 2 * pi * (scal[i] - smean);  // common-mode channel
    spec.samples.push_back({dt + ds, -dt + ds, w[i]});
  }
  return spec;
}

Mat3 ensemble_density_matrix(const PulseSequence& seq,
                             const EnsembleSpec& spec, const Vec3& psi_in,
                             double omega, DetuningFrame frame,
                             double step_scale) {
  double wsum = 0;
  for (const EnsembleSample& s : spec.samples) wsum += s.weight;
  if (std::abs(wsum - 1.0) > 1e-12)
    throw std::invalid_argument("ensemble_density_matrix: weights not normalized");
  Mat3 rho = Mat3::Zero();
  for (const EnsembleSample& s : spec.samples) {
    const Vec3 psi =
        propagate(seq, omega, s.delta_a, s.delta_b, frame, step_scale) * psi_in;
    rho += s.weight * (psi * psi.adjoint());
  }
  return rho;
}

} // namespace qutrit
