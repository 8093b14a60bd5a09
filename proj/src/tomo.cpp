#include "qutrit/tomo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "qutrit/algebra.hpp"

namespace qutrit {

namespace {

using ProjTable = std::array<std::array<Mat3, 3>, 6>;

const ProjTable& projector_table() {
  static const ProjTable table = [] {
    ProjTable t;
    for (int i = 0; i < 6; ++i) {
      const Mat3 r = readout_unitary(i);
      for (int j = 0; j < 3; ++j) {
        Vec3 e = Vec3::Zero();
        e(j) = 1;
        const Vec3 v = r.adjoint() * e;
        t[i][j] = v * v.adjoint();
      }
    }
    return t;
  }();
  return table;
}

double loglik_of(const Mat3& rho, const TomographyData& data) {
  const ProjTable& pt = projector_table();
  double ll = 0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 3; ++j) {
      const double f = data.fractions[i][j];
      if (f <= 0) continue;
      const double p = std::real((pt[i][j] * rho).trace());
      ll += f * std::log(std::max(p, 1e-300));
    }
  return ll;
}

// Least-squares inversion of the 18 linear fraction equations plus the unit
// trace, projected onto the PSD cone.  Not used as the estimate itself, only
// offered as a candidate to the likelihood iteration (it handles boundary
// states the multiplicative map approaches slowly).
Mat3 linear_inversion_psd(const TomographyData& data) {
  const ProjTable& pt = projector_table();
  Eigen::MatrixXd a(19, 9);
  Eigen::VectorXd b(19);
  int row = 0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 3; ++j, ++row) {
      const Mat3& m = pt[i][j];
      a(row, 0) = std::real(m(0, 0));
      a(row, 1) = std::real(m(1, 1));
      a(row, 2) = std::real(m(2, 2));
      a(row, 3) = 2 * std::real(m(0, 1));
      a(row, 4) = 2 * std::imag(m(0, 1));
      a(row, 5) = 2 * std::real(m(0, 2));
      a(row, 6) = 2 * std::imag(m(0, 2));
      a(row, 7) = 2 * std::real(m(1, 2));
      a(row, 8) = 2 * std::imag(m(1, 2));
      b(row) = data.fractions[i][j];
    }
  a.row(18).setZero();
  a(18, 0) = a(18, 1) = a(18, 2) = 1;
  b(18) = 1;
  const Eigen::VectorXd x = a.colPivHouseholderQr().solve(b);

  Mat3 rho;
  rho(0, 0) = x(0);
  rho(1, 1) = x(1);
  rho(2, 2) = x(2);
  rho(0, 1) = cplx(x(3), x(4));
  rho(1, 0) = std::conj(rho(0, 1));
  rho(0, 2) = cplx(x(5), x(6));
  rho(2, 0) = std::conj(rho(0, 2));
  rho(1, 2) = cplx(x(7), x(8));
  rho(2, 1) = std::conj(rho(1, 2));

  Eigen::SelfAdjointEigenSolver<Mat3> es(rho);
  const Eigen::Vector3d ev = es.eigenvalues().cwiseMax(0.0);
  const double tr = ev.sum();
  if (tr <= 0) return Mat3::Identity() / 3.0;
  return es.eigenvectors() * (ev / tr).asDiagonal() *
         es.eigenvectors().adjoint();
}

double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Exact binomial sampling by inverse CDF, scanning outward from the mode so
// the probability mass never underflows for large n.
long long binomial_draw(long long n, double p, std::mt19937_64& g) {
  if (n <= 0 || p <= 0) return 0;
  if (p >= 1) return n;
  const double u = uniform01(g);
  long long m = static_cast<long long>(std::floor((n + 1) * p));
  m = std::min(m, n);
  const double lpm = std::lgamma(n + 1.0) - std::lgamma(m + 1.0) -
                     std::lgamma(n - m + 1.0) + m * std::log(p) +
                     (n - m) * std::log1p(-p);
  const double pm = std::exp(lpm);
  const double r = p / (1 - p);
  double c = pm;
  if (u < c) return m;
  double up_pmf = pm, down_pmf = pm;
  long long up = m, down = m;
  while (up < n || down > 0) {
    if (up < n) {
      up_pmf *= r * static_cast<double>(n - up) / static_cast<double>(up + 1);
      ++up;
      c += up_pmf;
      if (u < c) return up;
    }
    if (down > 0) {
      down_pmf *= static_cast<double>(down) /
                  (r * static_cast<double>(n - down + 1));
      --down;
      c += down_pmf;
      if (u < c) return down;
    }
  }
  return m;  // unreachable up to floating-point tail loss
}

std::array<long long, 3> multinomial3(long long n, double p0, double p1,
                                      double p2, std::mt19937_64& g) {
  p0 = std::max(p0, 0.0);
  p1 = std::max(p1, 0.0);
  p2 = std::max(p2, 0.0);
  const double s = p0 + p1 + p2;
  if (s <= 0) throw std::invalid_argument("multinomial3: zero mass");
  const long long c0 = binomial_draw(n, p0 / s, g);
  const double rem = p1 + p2;
  const long long c1 =
      rem <= 0 ? 0 : binomial_draw(n - c0, std::min(1.0, p1 / rem), g);
  return {c0, c1, n - c0 - c1};
}

} // namespace

const Mat3& readout_projector(int readout, int outcome) {
  if (readout < 0 || readout > 5 || outcome < 0 || outcome > 2)
    throw std::out_of_range("readout_projector: index out of range");
  return projector_table()[readout][outcome];
}

TomographyData simulate_fractions(const Mat3& rho) {
  TomographyData d;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 3; ++j)
      d.fractions[i][j] = std::real((readout_projector(i, j) * rho).trace());
  return d;
}

TomographyData simulate_fractions_multinomial(const Mat3& rho, long long atoms,
                                              std::uint64_t seed) {
  return add_counting_noise(simulate_fractions(rho), atoms, seed);
}

TomographyData add_counting_noise(const TomographyData& exact, long long atoms,
                                  std::uint64_t seed) {
  if (atoms <= 0) throw std::invalid_argument("add_counting_noise: atoms <= 0");
  std::mt19937_64 rng(seed);
  TomographyData d = exact;
  d.atoms = atoms;
  for (int i = 0; i < 6; ++i) {
    const auto c = multinomial3(atoms, exact.fractions[i][0],
                                exact.fractions[i][1], exact.fractions[i][2],
                                rng);
    for (int j = 0; j < 3; ++j)
      d.fractions[i][j] =
          static_cast<double>(c[j]) / static_cast<double>(atoms);
  }
  return d;
}

MleResult mle_reconstruct(const TomographyData& data, int max_iters,
                          double step_tol) {
  const ProjTable& pt = projector_table();
  static constexpr int kGammas[] = {1, 2, 4, 8, 16, 32, 64};

  MleResult res;
  Mat3 rho = Mat3::Identity() / 3.0;
  const Mat3 lin = linear_inversion_psd(data);
  double ll = loglik_of(rho, data);

  for (int it = 1; it <= max_iters; ++it) {
    res.iterations = it;

    // Q = sum f/p * P, with the blend guard for vanishing denominators.
    Mat3 q = Mat3::Zero();
    bool degenerate = false;
    for (int i = 0; i < 6 && !degenerate; ++i)
      for (int j = 0; j < 3; ++j) {
        const double f = data.fractions[i][j];
        if (f <= 0) continue;
        if (std::real((pt[i][j] * rho).trace()) <= 1e-15) {
          degenerate = true;
          break;
        }
      }
    if (degenerate) {
      res.regularized = true;
      rho = (1 - 1e-12) * rho + (1e-12 / 3) * Mat3::Identity();
      ll = loglik_of(rho, data);
    }
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 3; ++j) {
        const double f = data.fractions[i][j];
        if (f <= 0) continue;
        const double p = std::real((pt[i][j] * rho).trace());
        q += (f / p) * pt[i][j];
      }

    Eigen::SelfAdjointEigenSolver<Mat3> es(q);
    Eigen::Vector3d spec = es.eigenvalues().cwiseMax(0.0);
    const double top = spec.maxCoeff();
    if (top > 0) spec /= top;

    Mat3 best_rho = rho;
    double best_ll = -std::numeric_limits<double>::infinity();
    auto consider = [&](const Mat3& cand) {
      const double l = loglik_of(cand, data);
      if (l > best_ll) {
        best_ll = l;
        best_rho = cand;
      }
    };
    for (int g : kGammas) {
      Eigen::Vector3d powered = spec;
      for (int k = 0; k < 3; ++k) powered(k) = std::pow(spec(k), g);
      const Mat3 qg =
          es.eigenvectors() * powered.asDiagonal() * es.eigenvectors().adjoint();
      Mat3 cand = qg * rho * qg;
      const double tr = std::real(cand.trace());
      if (!(tr > 1e-300)) continue;
      cand /= tr;
      cand = 0.5 * (cand + cand.adjoint().eval());
      consider(cand);
    }
    consider(lin);

    if (best_ll < ll - 1e-12) {
      res.converged = true;  // no candidate improves: fixed point reached
      break;
    }
    if (ll > best_ll)
      res.max_loglik_decrease = std::max(res.max_loglik_decrease, ll - best_ll);
    const double step = (best_rho - rho).norm();
    rho = best_rho;
    ll = best_ll;
    if (step <= step_tol) {
      res.converged = true;
      break;
    }
  }
  res.rho = rho;
  res.loglik = ll;
  return res;
}

StateMetrics state_metrics(const Mat3& rho, const Vec3& ideal_state) {
  const double p = purity(rho);
  const double f = state_fidelity(rho, ideal_state);
  return {p, f, purity_rescaled_fidelity(f, p)};
}

std::vector<TomographyData> ensemble_fractions(const PulseSequence& seq,
                                               const EnsembleSpec& spec,
                                               const std::vector<Vec3>& inputs,
                                               double omega,
                                               DetuningFrame frame,
                                               double step_scale) {
  double wsum = 0;
  for (const EnsembleSample& s : spec.samples) wsum += s.weight;
  if (std::abs(wsum - 1.0) > 1e-12)
    throw std::invalid_argument("ensemble_fractions: weights not normalized");

  std::vector<TomographyData> out(inputs.size());
  for (int k = 0; k < 6; ++k) {
    PulseSequence run;
    run.pulses = seq.pulses;
    run.pulses.push_back(fold_phase(readout_pulses()[k], seq.eta, seq.eps));
    for (const EnsembleSample& s : spec.samples) {
      const Mat3 w = propagate_pulses(run, omega, s.delta_a, s.delta_b, frame,
                                      step_scale);
      for (std::size_t m = 0; m < inputs.size(); ++m) {
        const Vec3 amp = w * inputs[m];
        for (int j = 0; j < 3; ++j)
          out[m].fractions[k][j] += s.weight * std::norm(amp(j));
      }
    }
  }
  return out;
}

std::vector<AveragingPoint> averaging_study(const Mat3& rho,
                                            const Vec3& ideal_state,
                                            int max_scans, int trials,
                                            long long atoms,
                                            std::uint64_t seed) {
  if (max_scans < 1 || trials < 1)
    throw std::invalid_argument("averaging_study: counts must be >= 1");
  std::vector<AveragingPoint> out;
  out.reserve(max_scans);
  std::uint64_t stream = 0;
  for (int n = 1; n <= max_scans; ++n) {
    AveragingPoint pt{n,
                      0, std::numeric_limits<double>::infinity(),
                      -std::numeric_limits<double>::infinity(),
                      0, std::numeric_limits<double>::infinity(),
                      -std::numeric_limits<double>::infinity(),
                      0, std::numeric_limits<double>::infinity(),
                      -std::numeric_limits<double>::infinity()};
    for (int t = 0; t < trials; ++t) {
      TomographyData avg;
      if (atoms > 0) avg.atoms = atoms;
      avg.scans = n;
      for (int s = 0; s < n; ++s) {
        const TomographyData d =
            atoms > 0 ? simulate_fractions_multinomial(rho, atoms,
                                                       derive_seed(seed, stream++))
                      : simulate_fractions(rho);
        for (int i = 0; i < 6; ++i)
          for (int j = 0; j < 3; ++j) avg.fractions[i][j] += d.fractions[i][j];
      }
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 3; ++j) avg.fractions[i][j] /= n;
      const MleResult rec = mle_reconstruct(avg);
      const StateMetrics sm = state_metrics(rec.rho, ideal_state);
      pt.mean_f += sm.fidelity;
      pt.min_f = std::min(pt.min_f, sm.fidelity);
      pt.max_f = std::max(pt.max_f, sm.fidelity);
      pt.mean_p += sm.purity;
      pt.min_p = std::min(pt.min_p, sm.purity);
      pt.max_p = std::max(pt.max_p, sm.purity);
      pt.mean_fp += sm.fidelity_pure;
      pt.min_fp = std::min(pt.min_fp, sm.fidelity_pure);
      pt.max_fp = std::max(pt.max_fp, sm.fidelity_pure);
    }
    pt.mean_f /= trials;
    pt.mean_p /= trials;
    pt.mean_fp /= trials;
    out.push_back(pt);
  }
  return out;
}

} // namespace qutrit
