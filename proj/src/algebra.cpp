#include "qutrit/algebra.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace qutrit {

namespace {

std::array<Mat3, 9> make_gell_mann() {
  std::array<Mat3, 9> g;
  const cplx i(0.0, 1.0);
  for (auto& m : g) m.setZero();
  g[1] << 0, 1, 0, 1, 0, 0, 0, 0, 0;
  g[2] << 0, -i, 0, i, 0, 0, 0, 0, 0;
  g[3] << 1, 0, 0, 0, -1, 0, 0, 0, 0;
  g[4] << 0, 0, 1, 0, 0, 0, 1, 0, 0;
  g[5] << 0, 0, -i, 0, 0, 0, i, 0, 0;
  g[6] << 0, 0, 0, 0, 0, 1, 0, 1, 0;
  g[7] << 0, 0, 0, 0, 0, -i, 0, i, 0;
  g[8] << 1, 0, 0, 0, 1, 0, 0, 0, -2;
  g[8] /= std::sqrt(3.0);
  return g;
}

} // namespace

const Mat3& gell_mann(int k) {
  static const std::array<Mat3, 9> g = make_gell_mann();
  if (k < 1 || k > 8) throw std::invalid_argument("gell_mann: k must be 1..8");
  return g[static_cast<std::size_t>(k)];
}

Mat3 exp_hermitian(const Mat3& h, double t) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(h);
  Vec3 phases;
  for (int k = 0; k < 3; ++k)
    phases(k) = std::exp(cplx(0.0, -es.eigenvalues()(k) * t));
  return es.eigenvectors() * phases.asDiagonal() *
         es.eigenvectors().adjoint();
}

double distance_mod_phase(const Mat3& u, const Mat3& v) {
  // The closed form sqrt(|u|^2 + |v|^2 - 2|tr(u^+ v)|) loses everything below
  // sqrt(eps) to cancellation; evaluating the difference at the optimal phase
  // arg tr(u^+ v) keeps machine-precision resolution for near-equal inputs.
  const cplx tr = (u.adjoint() * v).trace();
  if (std::abs(tr) == 0.0) return std::sqrt(u.squaredNorm() + v.squaredNorm());
  const cplx phase = tr / std::abs(tr);
  return (u * phase - v).norm();
}

double trace_distance(const Mat3& a, const Mat3& b) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(a - b);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double purity(const Mat3& rho) { return (rho * rho).trace().real(); }

double state_fidelity(const Mat3& rho, const Vec3& psi) {
  return (psi.adjoint() * rho * psi)(0).real();
}

Mat3 purity_rescaled_state(const Mat3& rho) {
  const Mat3 third = Mat3::Identity() / 3.0;
  return (rho - third) / purity(rho) + third;
}

double purity_rescaled_fidelity(double fidelity, double purity) {
  return (fidelity - 1.0 / 3.0) / purity + 1.0 / 3.0;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Mat3 haar_su3(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat3 a;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) a(r, c) = cplx(n(rng), n(rng));
  Eigen::HouseholderQR<Mat3> qr(a);
  Mat3 q = qr.householderQ();
  Mat3 r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < 3; ++k) {
    const cplx d = r(k, k);
    q.col(k) *= d / std::abs(d);
  }
  const cplx det = q.determinant();
  return q * std::exp(cplx(0.0, -std::arg(det) / 3.0));
}

Vec3 random_pure_state(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v;
  for (int k = 0; k < 3; ++k) v(k) = cplx(n(rng), n(rng));
  return v.normalized();
}

Mat3 random_mixed_state(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat3 g;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) g(r, c) = cplx(n(rng), n(rng));
  Mat3 rho = g * g.adjoint();
  return rho / rho.trace().real();
}

} // namespace qutrit
