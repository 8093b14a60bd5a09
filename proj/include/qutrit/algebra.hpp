#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>

namespace qutrit {

using cplx = std::complex<double>;
using Mat3 = Eigen::Matrix3cd;
using Vec3 = Eigen::Vector3cd;

inline constexpr double pi = 3.14159265358979323846;

// Standard Gell-Mann matrices, k = 1..8.
const Mat3& gell_mann(int k);

// exp(-i H t) for Hermitian H, via eigendecomposition (exactly unitary up to
// solver accuracy).
Mat3 exp_hermitian(const Mat3& h, double t);

// min over a global phase of the Frobenius distance ||u - e^{i theta} v||_F.
// The minimum is attained analytically at theta = -arg tr(u^dag v).
double distance_mod_phase(const Mat3& u, const Mat3& v);

double trace_distance(const Mat3& a, const Mat3& b);

double purity(const Mat3& rho);

// <psi| rho |psi>
double state_fidelity(const Mat3& rho, const Vec3& psi);

// Rescale the traceless part of rho by 1/purity; the resulting "nearest pure
// estimate" is not necessarily a physical state and fidelities computed
// against it may exceed 1.
Mat3 purity_rescaled_state(const Mat3& rho);
double purity_rescaled_fidelity(double fidelity, double purity);

// Deterministic sub-stream derivation from one master seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

// Haar-distributed SU(3) element (QR of a complex Ginibre matrix, phase-fixed
// and det-normalized).
Mat3 haar_su3(std::mt19937_64& rng);

Vec3 random_pure_state(std::mt19937_64& rng);

// Hilbert-Schmidt style random density matrix: G G^dag / tr.
Mat3 random_mixed_state(std::mt19937_64& rng);

} // namespace qutrit
