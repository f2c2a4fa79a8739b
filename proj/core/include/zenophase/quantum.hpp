#pragma once

// Pure-state quantum mechanics for Hilbert spaces of dimension 2 to 5.
//
// Two-level basis ordering is (|down>, |up>) with sigma_z |down> = -|down>.
// In that ordering sigma_y = [[0, i], [-i, 0]], which keeps the standard
// algebra [sigma_x, sigma_y] = 2i sigma_z. All generators are in rad/s.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace zenophase {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

inline constexpr std::size_t kMinDim = 2;
inline constexpr std::size_t kMaxDim = 5;

/// Wraps an angle into (-pi, pi].
double wrap_phase(double phi);

/// Angular frequency (rad/s) from a frequency in Hz.
constexpr double angular(double hz) { return kTwoPi * hz; }

class StateVector {
 public:
  StateVector(CVector amps, std::vector<std::string> labels);

  /// Basis state |index> with the given labels.
  static StateVector basis(std::size_t index, std::vector<std::string> labels);

  const CVector& amps() const { return amps_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  cplx operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }
  double norm_squared() const { return amps_.squaredNorm(); }

  /// Same labels, new amplitudes (validated).
  StateVector with_amps(CVector amps) const;

 private:
  CVector amps_;
  std::vector<std::string> labels_;
};

/// Qubit labels and basis states.
std::vector<std::string> qubit_labels();
StateVector qubit_down();
StateVector qubit_up();

class HermitianOperator {
 public:
  static constexpr double kTolerance = 1e-12;
  explicit HermitianOperator(CMatrix m);
  const CMatrix& matrix() const { return m_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }

 private:
  CMatrix m_;
};

class UnitaryOperator {
 public:
  static constexpr double kTolerance = 1e-10;
  explicit UnitaryOperator(CMatrix m);
  const CMatrix& matrix() const { return m_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }

 private:
  CMatrix m_;
};

class Projector {
 public:
  static constexpr double kTolerance = 1e-12;
  explicit Projector(CMatrix m);
  /// |psi><psi| for a normalized psi.
  static Projector onto(const StateVector& psi);
  const CMatrix& matrix() const { return m_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }

 private:
  CMatrix m_;
};

namespace pauli {
CMatrix identity();
CMatrix x();
CMatrix y();
CMatrix z();
/// n . sigma for a 3-vector n.
CMatrix dot(const Vec3& n);
}  // namespace pauli

/// exp(-i eps t / 2) [cos(omega t / 2) 1 - i sin(omega t / 2) n.sigma], the
/// propagator of H = omega n.sigma / 2 + eps 1 / 2. Frequencies in rad/s.
UnitaryOperator su2_propagator(const Vec3& n, double omega, double epsilon, double t);

/// H = omega n.sigma / 2 + eps 1 / 2 as a matrix (rad/s).
HermitianOperator su2_hamiltonian(const Vec3& n, double omega, double epsilon);

/// exp(-i H t) by eigendecomposition. Diagonal generators are exponentiated
/// elementwise.
UnitaryOperator expm_hermitian(const HermitianOperator& h, double t);

/// exp(-i G t) for an arbitrary (possibly non-Hermitian) generator G. Used
/// for lossy pulse windows where G = H - i Gamma/2 |up><up|.
CMatrix evolution_operator(const CMatrix& generator, double t);

StateVector apply(const UnitaryOperator& u, const StateVector& psi);
StateVector apply(const Projector& p, const StateVector& psi);
/// Applies a general linear map; the result must not gain norm.
StateVector apply(const CMatrix& m, const StateVector& psi);

/// <a|b>, conjugate-linear in the first argument.
cplx overlap(const StateVector& a, const StateVector& b);

/// max_ij |M_ij|
double max_abs(const CMatrix& m);

}  // namespace zenophase
