#include "zenophase/quantum.hpp"

#include "zenophase/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <string>
#include <utility>

namespace zenophase {

namespace {

constexpr double kNormSlack = 1e-12;

void check_dim(Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (rows != cols) {
    throw DomainError(std::string(what) + ": matrix is not square");
  }
  if (rows < static_cast<Eigen::Index>(kMinDim) || rows > static_cast<Eigen::Index>(kMaxDim)) {
    throw DomainError(std::string(what) + ": dimension " + std::to_string(rows) +
                      " outside [2, 5]");
  }
}

bool is_diagonal(const CMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (i != j && m(i, j) != cplx(0.0, 0.0)) return false;
    }
  }
  return true;
}

// exp(-i d t) for each diagonal entry d; exact for diagonal generators and
// bit-reproducible between generators that share diagonal entries.
CMatrix diagonal_exponential(const CMatrix& g, double t) {
  CMatrix out = CMatrix::Zero(g.rows(), g.cols());
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    out(i, i) = std::exp(cplx(0.0, -t) * g(i, i));
  }
  return out;
}

}  // namespace

double wrap_phase(double phi) {
  double r = std::remainder(phi, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(CVector amps, std::vector<std::string> labels)
    : amps_(std::move(amps)), labels_(std::move(labels)) {
  const auto n = static_cast<std::size_t>(amps_.size());
  if (n < kMinDim || n > kMaxDim) {
    throw DomainError("StateVector: dimension " + std::to_string(n) + " outside [2, 5]");
  }
  if (labels_.size() != n) {
    throw DomainError("StateVector: " + std::to_string(labels_.size()) + " labels for " +
                      std::to_string(n) + " amplitudes");
  }
  if (!amps_.allFinite()) throw DomainError("StateVector: non-finite amplitude");
  if (amps_.squaredNorm() > 1.0 + kNormSlack) {
    throw DomainError("StateVector: norm exceeds 1");
  }
}

StateVector StateVector::basis(std::size_t index, std::vector<std::string> labels) {
  if (index >= labels.size()) throw DomainError("StateVector::basis: index out of range");
  CVector a = CVector::Zero(static_cast<Eigen::Index>(labels.size()));
  a(static_cast<Eigen::Index>(index)) = 1.0;
  return StateVector(std::move(a), std::move(labels));
}

StateVector StateVector::with_amps(CVector amps) const {
  return StateVector(std::move(amps), labels_);
}

std::vector<std::string> qubit_labels() { return {"down", "up"}; }
StateVector qubit_down() { return StateVector::basis(0, qubit_labels()); }
StateVector qubit_up() { return StateVector::basis(1, qubit_labels()); }

// ---------------------------------------------------------------------------
// Operators

HermitianOperator::HermitianOperator(CMatrix m) : m_(std::move(m)) {
  check_dim(m_.rows(), m_.cols(), "HermitianOperator");
  if (max_abs(m_ - m_.adjoint()) >= kTolerance) {
    throw DomainError("HermitianOperator: matrix is not Hermitian");
  }
}

UnitaryOperator::UnitaryOperator(CMatrix m) : m_(std::move(m)) {
  check_dim(m_.rows(), m_.cols(), "UnitaryOperator");
  const CMatrix id = CMatrix::Identity(m_.rows(), m_.cols());
  if (max_abs(m_.adjoint() * m_ - id) >= kTolerance) {
    throw DomainError("UnitaryOperator: matrix is not unitary");
  }
}

Projector::Projector(CMatrix m) : m_(std::move(m)) {
  check_dim(m_.rows(), m_.cols(), "Projector");
  if (max_abs(m_ - m_.adjoint()) >= kTolerance || max_abs(m_ * m_ - m_) >= kTolerance) {
    throw DomainError("Projector: matrix is not an orthogonal projector");
  }
}

Projector Projector::onto(const StateVector& psi) {
  if (std::abs(psi.norm_squared() - 1.0) > 1e-12) {
    throw DomainError("Projector::onto: state is not normalized");
  }
  return Projector(psi.amps() * psi.amps().adjoint());
}

namespace pauli {
CMatrix identity() { return CMatrix::Identity(2, 2); }
CMatrix x() {
  CMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}
CMatrix y() {
  CMatrix m(2, 2);
  m << cplx(0.0, 0.0), cplx(0.0, 1.0), cplx(0.0, -1.0), cplx(0.0, 0.0);
  return m;
}
CMatrix z() {
  CMatrix m(2, 2);
  m << -1.0, 0.0, 0.0, 1.0;
  return m;
}
CMatrix dot(const Vec3& n) { return n.x() * x() + n.y() * y() + n.z() * z(); }
}  // namespace pauli

// ---------------------------------------------------------------------------
// Propagators

namespace {
void check_axis(const Vec3& n) {
  if (!n.allFinite() || std::abs(n.norm() - 1.0) > 1e-12) {
    throw DomainError("su2: rotation axis is not a unit vector");
  }
}
}  // namespace

UnitaryOperator su2_propagator(const Vec3& n, double omega, double epsilon, double t) {
  check_axis(n);
  if (!(omega >= 0.0)) throw DomainError("su2_propagator: omega must be non-negative");
  const double half = 0.5 * omega * t;
  const cplx global = std::exp(cplx(0.0, -0.5 * epsilon * t));
  CMatrix u = std::cos(half) * pauli::identity() - cplx(0.0, std::sin(half)) * pauli::dot(n);
  return UnitaryOperator(global * u);
}

HermitianOperator su2_hamiltonian(const Vec3& n, double omega, double epsilon) {
  check_axis(n);
  return HermitianOperator(0.5 * omega * pauli::dot(n) + 0.5 * epsilon * pauli::identity());
}

UnitaryOperator expm_hermitian(const HermitianOperator& h, double t) {
  const CMatrix& m = h.matrix();
  if (is_diagonal(m)) return UnitaryOperator(diagonal_exponential(m, t));
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  if (es.info() != Eigen::Success) throw DomainError("expm_hermitian: eigensolver failed");
  const Eigen::VectorXd& lambda = es.eigenvalues();
  CVector phases(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    phases(i) = std::exp(cplx(0.0, -lambda(i) * t));
  }
  const CMatrix& v = es.eigenvectors();
  return UnitaryOperator(v * phases.asDiagonal() * v.adjoint());
}

CMatrix evolution_operator(const CMatrix& generator, double t) {
  check_dim(generator.rows(), generator.cols(), "evolution_operator");
  if (is_diagonal(generator)) return diagonal_exponential(generator, t);
  if (max_abs(generator - generator.adjoint()) < HermitianOperator::kTolerance) {
    return expm_hermitian(HermitianOperator(generator), t).matrix();
  }
  const CMatrix a = cplx(0.0, -t) * generator;
  return a.exp();
}

StateVector apply(const UnitaryOperator& u, const StateVector& psi) {
  if (u.dim() != psi.dim()) throw DomainError("apply: dimension mismatch");
  return psi.with_amps(u.matrix() * psi.amps());
}

StateVector apply(const Projector& p, const StateVector& psi) {
  if (p.dim() != psi.dim()) throw DomainError("apply: dimension mismatch");
  return psi.with_amps(p.matrix() * psi.amps());
}

StateVector apply(const CMatrix& m, const StateVector& psi) {
  if (static_cast<std::size_t>(m.rows()) != psi.dim() ||
      static_cast<std::size_t>(m.cols()) != psi.dim()) {
    throw DomainError("apply: dimension mismatch");
  }
  return psi.with_amps(m * psi.amps());
}

cplx overlap(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) throw DomainError("overlap: dimension mismatch");
  return a.amps().dot(b.amps());
}

}  // namespace zenophase
