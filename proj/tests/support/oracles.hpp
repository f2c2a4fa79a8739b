#pragma once

// Independent reference computations used by the tests. None of these call
// into the library's propagators or integrators.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;

/// exp(-i H t) by a 40-term Taylor series with scaling and squaring.
inline CMatrix expm_series(const CMatrix& h, double t, int terms = 40) {
  const CMatrix a = cplx(0.0, -t) * h;
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (norm / std::ldexp(1.0, squarings) > 0.5) ++squarings;
  const CMatrix x = a / std::ldexp(1.0, squarings);
  CMatrix sum = CMatrix::Identity(h.rows(), h.cols());
  CMatrix term = sum;
  for (int k = 1; k <= terms; ++k) {
    term = term * x / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

/// Composite Simpson rule with an even number of intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

/// Basis (|down>, |up>) with sigma_z = diag(-1, 1).
inline CMatrix sigma_dot(double nx, double ny, double nz) {
  CMatrix m(2, 2);
  m << cplx(-nz, 0.0), cplx(nx, ny), cplx(nx, -ny), cplx(nz, 0.0);
  return m;
}

/// H = omega n.sigma / 2 + eps / 2 in rad/s.
inline CMatrix qubit_hamiltonian(double omega, double theta, double eps) {
  return 0.5 * omega * sigma_dot(std::sin(theta), 0.0, std::cos(theta)) +
         0.5 * eps * CMatrix::Identity(2, 2);
}

/// Exact state U(t)|down> written out from the Rodrigues form.
inline CVector circle_state(double omega, double theta, double eps, double t) {
  const double c = std::cos(0.5 * omega * t);
  const double s = std::sin(0.5 * omega * t);
  const cplx g = std::exp(cplx(0.0, -0.5 * eps * t));
  CVector v(2);
  // n.sigma |down> = (-cos theta, sin theta)
  v(0) = g * cplx(c, s * std::cos(theta));
  v(1) = g * cplx(0.0, -s * std::sin(theta));
  return v;
}

/// -arg prod <psi_k|psi_{k+1}> around the closed chain of rays.
inline double bargmann(const std::vector<CVector>& states) {
  cplx prod = 1.0;
  const std::size_t n = states.size();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const CVector& next = (k + 2 == n) ? states.front() : states[k + 1];
    prod *= states[k].dot(next);
  }
  return -std::arg(prod);
}

inline double wrap(double x) {
  x = std::remainder(x, 2.0 * kPi);
  return x <= -kPi ? x + 2.0 * kPi : x;
}

/// Absolute distance between two angles on the circle.
inline double angle_distance(double a, double b) { return std::abs(wrap(a - b)); }

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double stddev(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace oracle
