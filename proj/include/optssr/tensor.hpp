#pragma once

#include <array>
#include <cmath>

#include <Eigen/Dense>

namespace optssr {

/// Symmetric second-order tensor in 3D, six independent components.
/// Plane-strain strain tensors keep zz = yz = xz = 0; plane-strain stresses
/// keep yz = xz = 0 with zz generally nonzero.
struct SymTensor3 {
  double xx = 0.0, yy = 0.0, zz = 0.0;
  double xy = 0.0, yz = 0.0, xz = 0.0;

  static SymTensor3 identity() { return {1.0, 1.0, 1.0, 0.0, 0.0, 0.0}; }
  static SymTensor3 plane_strain(double exx, double eyy, double exy) {
    return {exx, eyy, 0.0, exy, 0.0, 0.0};
  }

  double trace() const { return xx + yy + zz; }

  /// Full contraction a : b (off-diagonal entries count twice).
  double dot(const SymTensor3& o) const {
    return xx * o.xx + yy * o.yy + zz * o.zz +
           2.0 * (xy * o.xy + yz * o.yz + xz * o.xz);
  }
  double norm() const { return std::sqrt(dot(*this)); }

  SymTensor3 deviator() const {
    const double m = trace() / 3.0;
    return {xx - m, yy - m, zz - m, xy, yz, xz};
  }

  Eigen::Matrix3d matrix() const {
    Eigen::Matrix3d a;
    a << xx, xy, xz, xy, yy, yz, xz, yz, zz;
    return a;
  }

  SymTensor3& operator+=(const SymTensor3& o) {
    xx += o.xx; yy += o.yy; zz += o.zz;
    xy += o.xy; yz += o.yz; xz += o.xz;
    return *this;
  }
  SymTensor3& operator-=(const SymTensor3& o) {
    xx -= o.xx; yy -= o.yy; zz -= o.zz;
    xy -= o.xy; yz -= o.yz; xz -= o.xz;
    return *this;
  }
  SymTensor3& operator*=(double s) {
    xx *= s; yy *= s; zz *= s; xy *= s; yz *= s; xz *= s;
    return *this;
  }
};

inline SymTensor3 operator+(SymTensor3 a, const SymTensor3& b) { return a += b; }
inline SymTensor3 operator-(SymTensor3 a, const SymTensor3& b) { return a -= b; }
inline SymTensor3 operator*(double s, SymTensor3 a) { return a *= s; }
inline SymTensor3 operator*(SymTensor3 a, double s) { return a *= s; }

/// Mandel 6-vector (xx, yy, zz, sqrt2*xy, sqrt2*yz, sqrt2*xz). The scaling
/// preserves inner products, so 6x6 operators compose by plain matrix algebra.
using Mandel6 = Eigen::Matrix<double, 6, 1>;
using Tangent6 = Eigen::Matrix<double, 6, 6>;

inline Mandel6 to_mandel(const SymTensor3& t) {
  const double r2 = std::sqrt(2.0);
  Mandel6 m;
  m << t.xx, t.yy, t.zz, r2 * t.xy, r2 * t.yz, r2 * t.xz;
  return m;
}

inline SymTensor3 from_mandel(const Mandel6& m) {
  const double r2 = std::sqrt(2.0);
  return {m[0], m[1], m[2], m[3] / r2, m[4] / r2, m[5] / r2};
}

/// Spectral decomposition: eigenvalues sorted descending, orthonormal
/// eigenvectors and the matching rank-one eigenprojections.
struct Spectral3 {
  std::array<double, 3> values{};         // e1 >= e2 >= e3
  std::array<Eigen::Vector3d, 3> axes{};  // unit eigenvectors
  std::array<SymTensor3, 3> projections{};

  SymTensor3 reconstruct() const {
    SymTensor3 t;
    for (int i = 0; i < 3; ++i) t += values[i] * projections[i];
    return t;
  }
};

/// Closed-form trigonometric eigensolver with a cyclic-Jacobi fallback when
/// eigenvalue gaps fall below 1e-8 of the tensor scale.
Spectral3 spectral_decompose(const SymTensor3& t);

/// Isotropic linear elasticity; stress units follow the input units (kPa).
class Elasticity {
 public:
  Elasticity(double youngs, double poisson);

  double youngs() const { return youngs_; }
  double poisson() const { return poisson_; }
  double bulk() const { return bulk_; }
  double shear() const { return shear_; }
  double lame() const { return lame_; }

  /// sigma = Lambda tr(eps) I + 2 G eps
  SymTensor3 stress(const SymTensor3& strain) const;

  /// Pointwise compliance energy 1/2 C^{-1} sigma : sigma.
  double compliance_energy(const SymTensor3& stress) const;

 private:
  double youngs_, poisson_;
  double bulk_, shear_, lame_;
};

}  // namespace optssr
