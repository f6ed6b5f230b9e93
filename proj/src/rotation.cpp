// SPDX-License-Identifier: Apache-2.0
#include "cransim/rotation.hpp"

#include <cmath>

namespace cransim {

RotationMatrix RotationMatrix::operator*(const RotationMatrix& o) const {
    RotationMatrix r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
            r(i, j) = s;
        }
    return r;
}

double RotationMatrix::det() const {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
}

double RotationMatrix::orthonormality_error() const {
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += (*this)(k, i) * (*this)(k, j);
            const double target = (i == j) ? 1.0 : 0.0;
            worst = std::max(worst, std::fabs(s - target));
        }
    return worst;
}

RotationMatrix rotation_x(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    RotationMatrix r;
    r.m = {1, 0, 0,
           0, c, -s,
           0, s, c};
    return r;
}

RotationMatrix rotation_y(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    RotationMatrix r;
    r.m = {c, 0, s,
           0, 1, 0,
           -s, 0, c};
    return r;
}

RotationMatrix rotation_z(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    RotationMatrix r;
    r.m = {c, -s, 0,
           s, c, 0,
           0, 0, 1};
    return r;
}

RotationMatrix compose_rotation(const OrientationAngles& o) {
    const double c0 = std::cos(o.theta0), s0 = std::sin(o.theta0);
    const double cp = std::cos(o.phi0), sp = std::sin(o.phi0);
    RotationMatrix r;
    r.m = {cp * c0, -sp, cp * s0,
           sp * c0, cp, sp * s0,
           -s0, 0, c0};
    return r;
}

SphericalBasis spherical_basis(double theta, double phi) {
    const double ct = std::cos(theta), st = std::sin(theta);
    const double cp = std::cos(phi), sp = std::sin(phi);
    return {{ct * cp, ct * sp, -st}, {-sp, cp, 0.0}};
}

Vec3 direction_from_angles(double theta, double phi) {
    const double st = std::sin(theta);
    return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

SphericalAngles angles_from_direction(const Vec3& v) {
    const double n = norm(v);
    const double theta = std::acos(v.z / n);
    double phi = std::atan2(v.y, v.x);
    if (phi < 0.0) phi += kTwoPi;
    return {theta, phi};
}

SphericalAngles to_local_angles(const RotationMatrix& r, double theta_gcs, double phi_gcs) {
    return angles_from_direction(r.apply_transposed(direction_from_angles(theta_gcs, phi_gcs)));
}

SphericalAngles to_global_angles(const RotationMatrix& r, double theta_lcs, double phi_lcs) {
    return angles_from_direction(r.apply(direction_from_angles(theta_lcs, phi_lcs)));
}

OrientationTransform orientation_transform(double theta, double phi,
                                           double theta_p, double phi_p,
                                           const RotationMatrix& r) {
    const SphericalBasis gcs = spherical_basis(theta, phi);
    const SphericalBasis lcs = spherical_basis(theta_p, phi_p);
    const Vec3 rotated = r.apply(lcs.e_theta);
    return {dot(gcs.e_theta, rotated), dot(gcs.e_phi, rotated)};
}

OrientationTransform orientation_transform_closed_form(double theta, double theta0,
                                                       double theta_p, double phi_p,
                                                       double phi_rel) {
    const double ct = std::cos(theta), st = std::sin(theta);
    const double c0 = std::cos(theta0), s0 = std::sin(theta0);
    const double ctp = std::cos(theta_p), stp = std::sin(theta_p);
    const double cpp = std::cos(phi_p), spp = std::sin(phi_p);
    const double cr = std::cos(phi_rel), sr = std::sin(phi_rel);

    const double cos_psi = (ct * c0 * cr + st * s0) * ctp * cpp + ct * sr * ctp * spp -
                           stp * (ct * s0 * cr - st * c0);
    const double sin_psi = -c0 * sr * ctp * cpp + cr * ctp * spp - s0 * sr * stp;
    return {cos_psi, sin_psi};
}

}  // namespace cransim
