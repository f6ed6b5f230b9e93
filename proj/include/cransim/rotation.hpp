// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>

#include "cransim/geom.hpp"

namespace cransim {

// Device orientation: azimuth rotation phi0 about z, then elevation tilt
// theta0 about the (rotated) y axis.
struct OrientationAngles {
    double theta0 = 0.0;  // [0, pi]
    double phi0 = 0.0;    // [0, 2*pi)

    bool is_aligned() const { return theta0 == 0.0 && phi0 == 0.0; }
};

struct RotationMatrix {
    // row-major
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    double operator()(int r, int c) const { return m[3 * r + c]; }
    double& operator()(int r, int c) { return m[3 * r + c]; }

    Vec3 apply(const Vec3& v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }

    // R^T v; for a rotation this is the inverse transform
    Vec3 apply_transposed(const Vec3& v) const {
        return {m[0] * v.x + m[3] * v.y + m[6] * v.z,
                m[1] * v.x + m[4] * v.y + m[7] * v.z,
                m[2] * v.x + m[5] * v.y + m[8] * v.z};
    }

    RotationMatrix operator*(const RotationMatrix& o) const;

    double det() const;
    // max |R^T R - I| entry
    double orthonormality_error() const;
};

// Right-hand-rule rotations about the coordinate axes.
RotationMatrix rotation_x(double theta);
RotationMatrix rotation_y(double theta);
RotationMatrix rotation_z(double theta);

// R = R_z(phi0) * R_y(theta0), written out in closed form.
RotationMatrix compose_rotation(const OrientationAngles& o);

// Spherical basis vectors at (theta, phi); theta measured from +z.
//   e_theta = (cos t cos p, cos t sin p, -sin t)
//   e_phi   = (-sin p, cos p, 0)
struct SphericalBasis {
    Vec3 e_theta;
    Vec3 e_phi;
};
SphericalBasis spherical_basis(double theta, double phi);

// Unit direction for spherical angles, and back.
Vec3 direction_from_angles(double theta, double phi);
struct SphericalAngles {
    double theta;
    double phi;
};
SphericalAngles angles_from_direction(const Vec3& v);

// Map a global-frame direction into the device frame (and back).
SphericalAngles to_local_angles(const RotationMatrix& r, double theta_gcs, double phi_gcs);
SphericalAngles to_global_angles(const RotationMatrix& r, double theta_lcs, double phi_lcs);

// Pattern-rotation coefficients between the global and device frames:
//   cos_psi = e_theta_gcs(theta,phi)^T R e_theta_lcs(theta',phi')
//   sin_psi = e_phi_gcs(theta,phi)^T  R e_theta_lcs(theta',phi')
// When (theta,phi) is the global image of (theta',phi') under R, the pair
// lies on the unit circle.
struct OrientationTransform {
    double cos_psi;
    double sin_psi;
};
OrientationTransform orientation_transform(double theta, double phi,
                                           double theta_p, double phi_p,
                                           const RotationMatrix& r);

// Expanded scalar forms of the same coefficients for R = R_z(phi0)*R_y(theta0).
// phi_rel is the azimuth offset phi - phi0.
OrientationTransform orientation_transform_closed_form(double theta, double theta0,
                                                       double theta_p, double phi_p,
                                                       double phi_rel);

}  // namespace cransim
