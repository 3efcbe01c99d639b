#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string_view>

namespace hypersr {

// Homogeneous incompressible loading modes: uniaxial tension, pure shear and
// equibiaxial tension.
enum class LoadingMode { UT, PS, EBT };

std::string_view mode_name(LoadingMode mode);
LoadingMode mode_from_name(std::string_view name);  // throws std::invalid_argument

struct Mat3 {
    double m[3][3];

    static Mat3 zero();
    static Mat3 identity();
    static Mat3 diagonal(double a, double b, double c);

    double& operator()(int r, int c) { return m[r][c]; }
    double operator()(int r, int c) const { return m[r][c]; }

    Mat3 operator*(const Mat3& rhs) const;
    Mat3 operator+(const Mat3& rhs) const;
    Mat3 operator-(const Mat3& rhs) const;
    Mat3 scaled(double s) const;
    Mat3 transposed() const;
    double trace() const;
    double det() const;
    Mat3 inverse() const;  // throws std::domain_error when singular
};

struct DeformationState {
    Mat3 F;
    Mat3 C;   // right Cauchy-Green tensor, F^T F
    double J; // det F
};

// Isochoric invariants of the deformation plus the volume ratio.
struct InvariantPoint {
    double I1bar;
    double I2bar;
    double J;
};

// Energy value and its partial derivatives at one invariant point.
struct EnergyDerivatives {
    double psi;
    double dI1;
    double dI2;
    double dJ;
};

// Deformation gradient for the given mode at stretch lambda > 0:
//   UT  diag(l, 1/sqrt(l), 1/sqrt(l))
//   PS  diag(l, 1, 1/l)
//   EBT diag(l, l, 1/l^2)
// All three are volume preserving. Throws std::domain_error for lambda <= 0.
DeformationState deformation(LoadingMode mode, double stretch);

InvariantPoint invariants(const DeformationState& d);

// Nominal stress in the loading direction for an incompressible material,
// with the hydrostatic pressure eliminated through the traction-free faces:
//   UT  P = 2 (l - l^-2) (dI1 + dI2 / l)
//   PS  P = 2 (l - l^-3) (dI1 + dI2)
//   EBT P = 2 (l - l^-5) (dI1 + l^2 dI2)
// dJ never enters because J = 1 in these modes.
double nominal_stress(const EnergyDerivatives& ed, LoadingMode mode, double stretch);

// Full first Piola-Kirchhoff stress tensor for a compressible material
// described by derivatives with respect to (I1bar, I2bar, J):
//   P = 2 [ dI1 J^(-2/3) F
//         + dI2 J^(-2/3) (I1bar F - J^(-2/3) F C)
//         + dJ (J/2) F^-T ]
Mat3 pk1_full(const EnergyDerivatives& ed, const DeformationState& d);

// Central-difference derivatives of an energy evaluator at one invariant
// point. The step per coordinate is h = h_rel * max(1, |x|) and the quotient
// uses the actually representable interval (x+h) - (x-h). The evaluator is
// called as psi(InvariantPoint, extras).
template <typename Psi>
EnergyDerivatives energy_derivatives(Psi&& psi, const InvariantPoint& p,
                                     std::span<const double> extras, double h_rel) {
    if (!(h_rel > 0.0)) {
        throw std::invalid_argument("energy_derivatives: step must be positive");
    }
    auto central = [&](auto&& shifted, double x) {
        const double h = h_rel * std::max(1.0, std::abs(x));
        const double xp = x + h;
        const double xm = x - h;
        return (shifted(xp) - shifted(xm)) / (xp - xm);
    };
    EnergyDerivatives out{};
    out.psi = psi(p, extras);
    out.dI1 = central([&](double v) { return psi(InvariantPoint{v, p.I2bar, p.J}, extras); },
                      p.I1bar);
    out.dI2 = central([&](double v) { return psi(InvariantPoint{p.I1bar, v, p.J}, extras); },
                      p.I2bar);
    out.dJ = central([&](double v) { return psi(InvariantPoint{p.I1bar, p.I2bar, v}, extras); },
                     p.J);
    return out;
}

constexpr double kDefaultFdStep = 1e-5;

}  // namespace hypersr
