#include "hypersr/mechanics.hpp"

#include <cmath>
#include <string>

namespace hypersr {

std::string_view mode_name(LoadingMode mode) {
    switch (mode) {
        case LoadingMode::UT: return "UT";
        case LoadingMode::PS: return "PS";
        case LoadingMode::EBT: return "EBT";
    }
    throw std::invalid_argument("mode_name: unknown loading mode");
}

LoadingMode mode_from_name(std::string_view name) {
    if (name == "UT") return LoadingMode::UT;
    if (name == "PS") return LoadingMode::PS;
    if (name == "EBT") return LoadingMode::EBT;
    throw std::invalid_argument("unknown loading mode: " + std::string(name));
}

Mat3 Mat3::zero() {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = 0.0;
    return r;
}

Mat3 Mat3::identity() {
    Mat3 r = zero();
    r.m[0][0] = r.m[1][1] = r.m[2][2] = 1.0;
    return r;
}

Mat3 Mat3::diagonal(double a, double b, double c) {
    Mat3 r = zero();
    r.m[0][0] = a;
    r.m[1][1] = b;
    r.m[2][2] = c;
    return r;
}

Mat3 Mat3::operator*(const Mat3& rhs) const {
    Mat3 r = zero();
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k)
            for (int j = 0; j < 3; ++j) r.m[i][j] += m[i][k] * rhs.m[k][j];
    return r;
}

Mat3 Mat3::operator+(const Mat3& rhs) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = m[i][j] + rhs.m[i][j];
    return r;
}

Mat3 Mat3::operator-(const Mat3& rhs) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = m[i][j] - rhs.m[i][j];
    return r;
}

Mat3 Mat3::scaled(double s) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = m[i][j] * s;
    return r;
}

Mat3 Mat3::transposed() const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
    return r;
}

double Mat3::trace() const { return m[0][0] + m[1][1] + m[2][2]; }

double Mat3::det() const {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Mat3 Mat3::inverse() const {
    const double d = det();
    if (std::abs(d) < 1e-300) {
        throw std::domain_error("Mat3::inverse: matrix is singular");
    }
    Mat3 r;
    r.m[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / d;
    r.m[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / d;
    r.m[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / d;
    r.m[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / d;
    r.m[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / d;
    r.m[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / d;
    r.m[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / d;
    r.m[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / d;
    r.m[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / d;
    return r;
}

DeformationState deformation(LoadingMode mode, double stretch) {
    if (!(stretch > 0.0) || !std::isfinite(stretch)) {
        throw std::domain_error("deformation: stretch must be positive");
    }
    Mat3 F = Mat3::identity();
    switch (mode) {
        case LoadingMode::UT: {
            const double t = 1.0 / std::sqrt(stretch);
            F = Mat3::diagonal(stretch, t, t);
            break;
        }
        case LoadingMode::PS:
            F = Mat3::diagonal(stretch, 1.0, 1.0 / stretch);
            break;
        case LoadingMode::EBT:
            F = Mat3::diagonal(stretch, stretch, 1.0 / (stretch * stretch));
            break;
    }
    DeformationState d;
    d.F = F;
    d.C = F.transposed() * F;
    d.J = F.det();
    return d;
}

InvariantPoint invariants(const DeformationState& d) {
    const double i1 = d.C.trace();
    // For symmetric C, tr(C^2) is the sum of squared entries.
    double tr_c2 = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) tr_c2 += d.C.m[i][j] * d.C.m[j][i];
    const double i2 = 0.5 * (i1 * i1 - tr_c2);
    InvariantPoint p;
    p.J = d.J;
    p.I1bar = std::pow(d.J, -2.0 / 3.0) * i1;
    p.I2bar = std::pow(d.J, -4.0 / 3.0) * i2;
    return p;
}

double nominal_stress(const EnergyDerivatives& ed, LoadingMode mode, double stretch) {
    if (!(stretch > 0.0) || !std::isfinite(stretch)) {
        throw std::domain_error("nominal_stress: stretch must be positive");
    }
    const double l = stretch;
    switch (mode) {
        case LoadingMode::UT:
            return 2.0 * (l - 1.0 / (l * l)) * (ed.dI1 + ed.dI2 / l);
        case LoadingMode::PS:
            return 2.0 * (l - 1.0 / (l * l * l)) * (ed.dI1 + ed.dI2);
        case LoadingMode::EBT:
            return 2.0 * (l - 1.0 / (l * l * l * l * l)) * (ed.dI1 + l * l * ed.dI2);
    }
    throw std::invalid_argument("nominal_stress: unknown loading mode");
}

Mat3 pk1_full(const EnergyDerivatives& ed, const DeformationState& d) {
    const double jm23 = std::pow(d.J, -2.0 / 3.0);
    const InvariantPoint p = invariants(d);
    const Mat3 finvT = d.F.inverse().transposed();
    const Mat3 fc = d.F * d.C;
    const Mat3 term1 = d.F.scaled(ed.dI1 * jm23);
    const Mat3 term2 = (d.F.scaled(p.I1bar) - fc.scaled(jm23)).scaled(ed.dI2 * jm23);
    const Mat3 term3 = finvT.scaled(ed.dJ * 0.5 * d.J);
    return (term1 + term2 + term3).scaled(2.0);
}

}  // namespace hypersr
