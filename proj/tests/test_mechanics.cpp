#include <doctest.h>

#include <cmath>
#include <span>
#include <stdexcept>

#include "hypersr/mechanics.hpp"

using namespace hypersr;

namespace {

constexpr std::span<const double> kNoExtras;

EnergyDerivatives diff(double (*psi)(const InvariantPoint&), const InvariantPoint& p) {
    return energy_derivatives([&](const InvariantPoint& q, std::span<const double>) {
        return psi(q);
    }, p, kNoExtras, kDefaultFdStep);
}

double case1_psi(const InvariantPoint& p) {
    return 0.48 * (p.I1bar - 3.0) + 0.12 * (p.I2bar - 3.0);
}

}  // namespace

TEST_SUITE("mechanics") {

TEST_CASE("mode names round trip") {
    CHECK(mode_name(LoadingMode::UT) == "UT");
    CHECK(mode_name(LoadingMode::PS) == "PS");
    CHECK(mode_name(LoadingMode::EBT) == "EBT");
    CHECK(mode_from_name("PS") == LoadingMode::PS);
    CHECK_THROWS_AS(mode_from_name("SS"), std::invalid_argument);
}

TEST_CASE("deformation of the reference state") {
    const DeformationState d = deformation(LoadingMode::UT, 1.0);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            CHECK(d.F.m[i][j] == (i == j ? 1.0 : 0.0));
        }
    }
    CHECK(d.J == 1.0);
}

TEST_CASE("uniaxial stretch kinematics") {
    const DeformationState d = deformation(LoadingMode::UT, 2.0);
    CHECK(d.C.m[0][0] == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(d.C.m[1][1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(d.C.m[2][2] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(d.C.m[0][1] == 0.0);
}

TEST_CASE("equibiaxial stretch kinematics") {
    const DeformationState d = deformation(LoadingMode::EBT, 2.0);
    CHECK(d.C.m[0][0] == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(d.C.m[1][1] == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(d.C.m[2][2] == doctest::Approx(1.0 / 16.0).epsilon(1e-15));
    CHECK(d.J == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("all modes are isochoric for any stretch") {
    for (const LoadingMode mode : {LoadingMode::UT, LoadingMode::PS, LoadingMode::EBT}) {
        for (int i = 2; i <= 80; ++i) {
            const double stretch = static_cast<double>(i) / 10.0;
            CHECK(deformation(mode, stretch).J == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
}

TEST_CASE("nonpositive stretch is rejected") {
    CHECK_THROWS_AS(deformation(LoadingMode::UT, 0.0), std::domain_error);
    CHECK_THROWS_AS(deformation(LoadingMode::PS, -1.0), std::domain_error);
    EnergyDerivatives ed{};
    CHECK_THROWS_AS(nominal_stress(ed, LoadingMode::UT, 0.0), std::domain_error);
}

TEST_CASE("invariants of the identity") {
    const InvariantPoint p = invariants(deformation(LoadingMode::PS, 1.0));
    CHECK(p.I1bar == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(p.I2bar == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(p.J == 1.0);
}

TEST_CASE("invariants under uniaxial tension at stretch two") {
    const InvariantPoint p = invariants(deformation(LoadingMode::UT, 2.0));
    CHECK(p.I1bar == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(p.I2bar == doctest::Approx(4.25).epsilon(1e-14));
    CHECK(p.J == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("pure shear has equal first and second invariants") {
    const InvariantPoint at2 = invariants(deformation(LoadingMode::PS, 2.0));
    CHECK(at2.I1bar == doctest::Approx(5.25).epsilon(1e-14));
    CHECK(at2.I2bar == doctest::Approx(5.25).epsilon(1e-14));
    for (int i = 2; i <= 80; ++i) {
        const InvariantPoint p =
            invariants(deformation(LoadingMode::PS, static_cast<double>(i) / 10.0));
        CHECK(p.I1bar == doctest::Approx(p.I2bar).epsilon(1e-12));
    }
}

TEST_CASE("isochoric invariants never drop below three") {
    for (const LoadingMode mode : {LoadingMode::UT, LoadingMode::PS, LoadingMode::EBT}) {
        for (int i = 2; i <= 80; ++i) {
            const double stretch = static_cast<double>(i) / 10.0;
            const InvariantPoint p = invariants(deformation(mode, stretch));
            if (i == 10) {
                CHECK(p.I1bar == doctest::Approx(3.0).epsilon(1e-14));
                CHECK(p.I2bar == doctest::Approx(3.0).epsilon(1e-14));
            } else {
                CHECK(p.I1bar > 3.0);
                CHECK(p.I2bar > 3.0);
            }
        }
    }
}

TEST_CASE("invariants of a non-diagonal state") {
    // Simple shear with amount 0.3; a classic case with I1bar equal to I2bar.
    DeformationState d;
    d.F = Mat3::identity();
    d.F.m[0][1] = 0.3;
    d.C = d.F.transposed() * d.F;
    d.J = d.F.det();
    const InvariantPoint p = invariants(d);
    CHECK(p.J == 1.0);
    CHECK(p.I1bar == doctest::Approx(3.09).epsilon(1e-14));
    CHECK(p.I2bar == doctest::Approx(3.09).epsilon(1e-14));
}

TEST_CASE("difference quotients are exact on linear energies") {
    const InvariantPoint p{5.0, 4.25, 1.0};
    const EnergyDerivatives ed =
        diff([](const InvariantPoint& q) { return q.I1bar; }, p);
    CHECK(ed.psi == 5.0);
    CHECK(ed.dI1 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(ed.dI2 == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(ed.dJ == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("difference quotients on a two-term energy") {
    const EnergyDerivatives ed = diff(case1_psi, InvariantPoint{5.0, 4.25, 1.0});
    CHECK(ed.dI1 == doctest::Approx(0.48).epsilon(1e-8));
    CHECK(ed.dI2 == doctest::Approx(0.12).epsilon(1e-8));
    CHECK(ed.dJ == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("difference quotients on a constant energy") {
    const EnergyDerivatives ed =
        diff([](const InvariantPoint&) { return 7.0; }, InvariantPoint{4.0, 4.0, 1.0});
    CHECK(ed.psi == 7.0);
    CHECK(ed.dI1 == 0.0);
    CHECK(ed.dI2 == 0.0);
    CHECK(ed.dJ == 0.0);
}

TEST_CASE("nominal stress vanishes in the reference state") {
    const EnergyDerivatives ed{1.0, 0.48, 0.12, 0.7};
    CHECK(nominal_stress(ed, LoadingMode::UT, 1.0) == 0.0);
    CHECK(nominal_stress(ed, LoadingMode::PS, 1.0) == 0.0);
    CHECK(nominal_stress(ed, LoadingMode::EBT, 1.0) == 0.0);
}

TEST_CASE("nominal stress closed forms at stretch two") {
    const EnergyDerivatives ed{0.0, 0.48, 0.12, 0.0};
    CHECK(nominal_stress(ed, LoadingMode::UT, 2.0) ==
          doctest::Approx(1.89).epsilon(1e-12));
    CHECK(nominal_stress(ed, LoadingMode::PS, 2.0) ==
          doctest::Approx(2.25).epsilon(1e-12));
    CHECK(nominal_stress(ed, LoadingMode::EBT, 2.0) ==
          doctest::Approx(3.78).epsilon(1e-12));
}

TEST_CASE("stress ignores constant energy offsets") {
    const InvariantPoint p = invariants(deformation(LoadingMode::UT, 1.7));
    const EnergyDerivatives base = diff(case1_psi, p);
    const EnergyDerivatives shifted =
        diff([](const InvariantPoint& q) { return case1_psi(q) + 1e3; }, p);
    const double a = nominal_stress(base, LoadingMode::UT, 1.7);
    const double b = nominal_stress(shifted, LoadingMode::UT, 1.7);
    // The offset cancels in the quotients up to round-off amplified by 1/h.
    CHECK(a == doctest::Approx(b).epsilon(1e-6));
}

TEST_CASE("full stress tensor at the identity") {
    const EnergyDerivatives ed{0.0, 0.3, 0.5, 0.7};
    DeformationState d;
    d.F = Mat3::identity();
    d.C = Mat3::identity();
    d.J = 1.0;
    const Mat3 P = pk1_full(ed, d);
    const double expected = 2.0 * 0.3 + 4.0 * 0.5 + 0.7;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            CHECK(P.m[i][j] == doctest::Approx(i == j ? expected : 0.0).epsilon(1e-14));
        }
    }
}

TEST_CASE("full stress tensor shows why pressure elimination is needed") {
    const EnergyDerivatives ed{0.0, 0.48, 0.0, 0.0};
    DeformationState d;
    d.F = Mat3::identity();
    d.C = Mat3::identity();
    d.J = 1.0;
    const Mat3 P = pk1_full(ed, d);
    CHECK(P.m[0][0] == doctest::Approx(2.0 * 0.48).epsilon(1e-14));
    CHECK(P.m[1][1] == doctest::Approx(2.0 * 0.48).epsilon(1e-14));
}

TEST_CASE("full stress tensor of a volumetric energy") {
    const EnergyDerivatives ed{0.0, 0.0, 0.0, 2.5};
    DeformationState d;
    d.F = Mat3::diagonal(2.0, 0.7, 1.3);
    d.C = d.F.transposed() * d.F;
    d.J = d.F.det();
    const Mat3 P = pk1_full(ed, d);
    for (int i = 0; i < 3; ++i) {
        const double expected = 2.5 * d.J / d.F.m[i][i];
        CHECK(P.m[i][i] == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("singular deformation gradients are rejected") {
    const EnergyDerivatives ed{0.0, 1.0, 1.0, 1.0};
    DeformationState d;
    d.F = Mat3::diagonal(1.0, 1.0, 0.0);
    d.C = d.F.transposed() * d.F;
    d.J = 0.0;
    CHECK_THROWS_AS(pk1_full(ed, d), std::domain_error);
    CHECK_THROWS_AS(Mat3::diagonal(1.0, 0.0, 1.0).inverse(), std::domain_error);
}

}  // TEST_SUITE
