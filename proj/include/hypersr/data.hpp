#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hypersr/fitness.hpp"
#include "hypersr/mechanics.hpp"

namespace hypersr {

// Coefficients of the generalized Mooney-Rivlin energy
//   psi = sum_i c_i0 (I1bar - 3)^i + c_0i (I2bar - 3)^i,  i = 1..3
// in MPa. The three named cases are the built-in benchmark materials.
struct GmrParameters {
    double c10 = 0.0;
    double c20 = 0.0;
    double c30 = 0.0;
    double c01 = 0.0;
    double c02 = 0.0;
    double c03 = 0.0;

    static GmrParameters case1();  // c10 0.48, c01 0.12
    static GmrParameters case2();  // c10 0.87, c20 0.86, c01 0.98, c02 0.43
    static GmrParameters case3();  // all six nonzero
    static GmrParameters benchmark_case(int index);  // 1, 2 or 3
};

double gmr_energy(const GmrParameters& p, const InvariantPoint& q);

// Closed-form derivatives of the same energy. dJ is identically zero.
EnergyDerivatives gmr_derivatives(const GmrParameters& p, const InvariantPoint& q);

// The energy written in the expression grammar, powers expanded as products,
// zero terms dropped. Parses back to an exact model of the material.
std::string gmr_expression(const GmrParameters& p);

// Stretch sweep specification. Points are lo + (hi - lo) * i / count for
// i = 1..count, so the stress-free reference state is excluded.
struct LambdaGrid {
    LoadingMode mode;
    double lo = 1.0;
    double hi = 3.0;
    int count = 50;
};

std::vector<double> expand_grid(const LambdaGrid& grid);

// UT and PS over (1, 3], EBT over (1, 2.5], 50 points each.
std::vector<LambdaGrid> default_benchmark_grid();

// Noise-free nominal stresses of the material over explicit stretch lists.
struct ModeSweep {
    LoadingMode mode;
    std::vector<double> stretches;
};

Dataset generate_benchmark(const GmrParameters& p, std::span<const ModeSweep> sweeps);
Dataset generate_benchmark(const GmrParameters& p, std::span<const LambdaGrid> grids);

// Reduced temperature: T in degrees Celsius mapped to T/400 + 1/2.
// Throws std::domain_error for T <= -200.
double scale_temperature(double t_celsius);

// Uniaxial sweeps of a material whose c10 depends affinely on the reduced
// temperature, c10 = c10_base + c10_slope * Tbar, with a fixed c01. Each
// temperature contributes one UT curve; the scaled temperature is attached
// as the single extra input (eta1).
Dataset generate_thermal_benchmark(double c10_base, double c10_slope, double c01,
                                   std::span<const double> temps_celsius,
                                   const LambdaGrid& grid);

// CSV schema: required header
//   mode,stretch|strain,stress_MPa[,param:<name>[:celsius]...]
// with '#' comment lines, '.' decimals and comma separators. A strain column
// is converted on load via stretch = 1 + strain. A param column tagged
// :celsius is passed through scale_temperature on load; untagged params are
// taken as already scaled. Errors name the offending line.
Dataset load_csv(std::istream& in);
Dataset load_csv(const std::string& path);

void write_csv(std::ostream& out, const Dataset& dataset,
               std::span<const std::string> header_comments = {});
void write_csv(const std::string& path, const Dataset& dataset,
               std::span<const std::string> header_comments = {});

}  // namespace hypersr
