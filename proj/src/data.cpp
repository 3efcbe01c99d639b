#include "hypersr/data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hypersr {

GmrParameters GmrParameters::case1() {
    GmrParameters p;
    p.c10 = 0.48;
    p.c01 = 0.12;
    return p;
}

GmrParameters GmrParameters::case2() {
    GmrParameters p;
    p.c10 = 0.87;
    p.c20 = 0.86;
    p.c01 = 0.98;
    p.c02 = 0.43;
    return p;
}

GmrParameters GmrParameters::case3() {
    GmrParameters p;
    p.c10 = 0.91;
    p.c20 = 0.57;
    p.c30 = 0.79;
    p.c01 = 0.88;
    p.c02 = 0.21;
    p.c03 = 0.70;
    return p;
}

GmrParameters GmrParameters::benchmark_case(int index) {
    switch (index) {
        case 1: return case1();
        case 2: return case2();
        case 3: return case3();
    }
    throw std::invalid_argument("benchmark case must be 1, 2 or 3");
}

double gmr_energy(const GmrParameters& p, const InvariantPoint& q) {
    const double a = q.I1bar - 3.0;
    const double b = q.I2bar - 3.0;
    return p.c10 * a + p.c20 * a * a + p.c30 * a * a * a +
           p.c01 * b + p.c02 * b * b + p.c03 * b * b * b;
}

EnergyDerivatives gmr_derivatives(const GmrParameters& p, const InvariantPoint& q) {
    const double a = q.I1bar - 3.0;
    const double b = q.I2bar - 3.0;
    EnergyDerivatives ed;
    ed.psi = gmr_energy(p, q);
    ed.dI1 = p.c10 + 2.0 * p.c20 * a + 3.0 * p.c30 * a * a;
    ed.dI2 = p.c01 + 2.0 * p.c02 * b + 3.0 * p.c03 * b * b;
    ed.dJ = 0.0;
    return ed;
}

std::string gmr_expression(const GmrParameters& p) {
    const double c1[3] = {p.c10, p.c20, p.c30};
    const double c2[3] = {p.c01, p.c02, p.c03};
    std::string out;
    auto append_terms = [&](const double* c, const std::string& base) {
        for (int i = 0; i < 3; ++i) {
            if (c[i] == 0.0) continue;
            std::string term = format_double(c[i]);
            for (int k = 0; k <= i; ++k) term += "*" + base;
            if (!out.empty()) out += " + ";
            out += term;
        }
    };
    append_terms(c1, "(I1bar - 3)");
    append_terms(c2, "(I2bar - 3)");
    if (out.empty()) out = "0";
    return out;
}

std::vector<double> expand_grid(const LambdaGrid& grid) {
    if (grid.count < 1) {
        throw std::invalid_argument("stretch grid needs at least one point");
    }
    if (!(grid.lo > 0.0) || !(grid.hi > grid.lo)) {
        throw std::invalid_argument("stretch grid bounds must satisfy 0 < lo < hi");
    }
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(grid.count));
    for (int i = 1; i <= grid.count; ++i) {
        out.push_back(grid.lo + (grid.hi - grid.lo) * static_cast<double>(i) /
                                    static_cast<double>(grid.count));
    }
    return out;
}

std::vector<LambdaGrid> default_benchmark_grid() {
    return {
        {LoadingMode::UT, 1.0, 3.0, 50},
        {LoadingMode::PS, 1.0, 3.0, 50},
        {LoadingMode::EBT, 1.0, 2.5, 50},
    };
}

Dataset generate_benchmark(const GmrParameters& p, std::span<const ModeSweep> sweeps) {
    Dataset ds;
    ds.variable_names = FunctionSet::invariant_variables(0);
    for (const ModeSweep& sweep : sweeps) {
        for (double stretch : sweep.stretches) {
            const InvariantPoint q = invariants(deformation(sweep.mode, stretch));
            const EnergyDerivatives ed = gmr_derivatives(p, q);
            DataPoint pt;
            pt.mode = sweep.mode;
            pt.stretch = stretch;
            pt.stress = nominal_stress(ed, sweep.mode, stretch);
            ds.points.push_back(std::move(pt));
        }
    }
    ds.validate();
    return ds;
}

Dataset generate_benchmark(const GmrParameters& p, std::span<const LambdaGrid> grids) {
    std::vector<ModeSweep> sweeps;
    sweeps.reserve(grids.size());
    for (const LambdaGrid& g : grids) {
        sweeps.push_back(ModeSweep{g.mode, expand_grid(g)});
    }
    return generate_benchmark(p, sweeps);
}

double scale_temperature(double t_celsius) {
    if (!(t_celsius > -200.0)) {
        throw std::domain_error("temperature must be above -200 degrees Celsius");
    }
    return t_celsius / 400.0 + 0.5;
}

Dataset generate_thermal_benchmark(double c10_base, double c10_slope, double c01,
                                   std::span<const double> temps_celsius,
                                   const LambdaGrid& grid) {
    Dataset ds;
    ds.variable_names = FunctionSet::invariant_variables(1);
    ds.extra_labels = {"Tbar"};
    const std::vector<double> stretches = expand_grid(grid);
    for (double t : temps_celsius) {
        const double tbar = scale_temperature(t);
        GmrParameters p;
        p.c10 = c10_base + c10_slope * tbar;
        p.c01 = c01;
        for (double stretch : stretches) {
            const InvariantPoint q = invariants(deformation(grid.mode, stretch));
            const EnergyDerivatives ed = gmr_derivatives(p, q);
            DataPoint pt;
            pt.mode = grid.mode;
            pt.stretch = stretch;
            pt.stress = nominal_stress(ed, grid.mode, stretch);
            pt.extras = {tbar};
            ds.points.push_back(std::move(pt));
        }
    }
    ds.validate();
    return ds;
}

namespace {

enum class ExtraScaler { None, Celsius };

struct CsvError : std::invalid_argument {
    CsvError(std::size_t line, const std::string& what)
        : std::invalid_argument("csv line " + std::to_string(line) + ": " + what) {}
};

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(trim(line.substr(start)));
            return out;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

double parse_field_double(const std::string& field, std::size_t line) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [end, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || end != last || field.empty()) {
        throw CsvError(line, "invalid number '" + field + "'");
    }
    if (!std::isfinite(value)) {
        throw CsvError(line, "number is not finite");
    }
    return value;
}

}  // namespace

Dataset load_csv(std::istream& in) {
    Dataset ds;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    bool strain_input = false;
    std::vector<ExtraScaler> scalers;

    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::vector<std::string> fields = split_fields(stripped);

        if (!header_seen) {
            if (fields.size() < 3 || fields[0] != "mode" ||
                (fields[1] != "stretch" && fields[1] != "strain") ||
                fields[2] != "stress_MPa") {
                throw CsvError(line_no,
                               "expected header mode,stretch|strain,stress_MPa[,param:...]");
            }
            strain_input = fields[1] == "strain";
            for (std::size_t i = 3; i < fields.size(); ++i) {
                const std::string& f = fields[i];
                if (f.rfind("param:", 0) != 0 || f.size() <= 6) {
                    throw CsvError(line_no, "bad extra column '" + f + "'");
                }
                std::string spec = f.substr(6);
                ExtraScaler scaler = ExtraScaler::None;
                const std::size_t colon = spec.find(':');
                if (colon != std::string::npos) {
                    const std::string tag = spec.substr(colon + 1);
                    spec = spec.substr(0, colon);
                    if (tag == "celsius") {
                        scaler = ExtraScaler::Celsius;
                    } else {
                        throw CsvError(line_no, "unknown scaler '" + tag + "'");
                    }
                }
                if (spec.empty()) {
                    throw CsvError(line_no, "extra column has no name");
                }
                ds.extra_labels.push_back(spec);
                scalers.push_back(scaler);
            }
            ds.variable_names = FunctionSet::invariant_variables(scalers.size());
            header_seen = true;
            continue;
        }

        if (fields.size() != 3 + scalers.size()) {
            throw CsvError(line_no, "expected " + std::to_string(3 + scalers.size()) +
                                        " fields, got " + std::to_string(fields.size()));
        }
        DataPoint pt;
        try {
            pt.mode = mode_from_name(fields[0]);
        } catch (const std::invalid_argument& e) {
            throw CsvError(line_no, e.what());
        }
        double x = parse_field_double(fields[1], line_no);
        if (strain_input) x += 1.0;
        if (!(x > 0.0)) {
            throw CsvError(line_no, "stretch must be positive");
        }
        pt.stretch = x;
        pt.stress = parse_field_double(fields[2], line_no);
        for (std::size_t i = 0; i < scalers.size(); ++i) {
            double v = parse_field_double(fields[3 + i], line_no);
            if (scalers[i] == ExtraScaler::Celsius) {
                try {
                    v = scale_temperature(v);
                } catch (const std::domain_error& e) {
                    throw CsvError(line_no, e.what());
                }
            }
            pt.extras.push_back(v);
        }
        ds.points.push_back(std::move(pt));
    }

    if (!header_seen) {
        throw std::invalid_argument("csv: missing header line");
    }
    if (ds.points.empty()) {
        throw std::invalid_argument("csv: no data rows");
    }
    ds.validate();
    return ds;
}

Dataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open " + path);
    }
    return load_csv(in);
}

void write_csv(std::ostream& out, const Dataset& dataset,
               std::span<const std::string> header_comments) {
    dataset.validate();
    for (const std::string& c : header_comments) {
        out << "# " << c << "\n";
    }
    out << "mode,stretch,stress_MPa";
    for (const std::string& label : dataset.extra_labels) {
        out << ",param:" << label;
    }
    out << "\n";
    for (const DataPoint& p : dataset.points) {
        out << mode_name(p.mode) << "," << format_double(p.stretch) << ","
            << format_double(p.stress);
        for (double e : p.extras) {
            out << "," << format_double(e);
        }
        out << "\n";
    }
}

void write_csv(const std::string& path, const Dataset& dataset,
               std::span<const std::string> header_comments) {
    std::ofstream out(path);
    if (!out) {
        throw std::invalid_argument("cannot open " + path + " for writing");
    }
    write_csv(out, dataset, header_comments);
    if (!out) {
        throw std::runtime_error("failed writing " + path);
    }
}

}  // namespace hypersr
