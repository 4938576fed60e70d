#pragma once

// CSV emission and parsing for spectrum reports, and the comparison rule
// used by `compare`.

#include <hypcocycle/lyapunov.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypcocycle {

class ReportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kSpectrumCsvHeader = "method,horizon,i,chi_i,multiplicity,ci_halfwidth,seed,n_samples";

inline std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string spectrum_csv(const SpectrumReport& r)
{
    std::ostringstream out;
    out << kSpectrumCsvHeader << "\n";
    for (std::size_t i = 0; i < r.exponents.size(); ++i) {
        out << r.method << ',' << format_double(r.horizon) << ',' << i + 1 << ',' << format_double(r.exponents[i])
            << ',' << r.multiplicities[i] << ',' << format_double(r.ci_halfwidths[i]) << ',' << r.seed << ','
            << r.n_samples << "\n";
    }
    return out.str();
}

struct SpectrumRow {
    std::string method;
    double horizon = 0.0;
    int index = 0;
    double chi = 0.0;
    int multiplicity = 0;
    double ci_halfwidth = 0.0;
    std::uint64_t seed = 0;
    std::size_t n_samples = 0;
};

struct SpectrumTable {
    std::vector<SpectrumRow> rows;

    int dim() const
    {
        int d = 0;
        for (const auto& r : rows)
            d += r.multiplicity;
        return d;
    }

    /// One (chi, ci) entry per dimension, repeating each cluster by its multiplicity.
    std::vector<std::pair<double, double>> expanded() const
    {
        std::vector<std::pair<double, double>> out;
        for (const auto& r : rows)
            for (int k = 0; k < r.multiplicity; ++k)
                out.emplace_back(r.chi, r.ci_halfwidth);
        return out;
    }
};

inline SpectrumTable parse_spectrum_csv(const std::string& text, const std::string& origin)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kSpectrumCsvHeader)
        throw ReportError(origin + ": missing or unexpected CSV header");
    SpectrumTable table;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        if (cells.size() != 8)
            throw ReportError(origin + ":" + std::to_string(lineno) + ": expected 8 columns");
        try {
            SpectrumRow r;
            r.method = cells[0];
            r.horizon = std::stod(cells[1]);
            r.index = std::stoi(cells[2]);
            r.chi = std::stod(cells[3]);
            r.multiplicity = std::stoi(cells[4]);
            r.ci_halfwidth = std::stod(cells[5]);
            r.seed = std::stoull(cells[6]);
            r.n_samples = std::stoull(cells[7]);
            if (r.multiplicity < 1)
                throw ReportError("multiplicity must be >= 1");
            table.rows.push_back(r);
        } catch (const std::exception& e) {
            throw ReportError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (table.rows.empty())
        throw ReportError(origin + ": no spectrum rows");
    return table;
}

inline SpectrumTable read_spectrum_csv(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw ReportError("cannot open '" + path + "'");
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_spectrum_csv(buf.str(), path);
}

/// Two estimates agree when they differ by at most the larger of
/// `sigmas` combined standard errors and `relative` times the larger magnitude.
struct AgreementRule {
    double sigmas = 3.0;
    double relative = 0.05;

    double tolerance(double a, double se_a, double b, double se_b) const
    {
        return std::max(sigmas * std::hypot(se_a, se_b), relative * std::max(std::abs(a), std::abs(b)));
    }

    bool agree(double a, double se_a, double b, double se_b) const
    {
        return std::abs(a - b) <= tolerance(a, se_a, b, se_b);
    }
};

struct ComparisonLine {
    int index = 0;
    double a = 0.0;
    double b = 0.0;
    double tolerance = 0.0;
    bool agree = false;
};

/// Per-dimension comparison of two spectra of equal dimension; the CI
/// half-widths are converted back to standard errors.
inline std::vector<ComparisonLine> compare_spectra(const SpectrumTable& x, const SpectrumTable& y,
                                                   const AgreementRule& rule = {})
{
    if (x.dim() != y.dim())
        throw ReportError("dimension mismatch: " + std::to_string(x.dim()) + " vs " + std::to_string(y.dim()));
    const auto ex = x.expanded();
    const auto ey = y.expanded();
    std::vector<ComparisonLine> out;
    for (std::size_t i = 0; i < ex.size(); ++i) {
        const double sa = ex[i].second / kNormalQuantile95;
        const double sb = ey[i].second / kNormalQuantile95;
        ComparisonLine l;
        l.index = static_cast<int>(i) + 1;
        l.a = ex[i].first;
        l.b = ey[i].first;
        l.tolerance = rule.tolerance(l.a, sa, l.b, sb);
        l.agree = std::abs(l.a - l.b) <= l.tolerance;
        out.push_back(l);
    }
    return out;
}

inline std::string spectrum_summary(const SpectrumReport& r)
{
    std::ostringstream out;
    out.precision(6);
    out << "method " << r.method << ", horizon " << r.horizon << ", " << r.n_samples << " samples, seed " << r.seed
        << "\n";
    for (std::size_t i = 0; i < r.exponents.size(); ++i)
        out << "  chi_" << i + 1 << " = " << r.exponents[i] << " +- " << r.ci_halfwidths[i] << " (multiplicity "
            << r.multiplicities[i] << ")\n";
    out << "  exponent sum = " << r.exponent_sum.mean << " +- " << kNormalQuantile95 * r.exponent_sum.std_error
        << "\n";
    return out.str();
}

} // namespace hypcocycle
