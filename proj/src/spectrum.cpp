#include "qg/spectrum.hpp"

#include <algorithm>
#include <cmath>

namespace qg {

std::string to_string(SpectrumMethod m)
{
    switch (m) {
    case SpectrumMethod::fem: return "fem";
    case SpectrumMethod::fem_extrapolated: return "fem-extrapolated";
    case SpectrumMethod::secular: return "secular";
    }
    return "?";
}

std::vector<int> cluster(const std::vector<double>& sorted, double rel_tol)
{
    std::vector<int> out(sorted.size(), 0);
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        const double scale = std::max({std::abs(sorted[i]), std::abs(sorted[i - 1]), 1e-12});
        const bool same = std::abs(sorted[i] - sorted[i - 1]) <= rel_tol * scale;
        out[i] = out[i - 1] + (same ? 0 : 1);
    }
    return out;
}

int Spectrum::multiplicity(std::size_t i) const
{
    const int g = groups.at(i);
    return static_cast<int>(std::count(groups.begin(), groups.end(), g));
}

void Spectrum::regroup(double rel_tol)
{
    groups = cluster(eigenvalues, rel_tol);
}

}  // namespace qg
