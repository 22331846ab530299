#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "cptshape/core.hpp"
#include "cptshape/direct_solver.hpp"

namespace testing {

using cpt::cplx;

// Fixed-seed generator so property tests are reproducible.
inline std::mt19937_64& rng()
{
    static std::mt19937_64 gen(20240917);
    return gen;
}

inline double uniform(double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline cpt::FieldState constant_fields(std::size_t n, double gp, double gc)
{
    cpt::FieldState f;
    f.g_p.assign(n, cplx(gp, 0.0));
    f.g_c.assign(n, cplx(gc, 0.0));
    return f;
}

inline double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Probe energy by plain Riemann sum over the grid (independent of the
// library's trapezoid; the edges are quiescent so the two agree).
inline double riemann_energy(const std::vector<cplx>& g, double dt)
{
    double s = 0.0;
    for (auto v : g)
        s += std::norm(v);
    return s * dt;
}

} // namespace testing
