#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "bouss/grid.hpp"

namespace bouss::fx {

inline constexpr double kPi = 3.14159265358979323846;

inline Field sample(const GridPtr& g, const std::function<double(double, double)>& f) {
  Field out(g);
  for (int i = 0; i < g->n1; ++i)
    for (int j = 0; j < g->n2; ++j) out.values(i, j) = f(g->x1(i), g->x2(j));
  return out;
}

// Random real field whose x1 content is confined to k <= kmax.
inline Field random_band_limited(const GridPtr& g, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  SpectralField s(g);
  for (int k = 0; k <= g->kmax; ++k)
    for (int j = 0; j < g->n2; ++j) s.coeffs(k, j) = k == 0 ? cplx(n(rng), 0.0) : cplx(n(rng), n(rng));
  return to_physical(s);
}

inline double order(double coarse, double fine) { return std::log2(coarse / fine); }

}  // namespace bouss::fx
