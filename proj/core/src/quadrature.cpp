#include "rte/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace rte {

std::pair<std::vector<double>, std::vector<double>> gauss_legendre_nodes(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  std::vector<double> x(n), w(n);
  const long double pi = 3.141592653589793238462643383279502884L;
  // Nodes are symmetric; solve for the non-negative half with Newton on P_n.
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi-style initial guess for the i-th root (descending order).
    long double z = std::cos(pi * (i + 0.75L) / (n + 0.5L));
    long double pp = 0.0L;
    for (int iter = 0; iter < 100; ++iter) {
      // Legendre recurrence: evaluates P_n(z) and its derivative.
      long double p0 = 1.0L, p1 = z;
      for (int k = 2; k <= n; ++k) {
        long double p2 = ((2.0L * k - 1.0L) * z * p1 - (k - 1.0L) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (z * p1 - p0) / (z * z - 1.0L);
      long double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-19L) break;
    }
    const long double weight = 2.0L / ((1.0L - z * z) * pp * pp);
    x[i] = static_cast<double>(-z);  // ascending order: most negative first
    w[i] = static_cast<double>(weight);
    x[n - 1 - i] = static_cast<double>(z);
    w[n - 1 - i] = static_cast<double>(weight);
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
  return {x, w};
}

AngularQuadrature gauss_legendre(int n) {
  auto [x, w] = gauss_legendre_nodes(n);
  AngularQuadrature q;
  q.geometry = Geometry::Slab1D;
  q.directions.resize(n);
  q.weights.resize(n);
  for (int j = 0; j < n; ++j) {
    q.directions[j] = {x[j], 0.0, 0.0};
    q.weights[j] = 0.5 * w[j];
  }
  return q;
}

AngularQuadrature chebyshev_legendre(int n_phi, int n_vz) {
  if (n_phi < 2) throw std::invalid_argument("chebyshev_legendre: n_phi must be >= 2");
  if (n_vz < 1) throw std::invalid_argument("chebyshev_legendre: n_vz must be >= 1");
  auto [z, wz] = gauss_legendre_nodes(n_vz);
  AngularQuadrature q;
  q.geometry = Geometry::XY2D;
  q.directions.reserve(static_cast<size_t>(n_phi) * n_vz);
  q.weights.reserve(static_cast<size_t>(n_phi) * n_vz);
  const double pi = 3.14159265358979323846;
  for (int j2 = 0; j2 < n_vz; ++j2) {
    const double vz = z[j2];
    const double s = std::sqrt(std::max(0.0, 1.0 - vz * vz));
    for (int j1 = 1; j1 <= n_phi; ++j1) {
      const double phi = 2.0 * j1 * pi / n_phi - pi / n_phi;
      q.directions.push_back({std::cos(phi) * s, std::sin(phi) * s, vz});
      q.weights.push_back((1.0 / n_phi) * (0.5 * wz[j2]));
    }
  }
  return q;
}

}  // namespace rte
