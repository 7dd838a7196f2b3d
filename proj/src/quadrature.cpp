#include "stark/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace stark {

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it2 = 0; it2 < 100; ++it2) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return cache.emplace(n, std::move(r)).first->second;
}

GaussRule gauss_jacobi(int n, double a, double b) {
  if (n < 1 || a <= -1.0 || b <= -1.0) throw std::invalid_argument("gauss_jacobi: bad arguments");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    J(k, k) = (k == 0) ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
  }
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    double beta;
    if (k == 1)
      beta = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b));
    else
      beta = 4.0 * k * (k + a) * (k + b) * (k + a + b) / (s * s * (s + 1.0) * (s - 1.0));
    J(k, k - 1) = J(k - 1, k) = std::sqrt(beta);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  const double mu0 = std::exp((a + b + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                              std::lgamma(b + 1.0) - std::lgamma(a + b + 2.0));
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    r.nodes[k] = es.eigenvalues()(k);
    const double v = es.eigenvectors()(0, k);
    r.weights[k] = mu0 * v * v;
  }
  return r;
}

GaussRule jacobi_endpoint_rule(int n, double beta, double h) {
  GaussRule g = gauss_jacobi(n, 0.0, beta);
  const double scale = std::pow(h / 2.0, beta + 1.0);
  for (int k = 0; k < n; ++k) {
    g.nodes[k] = 0.5 * h * (g.nodes[k] + 1.0);
    g.weights[k] *= scale;
  }
  return g;
}

GaussRule legendre_on(int n, double a, double b) {
  const GaussRule& g = gauss_legendre(n);
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (int k = 0; k < n; ++k) {
    r.nodes[k] = c + h * g.nodes[k];
    r.weights[k] = h * g.weights[k];
  }
  return r;
}

std::vector<double> oscillatory_breaks(double length, double kappa_abs, double first,
                                       double width_factor) {
  std::vector<double> br{0.0};
  const double wmax = width_factor / std::max(kappa_abs, 1e-300);
  double x = std::min(first, length);
  br.push_back(x);
  while (x < length) {
    double w = std::min(x, wmax);
    if (x + 1.2 * w >= length) w = length - x;
    x += w;
    br.push_back(x);
  }
  br.back() = length;
  return br;
}

}  // namespace stark
