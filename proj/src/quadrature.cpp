#include "mcbias/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "mcbias/error.hpp"

namespace mcbias {

namespace {

std::vector<QuadNode> compute_gauss_legendre(std::size_t n) {
  std::vector<QuadNode> nodes(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    // Tricomi initial guess for the i-th root.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    bool converged = false;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        converged = true;
        break;
      }
    }
    if (!converged) throw NumericalError("gauss_legendre: Newton iteration did not converge");
    // Recompute derivative at the converged root for the weight.
    double p0 = 1.0, p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
      const double kk = static_cast<double>(k);
      const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
      p0 = p1;
      p1 = p2;
    }
    dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = {-x, w};
    nodes[n - 1 - i] = {x, w};
  }
  if (n % 2 == 1) nodes[n / 2].x = 0.0;
  return nodes;
}

}  // namespace

const std::vector<QuadNode>& gauss_legendre(std::size_t order) {
  if (order == 0) throw DomainError("gauss_legendre: order must be positive");
  static std::mutex mutex;
  static std::map<std::size_t, std::vector<QuadNode>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_gauss_legendre(order)).first;
  return it->second;
}

std::vector<QuadNode> gauss_legendre_on(double a, double b, std::size_t order) {
  const auto& ref = gauss_legendre(order);
  const double half = 0.5 * (b - a), mid = 0.5 * (b + a);
  std::vector<QuadNode> out;
  out.reserve(ref.size());
  for (const auto& n : ref) out.push_back({mid + half * n.x, half * n.w});
  return out;
}

std::vector<QuadNode> graded_gauss_legendre(double a, double b, std::size_t order,
                                            std::size_t levels) {
  if (!(b > a)) throw DomainError("graded_gauss_legendre: need a < b");
  const double len = b - a;
  std::vector<QuadNode> out;
  out.reserve(order * (levels + 1));
  // Innermost panel [a, a + len 2^-levels], then [a + len 2^-(i+1), a + len 2^-i].
  double hi = a + std::ldexp(len, -static_cast<int>(levels));
  for (const auto& n : gauss_legendre_on(a, hi, order)) out.push_back(n);
  for (std::size_t i = levels; i-- > 0;) {
    const double lo = hi;
    hi = (i == 0) ? b : a + std::ldexp(len, -static_cast<int>(i));
    for (const auto& n : gauss_legendre_on(lo, hi, order)) out.push_back(n);
  }
  return out;
}

double integrate(const std::function<double(double)>& f, const std::vector<QuadNode>& rule) {
  double acc = 0.0;
  for (const auto& n : rule) acc += n.w * f(n.x);
  return acc;
}

}  // namespace mcbias
