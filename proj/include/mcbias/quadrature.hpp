#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace mcbias {

struct QuadNode {
  double x;
  double w;
};

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton
/// iteration on the Legendre recurrence. Cached per order.
const std::vector<QuadNode>& gauss_legendre(std::size_t order);

/// Gauss-Legendre rule mapped onto [a, b].
std::vector<QuadNode> gauss_legendre_on(double a, double b, std::size_t order);

/// Composite Gauss-Legendre rule on [a, b] whose panels shrink
/// geometrically (by halves) toward `a`, `levels` halvings deep, each panel
/// carrying `order` nodes. Resolves integrands with an algebraic or
/// logarithmic endpoint singularity at `a` (e.g. y^0.05 at y = 0) without
/// placing a node on the endpoint.
std::vector<QuadNode> graded_gauss_legendre(double a, double b, std::size_t order,
                                            std::size_t levels);

double integrate(const std::function<double(double)>& f, const std::vector<QuadNode>& rule);

}  // namespace mcbias
