#include "gdl/numerics/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gdl/errors.hpp"

namespace gdl {
namespace {

using Kronrod15 = boost::math::quadrature::gauss_kronrod<double, 15>;
using Gauss7 = boost::math::quadrature::gauss<double, 7>;

struct Panel {
  double a;
  double b;
  double value;
  double error;

  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel kronrod_panel(const RealFunction& f, double a, double b) {
  // Kronrod abscissae are stored for x >= 0; even indices are the Gauss nodes.
  static const auto& nodes = Kronrod15::abscissa();
  static const auto& kweights = Kronrod15::weights();
  static const auto& gweights = Gauss7::weights();

  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double center = f(mid);
  double kronrod = kweights[0] * center;
  double gauss = gweights[0] * center;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const double dx = half * nodes[i];
    const double pair = f(mid - dx) + f(mid + dx);
    kronrod += kweights[i] * pair;
    if (i % 2 == 0) gauss += gweights[i / 2] * pair;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

QuadResult adaptive_quad(const RealFunction& f, double a, double b, const QuadOptions& options,
                         std::span<const double> split_points) {
  if (!(a < b)) throw DomainError("adaptive_quad: require a < b");
  if (options.rel_tol < 1e-14) throw DomainError("adaptive_quad: rel_tol below 1e-14");

  std::vector<double> cuts{a};
  for (double s : split_points) {
    if (s > a && s < b) cuts.push_back(s);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  constexpr std::size_t kEvalsPerPanel = 15;
  std::priority_queue<Panel> panels;
  double total = 0.0;
  double error = 0.0;
  std::size_t evals = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Panel p = kronrod_panel(f, cuts[i], cuts[i + 1]);
    evals += kEvalsPerPanel;
    total += p.value;
    error += p.error;
    panels.push(p);
  }

  while (error > std::max(options.rel_tol * std::abs(total), options.abs_floor)) {
    if (evals + 2 * kEvalsPerPanel > options.max_evaluations) {
      throw NonConvergence("adaptive_quad: evaluation budget exhausted");
    }
    const Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw NonConvergence("adaptive_quad: panel width at floating-point resolution");
    }
    const Panel left = kronrod_panel(f, worst.a, mid);
    const Panel right = kronrod_panel(f, mid, worst.b);
    evals += 2 * kEvalsPerPanel;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }

  // Re-sum from the panels to shed the drift of the running updates.
  double value = 0.0;
  double err = 0.0;
  while (!panels.empty()) {
    value += panels.top().value;
    err += panels.top().error;
    panels.pop();
  }
  return {value, err, evals};
}

double adaptive_quad(const RealFunction& f, double a, double b, double rel_tol) {
  QuadOptions options;
  options.rel_tol = rel_tol;
  return adaptive_quad(f, a, b, options).value;
}

RealFunction map_to_unit_interval(RealFunction f, double a) {
  return [f = std::move(f), a](double u) {
    const double w = 1.0 - u;
    return f(a + u / w) / (w * w);
  };
}

QuadResult integrate_to_infinity(const RealFunction& f, double a, const QuadOptions& options) {
  return adaptive_quad(map_to_unit_interval(f, a), 0.0, 1.0, options);
}

}  // namespace gdl
