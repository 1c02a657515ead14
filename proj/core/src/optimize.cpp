#include "gripscribe/optimize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "gripscribe/errors.hpp"

namespace gripscribe {
namespace {

constexpr double kLogMargin = 1e-9;

}  // namespace

void ObjectiveSpec::validate() const {
  if (!(tremor_freq > intent_freq && intent_freq > 0.0)) {
    throw InvalidArgument("need tremor_freq > intent_freq > 0");
  }
  if (!(intent_floor > 0.0 && intent_floor <= 1.0)) throw InvalidArgument("intent_floor must be in (0, 1]");
  if (!(penalty_weight >= 0.0)) throw InvalidArgument("penalty_weight must be >= 0");
}

DesignEvaluation evaluate_design_detail(const DesignVars& vars, const ObjectiveSpec& spec,
                                        const DynamicParams& params, const MechanismConfig& config,
                                        const HandImpedance& imp, const SweepSettings& sweep) {
  spec.validate();
  DynamicParams p = params;
  p.b1 = vars.b1;
  p.b2 = vars.b2;
  DesignEvaluation e;
  e.tremor_gain = transmissibility(p, config, imp, spec.tremor_freq, sweep).gain;
  e.intent_gain = transmissibility(p, config, imp, spec.intent_freq, sweep).gain;
  e.cost = e.tremor_gain + spec.penalty_weight * std::max(0.0, spec.intent_floor - e.intent_gain);
  return e;
}

double evaluate_design(const DesignVars& vars, const ObjectiveSpec& spec,
                       const DynamicParams& params, const MechanismConfig& config,
                       const HandImpedance& imp, const SweepSettings& sweep) {
  return evaluate_design_detail(vars, spec, params, config, imp, sweep).cost;
}

GridResult grid_search(const ObjectiveSpec& spec, const DynamicParams& params,
                       const MechanismConfig& config, const HandImpedance& imp, int n_per_axis,
                       const SweepSettings& sweep) {
  if (n_per_axis < 2) throw InvalidArgument("n_per_axis must be >= 2");
  const auto n = static_cast<std::size_t>(n_per_axis);
  const double lo = std::log(DesignVars::kLower);
  const double hi = std::log(DesignVars::kUpper);
  std::vector<double> axis(n);
  for (std::size_t i = 0; i < n; ++i) {
    axis[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  axis.front() = DesignVars::kLower;
  axis.back() = DesignVars::kUpper;

  GridResult result;
  result.table.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) result.table[i * n + j].vars = {axis[i], axis[j]};
  }

  // Each worker owns a strided slice of cells; outputs land in fixed slots.
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, result.table.size());
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t c = w; c < result.table.size(); c += workers) {
        GridCell& cell = result.table[c];
        cell.eval = evaluate_design_detail(cell.vars, spec, params, config, imp, sweep);
      }
    }));
  }
  for (auto& j : jobs) j.get();

  // Row-major order is (b1 ascending, b2 ascending), so a strict comparison
  // keeps the smaller b1, then b2, on ties.
  const GridCell* best = &result.table.front();
  for (const GridCell& cell : result.table) {
    if (cell.eval.cost < best->eval.cost) best = &cell;
  }
  result.best = best->vars;
  result.best_cost = best->eval.cost;
  return result;
}

void GridResult::write_csv(std::ostream& out) const {
  out << "b1,b2,cost,tremor_gain,intent_gain\n";
  for (const GridCell& c : table) {
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", c.vars.b1, c.vars.b2,
                       c.eval.cost, c.eval.tremor_gain, c.eval.intent_gain);
  }
}

SimplexResult nelder_mead_minimize(const std::function<double(const Eigen::Vector2d&)>& objective,
                                   const Eigen::Vector2d& start, const Eigen::Vector2d& lower,
                                   const Eigen::Vector2d& upper, const SimplexOptions& options) {
  SimplexResult result;
  const auto clamp = [&](const Eigen::Vector2d& x) -> Eigen::Vector2d {
    return x.cwiseMax(lower).cwiseMin(upper);
  };
  const auto eval = [&](const Eigen::Vector2d& x) {
    ++result.evaluations;
    result.evaluated.push_back(x);
    return objective(x);
  };

  struct Vertex {
    Eigen::Vector2d x;
    double f;
  };
  std::array<Vertex, 3> v;
  v[0].x = clamp(start);
  v[0].f = eval(v[0].x);
  for (int d = 0; d < 2; ++d) {
    Eigen::Vector2d x = v[0].x;
    // Step toward the interior so a start on the boundary keeps a full simplex.
    const double room_up = upper[d] - x[d];
    const double room_down = x[d] - lower[d];
    x[d] += room_up >= room_down ? std::min(options.initial_step, room_up)
                                 : -std::min(options.initial_step, room_down);
    v[static_cast<std::size_t>(d) + 1] = {x, eval(x)};
  }

  const auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
  while (true) {
    std::stable_sort(v.begin(), v.end(), by_value);
    double size = 0.0;
    for (std::size_t i = 1; i < v.size(); ++i) {
      size = std::max(size, (v[i].x - v[0].x).cwiseAbs().maxCoeff());
    }
    if (size < options.tol) {
      result.converged = true;
      break;
    }
    if (result.iterations >= options.max_iter) break;
    ++result.iterations;

    const Eigen::Vector2d centroid = 0.5 * (v[0].x + v[1].x);
    Vertex& worst = v[2];
    const Eigen::Vector2d xr = clamp(centroid + (centroid - worst.x));
    const double fr = eval(xr);
    if (fr < v[0].f) {
      const Eigen::Vector2d xe = clamp(centroid + 2.0 * (centroid - worst.x));
      const double fe = eval(xe);
      worst = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
      continue;
    }
    if (fr < v[1].f) {
      worst = {xr, fr};
      continue;
    }
    if (fr < worst.f) {
      const Eigen::Vector2d xc = clamp(centroid + 0.5 * (xr - centroid));
      const double fc = eval(xc);
      if (fc <= fr) {
        worst = {xc, fc};
        continue;
      }
    } else {
      const Eigen::Vector2d xc = clamp(centroid + 0.5 * (worst.x - centroid));
      const double fc = eval(xc);
      if (fc < worst.f) {
        worst = {xc, fc};
        continue;
      }
    }
    for (std::size_t i = 1; i < v.size(); ++i) {
      v[i].x = clamp(v[0].x + 0.5 * (v[i].x - v[0].x));
      v[i].f = eval(v[i].x);
    }
  }

  std::stable_sort(v.begin(), v.end(), by_value);
  result.x = v[0].x;
  result.value = v[0].f;
  return result;
}

DesignResult nelder_mead(const ObjectiveSpec& spec, const DynamicParams& params,
                         const MechanismConfig& config, const HandImpedance& imp,
                         const DesignVars& start, const SimplexOptions& options,
                         const SweepSettings& sweep) {
  if (!start.in_box()) throw InvalidArgument("start design is outside the damper box");
  const Eigen::Vector2d lower =
      Eigen::Vector2d::Constant(std::log(DesignVars::kLower) + kLogMargin);
  const Eigen::Vector2d upper =
      Eigen::Vector2d::Constant(std::log(DesignVars::kUpper) - kLogMargin);
  const auto to_vars = [](const Eigen::Vector2d& z) {
    return DesignVars{std::exp(z.x()), std::exp(z.y())};
  };

  const SimplexResult r = nelder_mead_minimize(
      [&](const Eigen::Vector2d& z) {
        return evaluate_design(to_vars(z), spec, params, config, imp, sweep);
      },
      Eigen::Vector2d(std::log(start.b1), std::log(start.b2)), lower, upper, options);

  DesignResult out;
  out.vars = to_vars(r.x);
  out.cost = r.value;
  out.iterations = r.iterations;
  out.converged = r.converged;
  out.evaluated.reserve(r.evaluated.size());
  for (const auto& z : r.evaluated) out.evaluated.push_back(to_vars(z));
  return out;
}

}  // namespace gripscribe
