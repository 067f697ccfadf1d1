#pragma once

#include <string>
#include <vector>

#include "armagf/chebyshev.hpp"
#include "armagf/common.hpp"

namespace armagf {

enum class BandLabel { passband, transition, stopband };

/// Full description of one lowpass design problem: band edges, ideal
/// response weights, filter orders and the iteration hyperparameters.
struct DesignSpec {
  double lambda_p = 0.5;  // passband edge (inclusive)
  double lambda_s = 0.7;  // stopband edge (inclusive)
  int order_p = 11;
  int order_q = 11;
  int grid_l = 500;          // grid has grid_l + 1 points
  double epsilon = 1e-5;     // stability margin
  double gamma = 0.25;       // relaxation constant, in [0, 1]
  double delta_t = 2e-8;     // termination tolerance on the step infinity-norm
  int k_max = 25;            // outer iteration cap
  double passband_weight = 1.0;
  double stopband_weight = 1.0;

  void validate() const {
    if (!(lambda_p > 0.0 && lambda_p < lambda_s && lambda_s < 2.0))
      throw std::invalid_argument("DesignSpec: need 0 < lambda_p < lambda_s < 2");
    if (order_p < 0 || order_q < 0)
      throw std::invalid_argument("DesignSpec: orders must be nonnegative");
    if (!(gamma >= 0.0 && gamma <= 1.0))
      throw std::invalid_argument("DesignSpec: gamma outside [0, 1]");
    if (!(epsilon > 0.0)) throw std::invalid_argument("DesignSpec: epsilon must be positive");
    if (!(delta_t > 0.0)) throw std::invalid_argument("DesignSpec: delta_t must be positive");
    if (k_max < 1) throw std::invalid_argument("DesignSpec: k_max must be at least 1");
    if (grid_l < order_p + order_q + 2)
      throw std::invalid_argument("DesignSpec: grid_l must be at least P+Q+2");
    if (passband_weight < 0.0 || stopband_weight < 0.0)
      throw std::invalid_argument("DesignSpec: weights must be nonnegative");
  }
};

/// Discretized frequency axis lambda_i = 2i/L with sampled ideal response
/// and weight. Transition-band points carry weight exactly zero.
struct DesignGrid {
  Vector lambdas;
  Vector hd;
  Vector w;
  std::vector<BandLabel> band_labels;

  Index size() const { return lambdas.size(); }
};

/// Band edges are inclusive: lambda <= lambda_p is passband, lambda >= lambda_s
/// is stopband, anything between is don't-care.
inline DesignGrid build_grid(const DesignSpec& spec) {
  spec.validate();
  const int l = spec.grid_l;
  DesignGrid grid;
  grid.lambdas.resize(l + 1);
  grid.hd.resize(l + 1);
  grid.w.resize(l + 1);
  grid.band_labels.resize(l + 1);
  for (int i = 0; i <= l; ++i) {
    const double lambda = 2.0 * i / l;
    grid.lambdas[i] = lambda;
    if (lambda <= spec.lambda_p) {
      grid.band_labels[i] = BandLabel::passband;
      grid.hd[i] = 1.0;
      grid.w[i] = spec.passband_weight;
    } else if (lambda >= spec.lambda_s) {
      grid.band_labels[i] = BandLabel::stopband;
      grid.hd[i] = 0.0;
      grid.w[i] = spec.stopband_weight;
    } else {
      grid.band_labels[i] = BandLabel::transition;
      grid.hd[i] = 0.0;
      grid.w[i] = 0.0;
    }
  }
  return grid;
}

/// Magnitude-response figures of merit, all in dB except the raw objective.
struct DesignMetrics {
  double delta_p_db = 0.0;      // maximum passband ripple
  double delta_s_db = 0.0;      // minimum stopband attenuation
  double sse_db = 0.0;          // weighted sum of squared errors
  double true_objective = 0.0;  // the same weighted sum, linear scale
};

inline DesignMetrics compute_metrics(const ArmaChebFilter& filter, const DesignGrid& grid) {
  DesignMetrics m;
  double ripple = 0.0;
  double worst_stop_db = kDbFloor;
  double sse = 0.0;
  for (Index i = 0; i < grid.size(); ++i) {
    const double h = freq_response(filter, grid.lambdas[i]);
    sse += grid.w[i] * (h - grid.hd[i]) * (h - grid.hd[i]);
    switch (grid.band_labels[i]) {
      case BandLabel::passband:
        ripple = std::max(ripple, std::abs(amplitude_db(h)));
        break;
      case BandLabel::stopband:
        worst_stop_db = std::max(worst_stop_db, amplitude_db(h));
        break;
      case BandLabel::transition:
        break;
    }
  }
  m.delta_p_db = ripple;
  m.delta_s_db = -worst_stop_db;
  m.true_objective = sse;
  m.sse_db = power_db(sse);
  return m;
}

}  // namespace armagf
