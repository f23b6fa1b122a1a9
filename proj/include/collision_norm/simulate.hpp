#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "collision_norm/errors.hpp"
#include "collision_norm/linalg.hpp"
#include "collision_norm/matrix.hpp"
#include "collision_norm/state_space.hpp"

namespace cnorm {

inline constexpr double kDefaultDt = 1e-4;
inline constexpr double kDefaultHorizon = 5.0;

/// Sampled impulse response of every output of a realization.
struct SampledResponse {
  double dt = 0.0;
  double horizon = 0.0;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> series;  // one per output, equal lengths

  const std::vector<double>& at(const std::string& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == label) return series[i];
    throw UnknownChannel("no sampled output '" + label + "'");
  }
};

/// Impulse response of the force output and its derivative.
struct ImpulseResponse {
  double dt = 0.0;
  double horizon = 0.0;
  std::vector<double> samples_f;
  std::vector<double> samples_fdot;

  std::size_t size() const { return samples_f.size(); }

  double peak() const {
    double m = 0.0;
    for (double v : samples_f) m = std::max(m, std::abs(v));
    return m;
  }

  double peak_time() const {
    double m = -1.0;
    std::size_t at = 0;
    for (std::size_t k = 0; k < samples_f.size(); ++k) {
      if (std::abs(samples_f[k]) > m) {
        m = std::abs(samples_f[k]);
        at = k;
      }
    }
    return static_cast<double>(at) * dt;
  }
};

namespace detail {

inline double norm2(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

}  // namespace detail

/// Samples every output after an impulse on `input_channel`.
///
/// The impulse is applied as the initial state x₀ = B_channel, which is
/// exact when D has no feedthrough from that channel. Stepping uses the
/// exact transition matrix expm(A·dt). The horizon is doubled (up to 8×)
/// until ‖x_end‖ ≤ 1e-6·‖x₀‖.
inline SampledResponse simulate_outputs(const StateSpace& ss,
                                        const std::string& input_channel,
                                        double dt = kDefaultDt,
                                        double horizon = kDefaultHorizon) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidParams("dt must be positive");
  if (!(horizon >= 10.0 * dt)) throw InvalidParams("horizon must be at least 10·dt");
  const std::size_t ch = ss.input_index(input_channel);
  for (std::size_t i = 0; i < ss.outputs(); ++i)
    if (ss.d()(i, ch) != 0.0)
      throw DirectFeedthrough("output '" + ss.output_labels()[i] +
                              "' has direct feedthrough from '" + input_channel +
                              "'; its impulse response is unbounded");

  const std::size_t n = ss.states();
  const std::size_t p = ss.outputs();
  const Matrix phi = expm(ss.a() * dt);
  const Matrix& c = ss.c();

  std::vector<double> x(n), next(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = ss.b()(i, ch);
  const double x0_norm = detail::norm2(x);

  SampledResponse out;
  out.dt = dt;
  out.labels = ss.output_labels();
  out.series.assign(p, {});

  auto record = [&] {
    for (std::size_t r = 0; r < p; ++r) {
      double y = 0.0;
      for (std::size_t j = 0; j < n; ++j) y += c(r, j) * x[j];
      out.series[r].push_back(y);
    }
  };
  auto step = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += phi(i, j) * x[j];
      next[i] = s;
    }
    x.swap(next);
  };

  const double max_horizon = 8.0 * horizon;
  double h = horizon;
  std::size_t steps_done = 0;
  record();
  while (true) {
    const auto target = static_cast<std::size_t>(std::floor(h / dt + 1e-9));
    for (; steps_done < target; ++steps_done) {
      step();
      record();
    }
    const double xn = detail::norm2(x);
    if (!std::isfinite(xn))
      throw UnstableResponse("impulse response overflowed within " + std::to_string(h) + " s");
    if (xn <= 1e-6 * x0_norm) break;
    if (h * 2.0 > max_horizon * (1.0 + 1e-12)) {
      if (xn > x0_norm)
        throw UnstableResponse("impulse response still growing after " +
                               std::to_string(h) + " s");
      break;
    }
    h *= 2.0;
  }
  out.horizon = h;
  return out;
}

/// Impulse response of the `f` output. `fdot` is taken from an output of
/// that name when present, otherwise from C_f·A·x (exact for t > 0 with no
/// input).
inline ImpulseResponse simulate_impulse(const StateSpace& ss,
                                        const std::string& input_channel,
                                        double dt = kDefaultDt,
                                        double horizon = kDefaultHorizon) {
  StateSpace model = ss;
  if (!model.has_output("fdot")) {
    const Matrix cf = model.c().row_at(model.output_index("f"));
    model = model.with_output("fdot", cf * model.a());
  }
  model = model.select_outputs({"f", "fdot"});
  SampledResponse r = simulate_outputs(model, input_channel, dt, horizon);
  ImpulseResponse out;
  out.dt = r.dt;
  out.horizon = r.horizon;
  out.samples_f = std::move(r.series[0]);
  out.samples_fdot = std::move(r.series[1]);
  return out;
}

}  // namespace cnorm
