#pragma once

// Experiment harness behind the collision-norm command line: flat key=value
// configuration, grid specs, seeded randomness, a deterministic parallel
// runner, and one function per experiment returning a result table.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "collision_norm/errors.hpp"
#include "collision_norm/models.hpp"
#include "collision_norm/norms.hpp"
#include "collision_norm/riccati.hpp"
#include "collision_norm/simulate.hpp"
#include "collision_norm/synthesis.hpp"
#include "collision_norm/transfer_function.hpp"

namespace cnorm {

// ---------------------------------------------------------------------------
// Small utilities

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace detail

/// Shortest-round-trip-safe text for a double (17 significant digits).
inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// `start:stop:count:log|lin`. Both endpoints are hit exactly.
struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  std::size_t count = 1;
  bool log = false;

  static GridSpec parse(const std::string& text) {
    const auto parts = detail::split(text, ':');
    if (parts.size() != 4)
      throw ConfigError("grid '" + text + "' is not start:stop:count:log|lin");
    const auto a = detail::parse_double(parts[0]);
    const auto b = detail::parse_double(parts[1]);
    const auto n = detail::parse_double(parts[2]);
    if (!a || !b || !n) throw ConfigError("grid '" + text + "' has a bad number");
    if (*n < 1.0 || std::floor(*n) != *n)
      throw ConfigError("grid count must be a positive integer in '" + text + "'");
    GridSpec g{*a, *b, static_cast<std::size_t>(*n), false};
    if (parts[3] == "log") {
      g.log = true;
      if (!(*a > 0.0 && *b > 0.0))
        throw ConfigError("log grid '" + text + "' needs positive endpoints");
    } else if (parts[3] != "lin") {
      throw ConfigError("grid spacing must be log or lin, got '" + parts[3] + "'");
    }
    return g;
  }

  std::vector<double> values() const {
    std::vector<double> v(count);
    if (count == 1) {
      v[0] = start;
      return v;
    }
    for (std::size_t k = 0; k < count; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(count - 1);
      v[k] = log ? std::pow(10.0, std::log10(start) +
                                      t * (std::log10(stop) - std::log10(start)))
                 : start + t * (stop - start);
    }
    v.front() = start;
    v.back() = stop;
    return v;
  }
};

/// 64-bit LCG (Knuth's MMIX constants). Uniforms are built from the top 53
/// bits so the stream is identical on every platform.
class Lcg {
 public:
  explicit Lcg(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::linear_congruential_engine<std::uint64_t, 6364136223846793005ULL,
                                  1442695040888963407ULL, 0ULL>
      engine_;
};

/// Spearman rank correlation, ties given their average rank.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionMismatch("spearman length mismatch");
  if (x.size() < 2) throw InvalidParams("spearman needs at least two points");
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

/// Worker count: hardware concurrency capped by COLLISION_NORM_THREADS.
inline std::size_t worker_count() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("COLLISION_NORM_THREADS")) {
    const auto cap = detail::parse_double(env);
    if (cap && *cap >= 1.0) n = std::min(n, static_cast<std::size_t>(*cap));
  }
  return n;
}

/// Runs fn(i) for i in [0, n). Results land at their index, so output order
/// never depends on scheduling. The first exception is rethrown.
template <class T>
std::vector<T> parallel_map(std::size_t n, const std::function<T(std::size_t)>& fn) {
  std::vector<std::optional<T>> slots(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  const std::size_t workers = std::min(worker_count(), std::max<std::size_t>(n, 1));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// ---------------------------------------------------------------------------
// Configuration

enum class ValueKind { Number, Positive, NonNegative, Count, List, Grid, Word };

/// Every key the harness understands, with the shape its value must have.
inline const std::map<std::string, ValueKind>& known_keys() {
  static const std::map<std::string, ValueKind> keys{
      // robot
      {"J", ValueKind::Positive}, {"B", ValueKind::NonNegative},
      {"K_jt", ValueKind::Positive}, {"I", ValueKind::Positive},
      {"V", ValueKind::NonNegative}, {"K_e", ValueKind::Positive},
      // environment
      {"environment", ValueKind::Word}, {"K_env", ValueKind::Positive},
      {"B_h", ValueKind::NonNegative}, {"I_h", ValueKind::Positive},
      // controller
      {"controller", ValueKind::Word}, {"K_p", ValueKind::Number},
      {"K_d", ValueKind::Number}, {"R", ValueKind::Positive},
      {"gain", ValueKind::List},
      // admittance loop
      {"M_t", ValueKind::Positive}, {"omega_t", ValueKind::Positive},
      {"xi", ValueKind::Positive}, {"M", ValueKind::Positive},
      {"v0", ValueKind::Positive}, {"mt_grid", ValueKind::Grid},
      {"omega_t_values", ValueKind::List},
      // estimation
      {"sensing", ValueKind::Word}, {"K_int", ValueKind::Positive},
      {"sigma_w", ValueKind::List}, {"sigma_v", ValueKind::List},
      // sweeps
      {"kjt_grid", ValueKind::Grid}, {"ke_grid", ValueKind::Grid},
      {"r_values", ValueKind::List}, {"ke_factors", ValueKind::List},
      {"ih_factors", ValueKind::List}, {"bh_factor", ValueKind::NonNegative},
      // randomized validation
      {"samples", ValueKind::Count}, {"seed", ValueKind::Count},
      {"spread", ValueKind::NonNegative},
      // simulation
      {"dt", ValueKind::Positive}, {"horizon", ValueKind::Positive},
      {"stride", ValueKind::Count},
  };
  return keys;
}

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{
      "norm",           "simulate",       "sweep-jointstiffness",
      "sweep-interface", "sweep-manutec", "sweep-inertial",
      "estimate",       "validate-bound"};
  return names;
}

class ExperimentConfig {
 public:
  ExperimentConfig() = default;
  explicit ExperimentConfig(std::string experiment) { set_experiment(std::move(experiment)); }

  void set_experiment(std::string name) {
    if (std::find(experiment_names().begin(), experiment_names().end(), name) ==
        experiment_names().end())
      throw ConfigError("unknown experiment '" + name + "'");
    experiment_ = std::move(name);
  }
  const std::string& experiment() const { return experiment_; }

  /// Stores a value after checking the key exists and the value parses.
  void set(const std::string& key, const std::string& value) {
    const auto it = known_keys().find(key);
    if (it == known_keys().end()) throw ConfigError("unknown key '" + key + "'");
    check_value(key, value, it->second);
    values_[key] = value;
  }

  /// `key=value` as given on the command line.
  void set_assignment(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key=value, got '" + assignment + "'");
    set(detail::trim(assignment.substr(0, eq)), detail::trim(assignment.substr(eq + 1)));
  }

  /// Reads `key = value` lines; `#` starts a comment. A key may appear once.
  void merge_text(const std::string& text, const std::string& source = "config") {
    std::istringstream in(text);
    std::string line;
    std::map<std::string, int> seen;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
      if (const auto hash = line.find('#'); hash != std::string::npos)
        line.erase(hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      const std::string where = source + ":" + std::to_string(lineno);
      if (eq == std::string::npos)
        throw ConfigError(where + ": expected key = value");
      const std::string key = detail::trim(line.substr(0, eq));
      if (seen.count(key))
        throw ConfigError(where + ": duplicate key '" + key + "' (first on line " +
                          std::to_string(seen[key]) + ")");
      seen[key] = lineno;
      try {
        set(key, detail::trim(line.substr(eq + 1)));
      } catch (const ConfigError& e) {
        throw ConfigError(where + ": " + e.what());
      }
    }
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  double number(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : *detail::parse_double(it->second);
  }

  std::optional<double> optional_number(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return number(key, 0.0);
  }

  std::size_t count(const std::string& key, std::size_t fallback) const {
    const auto it = values_.find(key);
    return it == values_.end()
               ? fallback
               : static_cast<std::size_t>(*detail::parse_double(it->second));
  }

  std::vector<double> list(const std::string& key, std::vector<double> fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    for (const auto& item : detail::split(it->second, ',')) out.push_back(*detail::parse_double(item));
    return out;
  }

  std::vector<double> grid(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return GridSpec::parse(it == values_.end() ? fallback : it->second).values();
  }

  std::string word(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

 private:
  static void check_value(const std::string& key, const std::string& value,
                          ValueKind kind) {
    auto bad = [&](const std::string& why) {
      return ConfigError("value '" + value + "' for '" + key + "': " + why);
    };
    switch (kind) {
      case ValueKind::Word:
        if (value.empty()) throw bad("empty");
        return;
      case ValueKind::Grid:
        GridSpec::parse(value);
        return;
      case ValueKind::List:
        for (const auto& item : detail::split(value, ','))
          if (!detail::parse_double(item)) throw bad("not a list of finite numbers");
        return;
      default:
        break;
    }
    const auto v = detail::parse_double(value);
    if (!v) throw bad("not a finite number");
    if (kind == ValueKind::Positive && !(*v > 0.0)) throw bad("must be positive");
    if (kind == ValueKind::NonNegative && !(*v >= 0.0)) throw bad("must be non-negative");
    if (kind == ValueKind::Count && (*v < 0.0 || std::floor(*v) != *v || *v > 9e15))
      throw bad("must be a non-negative integer");
  }

  std::string experiment_;
  std::map<std::string, std::string> values_;
};

// ---------------------------------------------------------------------------
// Results

/// One grid point: swept parameters, a label (controller or sensing mode),
/// named numeric outputs, and a status (`ok` or a failure marker).
struct SweepRow {
  std::vector<double> params;
  std::string label;
  std::map<std::string, double> values;
  std::string status = "ok";
  bool appendix_ok = true;  // inequality check on the simulated response

  std::optional<double> get(const std::string& name) const {
    const auto it = values.find(name);
    if (it == values.end()) return std::nullopt;
    return it->second;
  }
};

struct ResultTable {
  std::vector<std::string> param_columns;
  std::string label_column;  // empty when rows carry no label
  std::vector<std::string> value_columns;
  std::vector<SweepRow> rows;
  std::vector<std::string> notes;  // summary lines for the console

  /// Header row plus one line per row, `,`-separated, LF endings. Absent
  /// values are empty fields.
  std::string to_csv() const {
    std::string out;
    auto join_header = [&] {
      std::vector<std::string> cols = param_columns;
      if (!label_column.empty()) cols.push_back(label_column);
      cols.insert(cols.end(), value_columns.begin(), value_columns.end());
      cols.push_back("status");
      for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) out += ',';
        out += cols[i];
      }
      out += '\n';
    };
    join_header();
    for (const auto& r : rows) {
      std::string line;
      for (double p : r.params) line += format_number(p) + ",";
      if (!label_column.empty()) line += r.label + ",";
      for (const auto& c : value_columns) {
        if (const auto v = r.get(c)) line += format_number(*v);
        line += ',';
      }
      line += r.status;
      out += line + '\n';
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Model evaluation

struct RunOptions {
  double dt = kDefaultDt;
  double horizon = kDefaultHorizon;
  bool check_appendix = false;  // fills SweepRow::appendix_ok
};

namespace detail {

inline std::string status_for(const Error& e) {
  if (dynamic_cast<const NormDoesNotExist*>(&e)) return "no_norm";
  if (dynamic_cast<const UnstableClosedLoop*>(&e)) return "unstable";
  if (dynamic_cast<const UnstableResponse*>(&e)) return "unstable";
  return {};
}

}  // namespace detail

/// Norm, simulated peak and signal-domain W of one model's impulse
/// response. Failures that belong to the configuration (no norm, unstable)
/// become row markers; solver failures propagate.
inline void evaluate_into(SweepRow& row, const StateSpace& model,
                          const RunOptions& opt) {
  try {
    const SobolevNorm sn = sobolev_norm(model, "delta");
    row.values["sobolev_W"] = sn.W;
    row.values["sobolev_bound"] = sn.bound;
    const ImpulseResponse r = simulate_impulse(model, "delta", opt.dt, opt.horizon);
    row.values["sim_peak"] = r.peak();
    row.values["sim_peak_time"] = r.peak_time();
    row.values["signal_W"] = signal_sobolev(r).W;
    if (opt.check_appendix)
      for (double p : {1.5, 2.0, 3.0})
        row.appendix_ok = row.appendix_ok && appendix_inequality_check(r, p);
  } catch (const Error& e) {
    const std::string marker = detail::status_for(e);
    if (marker.empty()) throw;
    row.status = marker;
  }
}

inline RobotParams robot_params(const ExperimentConfig& cfg) {
  RobotParams p;
  p.J = cfg.number("J", p.J);
  p.B = cfg.number("B", p.B);
  p.K_jt = cfg.number("K_jt", p.K_jt);
  p.I = cfg.number("I", p.I);
  p.V = cfg.number("V", p.V);
  p.K_e = cfg.number("K_e", p.K_e);
  return p;
}

inline ControllerSpec controller_spec(const ExperimentConfig& cfg,
                                      const std::string& fallback = "nocontrol") {
  const std::string name = cfg.word("controller", fallback);
  if (name == "nocontrol") return NoControl{};
  if (name == "nomotor") return NoMotor{};
  if (name == "pd") {
    PDTorque pd;
    pd.K_p = cfg.number("K_p", pd.K_p);
    pd.K_d = cfg.number("K_d", pd.K_d);
    return pd;
  }
  if (name == "lqr") return Lqr{cfg.number("R", Lqr{}.R)};
  if (name == "statefeedback") {
    if (!cfg.has("gain")) throw ConfigError("controller statefeedback needs 'gain'");
    const auto g = cfg.list("gain", {});
    if (g.size() != 4 && g.size() != 5)
      throw ConfigError("gain needs 4 entries (or 5 with a trailing 0)");
    return StateFeedback{Matrix(1, g.size(), g)};
  }
  throw ConfigError("unknown controller '" + name + "'");
}

inline RunOptions run_options(const ExperimentConfig& cfg) {
  RunOptions o;
  o.dt = cfg.number("dt", o.dt);
  o.horizon = cfg.number("horizon", o.horizon);
  if (o.horizon < 10.0 * o.dt) throw ConfigError("horizon must be at least 10*dt");
  return o;
}

/// The four controller variants compared across joint stiffness.
inline std::vector<ControllerSpec> controller_variants(const ExperimentConfig& cfg) {
  PDTorque pd;
  pd.K_p = cfg.number("K_p", pd.K_p);
  pd.K_d = cfg.number("K_d", pd.K_d);
  return {NoControl{}, NoMotor{}, pd, Lqr{cfg.number("R", Lqr{}.R)}};
}

/// Grounded or inertial model, chosen by `environment`.
inline StateSpace configured_model(const ExperimentConfig& cfg, const RobotParams& p,
                                   const ControllerSpec& c) {
  const std::string env = cfg.word("environment", "grounded");
  if (env == "grounded") {
    Grounded g;
    g.K_env = cfg.optional_number("K_env");
    return build_grounded(p, c, g);
  }
  if (env == "inertial") {
    DampedInertia d;
    d.B_h = cfg.number("B_h", d.B_h);
    d.I_h = cfg.number("I_h", d.I_h);
    return build_inertial(p, d, c);
  }
  throw ConfigError("environment must be grounded or inertial, got '" + env + "'");
}

inline void add_lqr_cost(SweepRow& row, const RobotParams& p, const ControllerSpec& c) {
  if (const auto* lqr = std::get_if<Lqr>(&c))
    row.values["lqr_cost"] = lqr_gain(build_grounded(p, NoControl{}), lqr->R).min_cost;
}

inline const std::vector<std::string>& norm_columns() {
  static const std::vector<std::string> cols{"sobolev_W",     "sobolev_bound", "sim_peak",
                                             "sim_peak_time", "signal_W"};
  return cols;
}

// ---------------------------------------------------------------------------
// Experiments

inline ResultTable run_norm(const ExperimentConfig& cfg, const RunOptions& opt) {
  const RobotParams p = robot_params(cfg);
  const ControllerSpec c = controller_spec(cfg);
  ResultTable t;
  t.param_columns = {"J", "B", "K_jt", "I", "V", "K_e"};
  t.label_column = "controller";
  t.value_columns = norm_columns();
  t.value_columns.push_back("lqr_cost");
  SweepRow row;
  row.params = {p.J, p.B, p.K_jt, p.I, p.V, p.K_e};
  row.label = controller_name(c);
  evaluate_into(row, configured_model(cfg, p, c), opt);
  add_lqr_cost(row, p, c);
  t.rows.push_back(std::move(row));
  return t;
}

/// Time series of the force and its derivative, every `stride`-th sample.
inline ResultTable run_simulate(const ExperimentConfig& cfg, const RunOptions& opt) {
  const RobotParams p = robot_params(cfg);
  const ControllerSpec c = controller_spec(cfg);
  const std::size_t stride = std::max<std::size_t>(1, cfg.count("stride", 1));
  const ImpulseResponse r =
      simulate_impulse(configured_model(cfg, p, c), "delta", opt.dt, opt.horizon);
  ResultTable t;
  t.param_columns = {"t"};
  t.value_columns = {"f", "fdot"};
  for (std::size_t k = 0; k < r.size(); k += stride) {
    SweepRow row;
    row.params = {static_cast<double>(k) * r.dt};
    row.values = {{"f", r.samples_f[k]}, {"fdot", r.samples_fdot[k]}};
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline ResultTable run_sweep_jointstiffness(const ExperimentConfig& cfg,
                                            const RunOptions& opt) {
  const RobotParams base = robot_params(cfg);
  const auto grid = cfg.grid("kjt_grid", "1e2:1e5:25:log");
  const auto variants = controller_variants(cfg);
  ResultTable t;
  t.param_columns = {"K_jt"};
  t.label_column = "controller";
  t.value_columns = norm_columns();
  t.value_columns.push_back("lqr_cost");
  t.rows = parallel_map<SweepRow>(grid.size() * variants.size(), [&](std::size_t i) {
    RobotParams p = base;
    p.K_jt = grid[i / variants.size()];
    const ControllerSpec& c = variants[i % variants.size()];
    SweepRow row;
    row.params = {p.K_jt};
    row.label = controller_name(c);
    evaluate_into(row, build_grounded(p, c), opt);
    add_lqr_cost(row, p, c);
    return row;
  });
  return t;
}

inline Matrix diagonal_from(const std::vector<double>& d, std::size_t n,
                            const std::string& name) {
  if (d.size() != n)
    throw ConfigError(name + " needs " + std::to_string(n) + " entries");
  for (double v : d)
    if (v < 0.0) throw ConfigError(name + " entries must be non-negative");
  return Matrix::diagonal(d);
}

inline Matrix sigma_w(const ExperimentConfig& cfg) {
  return diagonal_from(cfg.list("sigma_w", {0.1, 0.5, 0.1, 10.0, 15.0}), 5, "sigma_w");
}

inline Matrix sigma_v(const ExperimentConfig& cfg) {
  return diagonal_from(cfg.list("sigma_v", {0.1, 10.0}), 2, "sigma_v");
}

inline Sensing sensing_mode(const std::string& name) {
  if (name == "impedance") return Sensing::Impedance;
  if (name == "admittance") return Sensing::Admittance;
  throw ConfigError("sensing must be impedance or admittance, got '" + name + "'");
}

/// Posterior variance of the environment position, with a check that the
/// filter error dynamics are stable.
inline double estimation_variance(const RobotParams& p, Sensing s, double k_int,
                                  const Matrix& sw, const Matrix& sv) {
  const StateSpace est = build_estimation(p, s, k_int);
  const KalmanSteadyState k = kalman_steady_covariance(est, sw, sv);
  if (!is_hurwitz(filter_error_dynamics(est, k.P, sv)))
    throw NoStabilizingSolution("filter error dynamics are not Hurwitz");
  return k.var_x;
}

/// Interface stiffness sweep: collision bound against K_e and estimation
/// quality of the environment position with K_int = K_e.
inline ResultTable run_sweep_interface(const ExperimentConfig& cfg,
                                       const RunOptions& opt) {
  const RobotParams base = robot_params(cfg);
  const ControllerSpec c = controller_spec(cfg);
  const auto grid = cfg.grid("ke_grid", "1e2:1e5:25:log");
  const Matrix sw = sigma_w(cfg), sv = sigma_v(cfg);
  ResultTable t;
  t.param_columns = {"K_e"};
  t.label_column = "controller";
  t.value_columns = norm_columns();
  t.value_columns.insert(t.value_columns.end(), {"var_x_impedance", "var_x_admittance"});
  t.rows = parallel_map<SweepRow>(grid.size(), [&](std::size_t i) {
    RobotParams p = base;
    p.K_e = grid[i];
    SweepRow row;
    row.params = {p.K_e};
    row.label = controller_name(c);
    evaluate_into(row, build_grounded(p, c), opt);
    row.values["var_x_impedance"] = estimation_variance(p, Sensing::Impedance, p.K_e, sw, sv);
    row.values["var_x_admittance"] = estimation_variance(p, Sensing::Admittance, p.K_e, sw, sv);
    return row;
  });
  return t;
}

inline ResultTable run_estimate(const ExperimentConfig& cfg, const RunOptions&) {
  const RobotParams p = robot_params(cfg);
  const double k_int = cfg.number("K_int", p.K_e);
  const Sensing s = sensing_mode(cfg.word("sensing", "admittance"));
  ResultTable t;
  t.param_columns = {"K_int"};
  t.label_column = "sensing";
  t.value_columns = {"var_x"};
  SweepRow row;
  row.params = {k_int};
  row.label = sensing_name(s);
  row.values["var_x"] = estimation_variance(p, s, k_int, sigma_w(cfg), sigma_v(cfg));
  t.rows.push_back(std::move(row));
  return t;
}

/// Admittance-controlled arm over target inertia and natural frequency.
inline ResultTable run_sweep_manutec(const ExperimentConfig& cfg, const RunOptions& opt) {
  AdmittanceParams base;
  base.xi = cfg.number("xi", base.xi);
  base.K_e = cfg.number("K_e", base.K_e);
  base.M = cfg.number("M", base.M);
  base.v0 = cfg.number("v0", base.v0);
  const auto omegas = cfg.list("omega_t_values", {0.5, 1.0, 3.0, 6.0, 8.0});
  const auto masses = cfg.grid("mt_grid", "25:400:13:log");
  for (double w : omegas)
    if (!(w > 0.0)) throw ConfigError("omega_t_values must be positive");

  ResultTable t;
  t.param_columns = {"omega_t", "M_t", "xi"};
  t.value_columns = norm_columns();
  t.value_columns.push_back("relative_degree");
  t.rows = parallel_map<SweepRow>(omegas.size() * masses.size(), [&](std::size_t i) {
    AdmittanceParams a = base;
    a.omega_t = omegas[i / masses.size()];
    a.M_t = masses[i % masses.size()];
    SweepRow row;
    row.params = {a.omega_t, a.M_t, a.xi};
    const RationalTF f = assemble_manutec(a);
    row.values["relative_degree"] = static_cast<double>(relative_degree(f));
    if (!is_hurwitz(tf_to_ss(f).a())) {
      row.status = "unstable";
      return row;
    }
    evaluate_into(row, sobolev_realization(f), opt);
    return row;
  });
  return t;
}

/// Robot against human-like damped inertias: contact radius r scales
/// stiffness, damping and inertia by r².
inline ResultTable run_sweep_inertial(const ExperimentConfig& cfg, const RunOptions& opt) {
  const RobotParams base = robot_params(cfg);
  const ControllerSpec c = controller_spec(cfg);
  const auto radii = cfg.list("r_values", {0.2, 0.75});
  const auto ke = cfg.list("ke_factors", {10.0, 150.0});  // kN·m/rad, times r²
  const auto ih = cfg.list("ih_factors", {0.6, 175.0});   // kg·m², times r²
  const double bh = cfg.number("bh_factor", 75.0);
  for (const auto* v : {&radii, &ke, &ih})
    for (double x : *v)
      if (!(x > 0.0)) throw ConfigError("inertial sweep factors must be positive");

  struct Point {
    double r, k_e, b_h, i_h;
  };
  std::vector<Point> points;
  for (double r : radii)
    for (double k : ke)
      for (double i : ih) points.push_back({r, k * r * r * 1e3, bh * r * r, i * r * r});

  ResultTable t;
  t.param_columns = {"r", "K_e", "B_h", "I_h"};
  t.label_column = "controller";
  t.value_columns = norm_columns();
  t.rows = parallel_map<SweepRow>(points.size(), [&](std::size_t i) {
    const Point& pt = points[i];
    RobotParams p = base;
    p.K_e = pt.k_e;
    SweepRow row;
    row.params = {pt.r, pt.k_e, pt.b_h, pt.i_h};
    row.label = controller_name(c);
    evaluate_into(row, build_inertial(p, {pt.b_h, pt.i_h}, c), opt);
    return row;
  });
  return t;
}

/// Randomized soundness check: `samples` draws of the robot parameters, each
/// scaled by an independent factor in [1 − spread, 1 + spread], evaluated
/// under all four controller variants.
inline ResultTable run_validate_bound(const ExperimentConfig& cfg, const RunOptions& opt) {
  const RobotParams base = robot_params(cfg);
  const std::size_t n = cfg.count("samples", 500);
  const double spread = cfg.number("spread", 0.5);
  if (!(spread < 1.0)) throw ConfigError("spread must be below 1");
  const auto variants = controller_variants(cfg);

  Lcg rng(cfg.count("seed", 42));
  std::vector<RobotParams> draws(n);
  for (auto& p : draws) {
    p = base;
    for (double* field : {&p.J, &p.B, &p.K_jt, &p.I, &p.V, &p.K_e})
      *field *= rng.uniform(1.0 - spread, 1.0 + spread);
  }

  ResultTable t;
  t.param_columns = {"sample", "J", "B", "K_jt", "I", "V", "K_e"};
  t.label_column = "controller";
  t.value_columns = norm_columns();
  t.value_columns.push_back("peak_ratio");
  t.rows = parallel_map<SweepRow>(n * variants.size(), [&](std::size_t i) {
    const RobotParams& p = draws[i / variants.size()];
    const ControllerSpec& c = variants[i % variants.size()];
    SweepRow row;
    row.params = {static_cast<double>(i / variants.size()), p.J, p.B, p.K_jt, p.I, p.V, p.K_e};
    row.label = controller_name(c);
    evaluate_into(row, build_grounded(p, c), opt);
    const auto peak = row.get("sim_peak");
    const auto bound = row.get("sobolev_bound");
    if (peak && bound && *bound > 0.0) row.values["peak_ratio"] = *peak / *bound;
    return row;
  });

  double worst = 0.0;
  for (const auto& r : t.rows)
    if (const auto q = r.get("peak_ratio")) worst = std::max(worst, *q);
  t.notes.push_back("max_peak_ratio=" + format_number(worst));
  return t;
}

/// Dispatches on the configured experiment.
inline ResultTable run(const ExperimentConfig& cfg, RunOptions opt) {
  const RunOptions from_cfg = run_options(cfg);
  opt.dt = from_cfg.dt;
  opt.horizon = from_cfg.horizon;
  const std::string& e = cfg.experiment();
  try {
    if (e == "norm") return run_norm(cfg, opt);
    if (e == "simulate") return run_simulate(cfg, opt);
    if (e == "sweep-jointstiffness") return run_sweep_jointstiffness(cfg, opt);
    if (e == "sweep-interface") return run_sweep_interface(cfg, opt);
    if (e == "sweep-manutec") return run_sweep_manutec(cfg, opt);
    if (e == "sweep-inertial") return run_sweep_inertial(cfg, opt);
    if (e == "estimate") return run_estimate(cfg, opt);
    if (e == "validate-bound") return run_validate_bound(cfg, opt);
  } catch (const InvalidParams& ip) {
    // Out-of-range physical parameters come from the configuration.
    throw ConfigError(ip.what());
  }
  throw ConfigError("no experiment selected");
}

inline ResultTable run(const ExperimentConfig& cfg) { return run(cfg, RunOptions{}); }

}  // namespace cnorm
