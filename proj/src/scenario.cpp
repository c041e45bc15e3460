#include "atomif/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace atomif {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Method / species
// ---------------------------------------------------------------------------

MethodSpec MethodSpec::parse(const std::string& text) {
  MethodSpec spec;
  if (text == "exact") {
    spec.kind = Kind::Exact;
    return spec;
  }
  if (text.rfind("perturbative:", 0) == 0) {
    spec.kind = Kind::Perturbative;
    try {
      spec.order = std::stoi(text.substr(13));
    } catch (const std::exception&) {
      throw ConfigError("method: malformed perturbative order in '" + text + "'");
    }
    if (spec.order < 0 || spec.order > 3) {
      throw ConfigError("method: perturbative order must be 0..3");
    }
    return spec;
  }
  if (text.rfind("oracle:", 0) == 0) {
    spec.kind = Kind::Oracle;
    try {
      spec.step = std::stod(text.substr(7));
    } catch (const std::exception&) {
      throw ConfigError("method: malformed oracle step in '" + text + "'");
    }
    if (!(spec.step > 0.0)) throw ConfigError("method: oracle step must be > 0");
    return spec;
  }
  throw ConfigError("method: expected exact|perturbative:<k>|oracle:<h>, got '" +
                    text + "'");
}

std::string MethodSpec::describe() const {
  switch (kind) {
    case Kind::Exact:
      return "exact";
    case Kind::Perturbative:
      return "perturbative:" + std::to_string(order);
    case Kind::Oracle: {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "oracle:%g", step);
      return buf;
    }
  }
  return "?";
}

const SpeciesInfo* species_lookup(const std::string& name) {
  static const SpeciesInfo rb87{1.4431608951791763e-25, 1.6105750963110983e7};
  static const SpeciesInfo cs133{2.206946951453701e-25, 1.4743251924246142e7};
  if (name == "Rb87" || name == "rb87") return &rb87;
  if (name == "Cs133" || name == "cs133") return &cs133;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Pulse templates
// ---------------------------------------------------------------------------

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<PulseSpec> sequence_from_times(const std::vector<double>& times,
                                           const Vec3& k,
                                           const std::vector<double>& phases) {
  std::vector<PulseSpec> pulses(times.size());
  for (size_t i = 0; i < times.size(); ++i) {
    pulses[i].t = times[i];
    pulses[i].k = k;
    pulses[i].laser_phase = i < phases.size() ? phases[i] : 0.0;
    const bool edge = (i == 0 || i + 1 == times.size());
    pulses[i].pulse_area = edge ? 0.5 * kPi : kPi;
  }
  return pulses;
}

}  // namespace

std::vector<PulseSpec> PulseTemplate::build() const {
  switch (kind) {
    case Kind::ExplicitList:
      return explicit_pulses;
    case Kind::MachZehnder: {
      const double ta = T1 > 0.0 ? T1 : T;
      const double tb = T2 > 0.0 ? T2 : T;
      return sequence_from_times({0.0, ta, ta + tb}, k, laser_phases);
    }
    case Kind::Butterfly:
      return sequence_from_times({0.0, T, 3.0 * T, 4.0 * T}, k, laser_phases);
    case Kind::MultiLoop:
      return sequence_from_times(times, k, laser_phases);
  }
  throw std::logic_error("PulseTemplate: unsupported kind");
}

std::vector<PulseSpec> PulseTemplate::build_with_separation(double t_new) const {
  PulseTemplate scaled = *this;
  switch (kind) {
    case Kind::MachZehnder:
      scaled.T = t_new;
      scaled.T1 = scaled.T2 = 0.0;
      return scaled.build();
    case Kind::Butterfly:
      scaled.T = t_new;
      return scaled.build();
    default:
      throw ConfigError(
          "scan: variable T requires a mach_zehnder or butterfly shorthand");
  }
}

// ---------------------------------------------------------------------------
// JSON parsing
// ---------------------------------------------------------------------------

namespace {

const json& require_field(const json& j, const char* key,
                          const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(path + "." + key + ": missing field");
  return *it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path + ": expected an integer");
  return j.get<int>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path + ": expected a string");
  return j.get<std::string>();
}

Vec3 as_vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) {
    throw ConfigError(path + ": expected an array of 3 numbers");
  }
  Vec3 v;
  for (int i = 0; i < 3; ++i) v[i] = as_number(j[i], path);
  return v;
}

Mat3 as_mat3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) {
    throw ConfigError(path + ": expected a 3x3 array");
  }
  Mat3 m;
  for (int r = 0; r < 3; ++r) {
    if (!j[r].is_array() || j[r].size() != 3) {
      throw ConfigError(path + ": expected a 3x3 array");
    }
    for (int c = 0; c < 3; ++c) m(r, c) = as_number(j[r][c], path);
  }
  return m;
}

Mat6 as_mat6(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 6) {
    throw ConfigError(path + ": expected a 6x6 array");
  }
  Mat6 m;
  for (int r = 0; r < 6; ++r) {
    if (!j[r].is_array() || j[r].size() != 6) {
      throw ConfigError(path + ": expected a 6x6 array");
    }
    for (int c = 0; c < 6; ++c) m(r, c) = as_number(j[r][c], path);
  }
  return m;
}

GravityModel parse_gravity(const json& j) {
  const std::string mode = as_string(require_field(j, "mode", "gravity"),
                                     "gravity.mode");
  if (mode == "uniform") {
    const Vec3 g = as_vec3(require_field(j, "g", "gravity"), "gravity.g");
    Mat3 gamma = Mat3::Zero();
    if (j.contains("gamma")) gamma = as_mat3(j["gamma"], "gravity.gamma");
    try {
      return GravityModel::uniform(g, gamma);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("gravity.gamma: ") + e.what());
    }
  }
  if (mode == "central") {
    const double gm = as_number(require_field(j, "gm", "gravity"), "gravity.gm");
    if (!(gm > 0.0)) throw ConfigError("gravity.gm: must be > 0");
    return GravityModel::central(gm);
  }
  throw ConfigError("gravity.mode: expected 'uniform' or 'central'");
}

Trajectory parse_trajectory(const json& j) {
  Trajectory traj;
  const std::string mode =
      as_string(require_field(j, "mode", "frame.trajectory"),
                "frame.trajectory.mode");
  if (j.contains("rho0")) {
    traj.rho0 = as_vec3(j["rho0"], "frame.trajectory.rho0");
  }
  if (mode == "constant") {
    traj.mode = Trajectory::Mode::Constant;
  } else if (mode == "polynomial") {
    traj.mode = Trajectory::Mode::Polynomial;
    if (j.contains("velocity")) {
      traj.velocity = as_vec3(j["velocity"], "frame.trajectory.velocity");
    }
    if (j.contains("acceleration")) {
      traj.acceleration =
          as_vec3(j["acceleration"], "frame.trajectory.acceleration");
    }
  } else if (mode == "circular") {
    traj.mode = Trajectory::Mode::Circular;
    traj.orbit_omega =
        as_vec3(require_field(j, "omega", "frame.trajectory"),
                "frame.trajectory.omega");
  } else {
    throw ConfigError(
        "frame.trajectory.mode: expected constant|polynomial|circular");
  }
  return traj;
}

PulseTemplate parse_pulses(const json& j) {
  PulseTemplate tpl;
  if (j.contains("list")) {
    tpl.kind = PulseTemplate::Kind::ExplicitList;
    const json& list = j["list"];
    if (!list.is_array() || list.size() < 3) {
      throw ConfigError("pulses.list: expected at least 3 pulses");
    }
    double prev = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < list.size(); ++i) {
      const std::string path = "pulses.list[" + std::to_string(i) + "]";
      PulseSpec pulse;
      pulse.t = as_number(require_field(list[i], "t", path), path + ".t");
      pulse.k = as_vec3(require_field(list[i], "k", path), path + ".k");
      if (list[i].contains("laser_phase")) {
        pulse.laser_phase = as_number(list[i]["laser_phase"], path + ".laser_phase");
      }
      pulse.pulse_area =
          as_number(require_field(list[i], "area", path), path + ".area");
      if (!(pulse.pulse_area > 0.0) || !(pulse.pulse_area < 2.0 * kPi)) {
        throw ConfigError(path + ".area: must lie in (0, 2 pi)");
      }
      if (list[i].contains("k_minus")) {
        pulse.k_minus = as_vec3(list[i]["k_minus"], path + ".k_minus");
      }
      if (!(pulse.t > prev)) {
        throw ConfigError(path + ".t: pulse times must be strictly increasing");
      }
      prev = pulse.t;
      tpl.explicit_pulses.push_back(pulse);
    }
    return tpl;
  }

  const std::string geometry =
      as_string(require_field(j, "geometry", "pulses"), "pulses.geometry");
  tpl.k = as_vec3(require_field(j, "k", "pulses"), "pulses.k");
  if (j.contains("laser_phases")) {
    const json& phases = j["laser_phases"];
    if (!phases.is_array()) {
      throw ConfigError("pulses.laser_phases: expected an array");
    }
    for (size_t i = 0; i < phases.size(); ++i) {
      tpl.laser_phases.push_back(
          as_number(phases[i], "pulses.laser_phases[" + std::to_string(i) + "]"));
    }
  }
  if (geometry == "mach_zehnder") {
    tpl.kind = PulseTemplate::Kind::MachZehnder;
    if (j.contains("T1") || j.contains("T2")) {
      tpl.T1 = as_number(require_field(j, "T1", "pulses"), "pulses.T1");
      tpl.T2 = as_number(require_field(j, "T2", "pulses"), "pulses.T2");
      if (!(tpl.T1 > 0.0) || !(tpl.T2 > 0.0)) {
        throw ConfigError("pulses.T1/T2: must be > 0");
      }
    } else {
      tpl.T = as_number(require_field(j, "T", "pulses"), "pulses.T");
      if (!(tpl.T > 0.0)) throw ConfigError("pulses.T: must be > 0");
    }
  } else if (geometry == "butterfly") {
    tpl.kind = PulseTemplate::Kind::Butterfly;
    tpl.T = as_number(require_field(j, "T", "pulses"), "pulses.T");
    if (!(tpl.T > 0.0)) throw ConfigError("pulses.T: must be > 0");
  } else if (geometry == "multi_loop") {
    tpl.kind = PulseTemplate::Kind::MultiLoop;
    const json& times = require_field(j, "times", "pulses");
    if (!times.is_array() || times.size() < 3) {
      throw ConfigError("pulses.times: expected >= 3 pulse times");
    }
    double prev = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < times.size(); ++i) {
      const double t =
          as_number(times[i], "pulses.times[" + std::to_string(i) + "]");
      if (!(t > prev)) {
        throw ConfigError("pulses.times: must be strictly increasing");
      }
      prev = t;
      tpl.times.push_back(t);
    }
  } else {
    throw ConfigError(
        "pulses.geometry: expected mach_zehnder|butterfly|multi_loop");
  }
  return tpl;
}

GaussianState parse_state(const json& j, double mass) {
  GaussianState state;
  if (j.contains("mean_x")) state.mean.x = as_vec3(j["mean_x"], "state.mean_x");
  if (j.contains("mean_p")) state.mean.p = as_vec3(j["mean_p"], "state.mean_p");
  if (j.contains("cov")) {
    state.cov = as_mat6(j["cov"], "state.cov");
  } else if (j.contains("temperature")) {
    const double temp = as_number(j["temperature"], "state.temperature");
    const double sigma_x = as_number(require_field(j, "sigma_x", "state"),
                                     "state.sigma_x");
    if (!(temp > 0.0) || !(sigma_x > 0.0)) {
      throw ConfigError("state: temperature and sigma_x must be > 0");
    }
    // Thermal shorthand: sigma_p^2 = m k_B T per axis.
    state.cov = Mat6::Identity();
    state.cov.topLeftCorner<3, 3>() *= sigma_x * sigma_x;
    state.cov.bottomRightCorner<3, 3>() *= mass * kBoltzmann * temp;
  } else {
    const double sigma_x = as_number(require_field(j, "sigma_x", "state"),
                                     "state.sigma_x");
    const double sigma_p = as_number(require_field(j, "sigma_p", "state"),
                                     "state.sigma_p");
    if (!(sigma_x > 0.0) || !(sigma_p > 0.0)) {
      throw ConfigError("state: sigma_x and sigma_p must be > 0");
    }
    state.cov = Mat6::Identity();
    state.cov.topLeftCorner<3, 3>() *= sigma_x * sigma_x;
    state.cov.bottomRightCorner<3, 3>() *= sigma_p * sigma_p;
  }
  try {
    state.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("state.cov: ") + e.what());
  }
  return state;
}

ScanSpec parse_scan(const json& j) {
  ScanSpec scan;
  const std::string variable =
      as_string(require_field(j, "variable", "scan"), "scan.variable");
  if (variable == "laser_phase_last") {
    scan.variable = ScanSpec::Variable::LaserPhaseLast;
  } else if (variable == "T") {
    scan.variable = ScanSpec::Variable::PulseSeparation;
  } else {
    throw ConfigError("scan.variable: expected laser_phase_last|T");
  }
  scan.start = as_number(require_field(j, "start", "scan"), "scan.start");
  scan.stop = as_number(require_field(j, "stop", "scan"), "scan.stop");
  scan.steps = as_int(require_field(j, "steps", "scan"), "scan.steps");
  if (scan.steps < 2) throw ConfigError("scan.steps: must be >= 2");
  return scan;
}

CoefficientSet scenario_coefficients(const Scenario& s) {
  return s.rotating_frame
             ? rotating_frame_coefficients(s.gravity, s.frame, s.mass)
             : comoving_coefficients(s.gravity, s.frame, s.mass);
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario: invalid JSON: ") + e.what());
  }

  Scenario s;
  s.gravity = parse_gravity(require_field(j, "gravity", "scenario"));

  const json& frame = require_field(j, "frame", "scenario");
  s.frame.trajectory =
      parse_trajectory(require_field(frame, "trajectory", "frame"));
  if (frame.contains("frame_rotation")) {
    s.frame.frame_rotation =
        as_vec3(frame["frame_rotation"], "frame.frame_rotation");
  }
  if (frame.contains("laser_rotation")) {
    s.frame.laser_rotation =
        as_vec3(frame["laser_rotation"], "frame.laser_rotation");
  }
  s.rotating_frame = s.frame.frame_rotation.norm() >= kOmegaZeroThreshold;

  if (j.contains("species")) {
    s.species = as_string(j["species"], "species");
    const SpeciesInfo* info = species_lookup(s.species);
    if (info == nullptr) {
      throw ConfigError("species: unknown species '" + s.species +
                        "' (known: Rb87, Cs133)");
    }
    s.mass = info->mass;
  }
  if (j.contains("mass")) {
    s.mass = as_number(j["mass"], "mass");
  }
  if (!(s.mass > 0.0)) {
    throw ConfigError("mass: a positive mass (or a known species) is required");
  }

  s.pulses = parse_pulses(require_field(j, "pulses", "scenario"));
  if (s.pulses.build().size() < 3) {
    throw ConfigError("pulses: need at least 3 pulses");
  }
  s.state = parse_state(require_field(j, "state", "scenario"), s.mass);

  if (j.contains("method")) {
    s.method = MethodSpec::parse(as_string(j["method"], "method"));
  } else {
    // Auto-select: closed form when the coefficients are constant.
    s.method = scenario_coefficients(s).time_independent
                   ? MethodSpec{MethodSpec::Kind::Exact}
                   : MethodSpec{MethodSpec::Kind::Perturbative, 2};
  }
  if (j.contains("scan")) s.scan = parse_scan(j["scan"]);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("scenario: cannot open file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

struct Engine {
  CoefficientSet coeffs;
  std::unique_ptr<Propagator> propagator;
};

Mat6 free_h0(double mass) {
  Mat6 h = Mat6::Zero();
  h.bottomRightCorner<3, 3>() = Mat3::Identity() / mass;
  return h;
}

Engine build_engine(const Scenario& s) {
  Engine engine;
  engine.coeffs = scenario_coefficients(s);
  const CoefficientSet& c = engine.coeffs;
  switch (s.method.kind) {
    case MethodSpec::Kind::Exact:
      if (!c.time_independent) {
        throw ConfigError(
            "method: 'exact' needs time-independent coefficients; use "
            "perturbative:<k> or oracle:<h> for this scenario");
      }
      if (c.coupling_free()) {
        engine.propagator = std::make_unique<ConstantGradientPropagator>(
            c.constant_gamma(), s.mass);
      } else {
        engine.propagator = std::make_unique<ConstantHamiltonianPropagator>(
            c.constant_second);
      }
      break;
    case MethodSpec::Kind::Perturbative: {
      const Mat6 h0 = free_h0(s.mass);
      auto h_func = c.second_order;
      engine.propagator = std::make_unique<PerturbativePropagator>(
          h0, [h_func, h0](double t) { return Mat6(h_func(t) - h0); },
          s.method.order);
      break;
    }
    case MethodSpec::Kind::Oracle:
      engine.propagator =
          std::make_unique<OdePropagator>(c.second_order, s.method.step);
      break;
  }
  return engine;
}

bool standard_areas(const std::vector<PulseSpec>& pulses) {
  constexpr double tol = 1e-9;
  for (size_t i = 0; i < pulses.size(); ++i) {
    const bool edge = (i == 0 || i + 1 == pulses.size());
    const double target = edge ? 0.5 * kPi : kPi;
    if (std::abs(pulses[i].pulse_area - target) > tol) return false;
    if (pulses[i].k_minus.has_value()) return false;
  }
  return true;
}

Report evaluate_pulses(const Scenario& s, const std::vector<PulseSpec>& pulses) {
  const Engine engine = build_engine(s);
  const Propagator& prop = *engine.propagator;
  const CoefficientFunc g_func = engine.coeffs.first_order;

  std::vector<PulseOperator> ops;
  std::vector<PulseEffect> effects;
  ops.reserve(pulses.size());
  effects.reserve(pulses.size());
  for (const PulseSpec& pulse : pulses) {
    const double dt = pulse.t - s.t0;
    const Vec3 k_plus =
        rotate_wave_vector(pulse.k, s.frame.laser_rotation, dt);
    const PulseEffect plus =
        pulse_effect(pulse.t, k_plus, pulse.laser_phase, prop, g_func, s.t0);
    PulseEffect minus = plus;
    if (pulse.k_minus.has_value()) {
      const Vec3 k_m =
          rotate_wave_vector(*pulse.k_minus, s.frame.laser_rotation, dt);
      minus = pulse_effect(pulse.t, k_m, pulse.laser_phase, prop, g_func, s.t0);
    }
    ops.push_back({pulse.pulse_area, plus, minus});
    effects.push_back(plus);
  }

  Report report;
  report.method = s.method.describe();
  report.standard_geometry = standard_areas(pulses);

  const GeometrySummary summary = geometry_summary(effects);
  report.detection = detection_probability(summary, s.state);
  report.chi_I = summary.chi_I;
  report.last_coefficient = summary.coefficients.back();
  report.decomposition.phi_I = summary.phi_I;
  report.decomposition.bch_term = summary.bch_phase;
  report.decomposition.state_term =
      symplectic_sandwich(s.state.mean, symplectic_form(), summary.chi_I) /
      kHbar;

  const OperatorMatrix matrix = compose_beam_splitters(ops);
  report.general_probability =
      detection_probability_general(matrix[0][0], s.state);
  return report;
}

double faithful_probability(const Report& r) {
  return r.standard_geometry ? r.detection.probability : r.general_probability;
}

}  // namespace

Report run_scenario(const Scenario& scenario) {
  return evaluate_pulses(scenario, scenario.pulses.build());
}

ScanTable run_scan(const Scenario& scenario) {
  if (!scenario.scan.has_value()) {
    throw ConfigError("scan: scenario has no scan block");
  }
  const ScanSpec& scan = *scenario.scan;
  ScanTable table;
  table.rows.resize(scan.steps);
  const double width = (scan.stop - scan.start) / scan.steps;

  if (scan.variable == ScanSpec::Variable::LaserPhaseLast) {
    table.variable = "laser_phase_last";
    // The last laser phase enters the geometry linearly; evaluate the pulse
    // effects once and shift the final phase per row.
    std::vector<PulseSpec> pulses = scenario.pulses.build();
    const double base_phase = pulses.back().laser_phase;
    const Report base_report = evaluate_pulses(scenario, pulses);
    const int c_last = base_report.last_coefficient;
    for (int i = 0; i < scan.steps; ++i) {
      const double value = scan.start + i * width;
      ScanRow& row = table.rows[i];
      row.value = value;
      row.visibility = base_report.detection.visibility;
      row.total_phase = base_report.detection.total_phase +
                        c_last * (value - base_phase);
      if (base_report.standard_geometry) {
        row.probability =
            0.5 * (1.0 + base_report.detection.sign * row.visibility *
                             std::cos(row.total_phase));
      } else {
        std::vector<PulseSpec> shifted = pulses;
        shifted.back().laser_phase = value;
        const Report r = evaluate_pulses(scenario, shifted);
        row.probability = faithful_probability(r);
      }
    }
    return table;
  }

  table.variable = "T";
  // Pulse separations change the whole evaluation; rows run concurrently
  // behind an index-ordered collector.
  const unsigned n_workers =
      std::max(1u, std::min(std::thread::hardware_concurrency(), 8u));
  std::vector<std::future<void>> workers;
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::string error_message;
  std::mutex error_mutex;
  for (unsigned w = 0; w < n_workers; ++w) {
    workers.push_back(std::async(std::launch::async, [&] {
      for (int i = next.fetch_add(1); i < scan.steps; i = next.fetch_add(1)) {
        if (failed.load()) return;
        try {
          const double value = scan.start + i * width;
          const std::vector<PulseSpec> pulses =
              scenario.pulses.build_with_separation(value);
          const Report r = evaluate_pulses(scenario, pulses);
          table.rows[i] = {value, faithful_probability(r),
                           r.detection.visibility, r.detection.total_phase};
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(error_mutex);
          failed.store(true);
          error_message = e.what();
        }
      }
    }));
  }
  for (auto& worker : workers) worker.get();
  if (failed.load()) throw std::runtime_error("scan: " + error_message);
  return table;
}

FringeFit fit_fringe(const ScanTable& table, int sign, int last_coeff) {
  const auto& rows = table.rows;
  if (rows.size() < 3) {
    throw std::invalid_argument("fit_fringe: need at least 3 scan rows");
  }
  double u = 0.0;  // s V cos(dPhi)
  double w = 0.0;  // s V sin(dPhi)
  const size_t n = rows.size();
  const bool exact_grid = n % 4 == 0 && std::abs(rows.front().value) < 1e-12;
  if (exact_grid) {
    const double p0 = rows[0].probability;
    const double pq = rows[n / 4].probability;
    const double ph = rows[n / 2].probability;
    u = p0 - ph;
    w = last_coeff * (1.0 - 2.0 * pq);
  } else {
    // Least squares on P = a + b cos v + c sin v (exact for one harmonic).
    double sc = 0, ss = 0, scc = 0, css = 0, scs = 0, sp = 0, spc = 0, sps = 0;
    for (const ScanRow& row : rows) {
      const double c = std::cos(row.value);
      const double s = std::sin(row.value);
      sc += c; ss += s; scc += c * c; css += s * s; scs += c * s;
      sp += row.probability; spc += row.probability * c; sps += row.probability * s;
    }
    Eigen::Matrix3d m;
    m << static_cast<double>(rows.size()), sc, ss,
         sc, scc, scs,
         ss, scs, css;
    const Eigen::Vector3d rhs(sp, spc, sps);
    const Eigen::Vector3d sol = m.ldlt().solve(rhs);
    u = 2.0 * sol[1];
    w = -2.0 * sol[2] * last_coeff;
  }
  FringeFit fit;
  fit.visibility = std::hypot(u, w);
  double phase = std::atan2(sign * w, sign * u);
  if (phase < 0.0) phase += 2.0 * kPi;
  fit.phase_mod_2pi = phase;
  return fit;
}

// ---------------------------------------------------------------------------
// Series studies
// ---------------------------------------------------------------------------

namespace {

GaussianState point_state(const Vec3& x0, const Vec3& p0) {
  GaussianState state;
  state.mean = {x0, p0};
  state.cov = Mat6::Identity();
  return state;
}

double mz_total_phase(const Propagator& prop, const CoefficientFunc& g_func,
                      const std::vector<Vec3>& ks,
                      const std::vector<double>& times, double laser_phase,
                      const GaussianState& state) {
  std::vector<PulseEffect> effects;
  for (size_t i = 0; i < times.size(); ++i) {
    const double phase = (i == 0) ? laser_phase : 0.0;
    effects.push_back(pulse_effect(times[i], ks[i], phase, prop, g_func, 0.0,
                                   /*panels=*/12, /*nodes=*/16));
  }
  return total_phase(geometry_summary(effects), state);
}

SeriesComparison make_comparison(
    const std::string& name, const StudyInputs& in,
    const std::function<double(double)>& exact,
    const std::function<double(double)>& series) {
  SeriesComparison cmp;
  cmp.series_name = name;
  double scale = 1.0;
  for (int level = 0; level < std::max(2, in.levels); ++level) {
    cmp.scales.push_back(scale);
    const double e = exact(scale);
    const double s = series(scale);
    cmp.exact_phase.push_back(e);
    cmp.series_phase.push_back(s);
    cmp.residual.push_back(std::abs(e - s));
    scale *= 0.5;
  }
  for (size_t i = 0; i + 1 < cmp.residual.size(); ++i) {
    cmp.exponents.push_back(
        std::log2(cmp.residual[i] / cmp.residual[i + 1]));
  }
  return cmp;
}

}  // namespace

double exact_mz_phase_inertial(const StudyInputs& in, double scale) {
  const Mat3 gamma = scale * in.gamma0;
  const Vec3 omega = scale * in.omega;
  const ConstantGradientPropagator prop(gamma, in.mass);
  Vec6 g_vec = Vec6::Zero();
  g_vec.head<3>() = -in.mass * in.g;
  const CoefficientFunc g_func = [g_vec](double) { return g_vec; };

  const std::vector<double> times{0.0, in.T, 2.0 * in.T};
  std::vector<Vec3> ks;
  for (double t : times) ks.push_back(rotate_wave_vector(in.k0, omega, t));
  return mz_total_phase(prop, g_func, ks, times, in.laser_phase,
                        point_state(in.x0, in.p0));
}

double exact_mz_phase_comoving_circular(const StudyInputs& in, double scale,
                                        bool independent_laser_rate) {
  const Mat3 gamma0 = scale * in.gamma0;
  const Vec3 omega = scale * in.omega;
  const Vec3 omega_k = independent_laser_rate ? Vec3(scale * in.omega_k) : omega;
  const double mass = in.mass;
  const Vec3 g_eff = in.g;  // effective g'_0, held fixed across scales

  const HamiltonianFunc h_func = [gamma0, omega, mass](double t) {
    const Mat3 r = rotation_about(omega, t);
    Mat6 h = Mat6::Zero();
    h.topLeftCorner<3, 3>() = mass * (r * gamma0 * r.transpose());
    h.bottomRightCorner<3, 3>() = Mat3::Identity() / mass;
    return h;
  };
  const CoefficientFunc g_func = [g_eff, omega, mass](double t) {
    Vec6 v = Vec6::Zero();
    v.head<3>() = -mass * (rotation_about(omega, t) * g_eff);
    return v;
  };
  const OdePropagator prop(h_func, in.oracle_step);

  const std::vector<double> times{0.0, in.T, 2.0 * in.T};
  std::vector<Vec3> ks;
  for (double t : times) ks.push_back(rotate_wave_vector(in.k0, omega_k, t));
  return mz_total_phase(prop, g_func, ks, times, in.laser_phase,
                        point_state(in.x0, in.p0));
}

std::vector<SeriesComparison> inertial_mz_series_study(const StudyInputs& in) {
  auto exact = [&in](double s) { return exact_mz_phase_inertial(in, s); };
  auto series_closed = [&in](double s) {
    ExpansionParams p;
    p.k0 = in.k0;
    p.g = in.g;
    p.gamma0 = s * in.gamma0;
    p.omega = s * in.omega;
    p.T = in.T;
    p.x0 = in.x0;
    p.p0 = in.p0;
    p.mass = in.mass;
    p.laser_phase = in.laser_phase;
    return delta_phi_mz_series(p);
  };
  auto series_general = [&in](double s) {
    ExpansionParams p;
    p.k0 = in.k0;
    p.g = in.g;
    p.gamma0 = s * in.gamma0;
    p.omega_k = s * in.omega;
    p.omega_g = Vec3::Zero();
    p.omega_gamma = Vec3::Zero();
    p.T = in.T;
    p.x0 = in.x0;
    p.p0 = in.p0;
    p.mass = in.mass;
    p.laser_phase = in.laser_phase;
    return phi_mz_noninertial_series(p);
  };
  return {make_comparison("mach_zehnder_rotating_lasers", in, exact,
                          series_closed),
          make_comparison("mach_zehnder_three_rotations(lasers_only)", in,
                          exact, series_general)};
}

SeriesComparison fountain_series_study(const StudyInputs& in) {
  auto exact = [&in](double s) {
    return exact_mz_phase_comoving_circular(in, s, false);
  };
  auto series = [&in](double s) {
    ExpansionParams p;
    p.k0 = in.k0;
    p.g = in.g;
    p.gamma0 = s * in.gamma0;
    p.omega = s * in.omega;
    p.T = in.T;
    p.x0 = in.x0;
    p.p0 = in.p0;
    p.mass = in.mass;
    p.laser_phase = in.laser_phase;
    return phi_atomic_fountain_series(p);
  };
  return make_comparison("atomic_fountain", in, exact, series);
}

SeriesComparison noninertial_series_study(const StudyInputs& in) {
  auto exact = [&in](double s) {
    return exact_mz_phase_comoving_circular(in, s, true);
  };
  auto series = [&in](double s) {
    ExpansionParams p;
    p.k0 = in.k0;
    p.g = in.g;
    p.gamma0 = s * in.gamma0;
    p.omega_k = s * in.omega_k;
    p.omega_g = s * in.omega;
    p.omega_gamma = s * in.omega;
    p.T = in.T;
    p.x0 = in.x0;
    p.p0 = in.p0;
    p.mass = in.mass;
    p.laser_phase = in.laser_phase;
    return phi_mz_noninertial_series(p);
  };
  return make_comparison("mach_zehnder_three_rotations", in, exact, series);
}

std::vector<SeriesComparison> compare_series(const Scenario& scenario) {
  if (scenario.pulses.kind != PulseTemplate::Kind::MachZehnder ||
      (scenario.pulses.T1 > 0.0 &&
       std::abs(scenario.pulses.T1 - scenario.pulses.T2) > 0.0)) {
    throw ConfigError(
        "compare-series: needs a symmetric mach_zehnder shorthand scenario");
  }
  if (scenario.rotating_frame) {
    throw ConfigError(
        "compare-series: evaluate the scenario in the co-moving frame "
        "(frame_rotation = 0)");
  }

  StudyInputs in;
  in.k0 = scenario.pulses.k;
  in.T = scenario.pulses.T > 0.0 ? scenario.pulses.T : scenario.pulses.T1;
  in.x0 = scenario.state.mean.x;
  in.p0 = scenario.state.mean.p;
  in.mass = scenario.mass;
  const auto& phases = scenario.pulses.laser_phases;
  const auto phase_at = [&phases](size_t i) {
    return i < phases.size() ? phases[i] : 0.0;
  };
  in.laser_phase = phase_at(0) - 2.0 * phase_at(1) + phase_at(2);
  if (scenario.method.kind == MethodSpec::Kind::Oracle) {
    in.oracle_step = scenario.method.step;
  }

  const Trajectory& traj = scenario.frame.trajectory;
  const Vec3 rho0 = traj.rho0;
  in.gamma0 = gravity_gradient(scenario.gravity, rho0);

  if (traj.mode == Trajectory::Mode::Constant) {
    in.g = local_acceleration(scenario.gravity, rho0);
    in.omega = scenario.frame.laser_rotation;
    return inertial_mz_series_study(in);
  }
  if (traj.mode == Trajectory::Mode::Circular) {
    const Vec3 orbit = traj.orbit_omega;
    in.omega = orbit;
    in.g = local_acceleration(scenario.gravity, rho0) -
           orbit.cross(orbit.cross(rho0));
    if ((scenario.frame.laser_rotation - orbit).norm() <
        kOmegaZeroThreshold) {
      return {fountain_series_study(in)};
    }
    in.omega_k = scenario.frame.laser_rotation;
    return {noninertial_series_study(in)};
  }
  throw ConfigError(
      "compare-series: supported trajectories are constant and circular");
}

// ---------------------------------------------------------------------------
// Formatting
// ---------------------------------------------------------------------------

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

namespace {

json phase_vector_to_json(const PhaseVector& v) {
  return json{{"x", {v.x[0], v.x[1], v.x[2]}},
              {"p", {v.p[0], v.p[1], v.p[2]}}};
}

json report_json_object(const Report& r) {
  return json{
      {"probability", faithful_probability(r)},
      {"visibility", r.detection.visibility},
      {"total_phase_rad", r.detection.total_phase},
      {"sign", r.detection.sign},
      {"standard_geometry", r.standard_geometry},
      {"general_probability", r.general_probability},
      {"phase_decomposition",
       {{"phi_I", r.decomposition.phi_I},
        {"bch_term", r.decomposition.bch_term},
        {"state_term", r.decomposition.state_term}}},
      {"chi_I", phase_vector_to_json(r.chi_I)},
      {"method", r.method}};
}

}  // namespace

std::string report_to_json(const Report& report) {
  return report_json_object(report).dump(2) + "\n";
}

std::string report_to_text(const Report& report) {
  std::ostringstream out;
  out << "method: " << report.method << "\n";
  out << "probability: " << format_double(faithful_probability(report)) << "\n";
  out << "visibility: " << format_double(report.detection.visibility) << "\n";
  out << "total_phase_rad: " << format_double(report.detection.total_phase)
      << "\n";
  out << "  phi_I: " << format_double(report.decomposition.phi_I) << "\n";
  out << "  bch_term: " << format_double(report.decomposition.bch_term)
      << "\n";
  out << "  state_term: " << format_double(report.decomposition.state_term)
      << "\n";
  out << "chi_I_x_m: [" << format_double(report.chi_I.x[0]) << ", "
      << format_double(report.chi_I.x[1]) << ", "
      << format_double(report.chi_I.x[2]) << "]\n";
  out << "chi_I_p_kgm_s: [" << format_double(report.chi_I.p[0]) << ", "
      << format_double(report.chi_I.p[1]) << ", "
      << format_double(report.chi_I.p[2]) << "]\n";
  out << "standard_geometry: " << (report.standard_geometry ? "true" : "false")
      << "\n";
  return out.str();
}

std::string scan_to_csv(const ScanTable& table) {
  std::ostringstream out;
  out << "scan_value,probability,visibility,total_phase_rad\n";
  for (const ScanRow& row : table.rows) {
    out << format_double(row.value) << ',' << format_double(row.probability)
        << ',' << format_double(row.visibility) << ','
        << format_double(row.total_phase) << '\n';
  }
  return out.str();
}

std::string scan_to_json(const ScanTable& table) {
  json rows = json::array();
  for (const ScanRow& row : table.rows) {
    rows.push_back(json{{"scan_value", row.value},
                        {"probability", row.probability},
                        {"visibility", row.visibility},
                        {"total_phase_rad", row.total_phase}});
  }
  return json{{"variable", table.variable}, {"rows", rows}}.dump(2) + "\n";
}

std::string comparisons_to_text(const std::vector<SeriesComparison>& list) {
  std::ostringstream out;
  for (const SeriesComparison& cmp : list) {
    out << "series: " << cmp.series_name << "\n";
    for (size_t i = 0; i < cmp.scales.size(); ++i) {
      out << "  scale " << format_double(cmp.scales[i])
          << "  exact " << format_double(cmp.exact_phase[i])
          << "  series " << format_double(cmp.series_phase[i])
          << "  residual " << format_double(cmp.residual[i]) << "\n";
    }
    out << "  exponents:";
    for (double e : cmp.exponents) out << ' ' << format_double(e);
    out << "\n";
  }
  return out.str();
}

std::string comparisons_to_json(const std::vector<SeriesComparison>& list) {
  json arr = json::array();
  for (const SeriesComparison& cmp : list) {
    arr.push_back(json{{"series", cmp.series_name},
                       {"scales", cmp.scales},
                       {"exact_phase", cmp.exact_phase},
                       {"series_phase", cmp.series_phase},
                       {"residual", cmp.residual},
                       {"exponents", cmp.exponents}});
  }
  return arr.dump(2) + "\n";
}

}  // namespace atomif
