#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "atomif/frames.hpp"
#include "atomif/series.hpp"
#include "atomif/states.hpp"

namespace atomif {

// Schema violations carry the offending field path; the CLI maps this to
// exit code 2 (numerical failures map to 3).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& message)
      : std::runtime_error(message) {}
};

struct MethodSpec {
  enum class Kind { Exact, Perturbative, Oracle };
  Kind kind = Kind::Exact;
  int order = 2;       // perturbative expansion order
  double step = 1e-4;  // oracle step [s]

  // "exact" | "perturbative:<k>" | "oracle:<h>"
  static MethodSpec parse(const std::string& text);
  std::string describe() const;
};

struct ScanSpec {
  enum class Variable { LaserPhaseLast, PulseSeparation };
  Variable variable = Variable::LaserPhaseLast;
  double start = 0.0;
  double stop = 0.0;
  int steps = 0;
};

// Pulse-sequence template; shorthands regenerate timings for T scans.
struct PulseTemplate {
  enum class Kind { ExplicitList, MachZehnder, Butterfly, MultiLoop };
  Kind kind = Kind::ExplicitList;
  double T = 0.0;
  double T1 = 0.0, T2 = 0.0;      // asymmetric Mach-Zehnder
  std::vector<double> times;      // multi-loop absolute pulse times
  Vec3 k = Vec3::Zero();          // shorthand wave vector
  std::vector<double> laser_phases;
  std::vector<PulseSpec> explicit_pulses;

  std::vector<PulseSpec> build() const;
  std::vector<PulseSpec> build_with_separation(double T_new) const;
};

struct Scenario {
  GravityModel gravity;
  FrameSpec frame;
  bool rotating_frame = false;  // evaluate in S'' instead of S'
  double mass = 0.0;
  std::string species;          // label only; physics uses raw SI values
  PulseTemplate pulses;
  GaussianState state;
  MethodSpec method;
  std::optional<ScanSpec> scan;
  double t0 = 0.0;
};

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text);

// Convenience constants (CODATA masses, two-photon |k| at the D2 lines).
struct SpeciesInfo {
  double mass;            // [kg]
  double two_photon_k;    // [1/m]
};
const SpeciesInfo* species_lookup(const std::string& name);

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

struct PhaseDecomposition {
  double phi_I = 0.0;
  double bch_term = 0.0;    // chi_0^T J chi_I / (2 hbar)
  double state_term = 0.0;  // <xi_0>^T J chi_I / hbar
};

struct Report {
  DetectionResult detection;
  PhaseDecomposition decomposition;
  PhaseVector chi_I;
  bool standard_geometry = true;     // pi/2 - pi ... pi - pi/2 areas
  double general_probability = 0.0;  // operator-path value (== detection.p
                                     // for standard geometries)
  int last_coefficient = 1;          // vertex coefficient of the final pulse
  std::string method;
};

Report run_scenario(const Scenario& scenario);

struct ScanRow {
  double value = 0.0;
  double probability = 0.0;
  double visibility = 0.0;
  double total_phase = 0.0;
};

struct ScanTable {
  std::string variable;
  std::vector<ScanRow> rows;
};

ScanTable run_scan(const Scenario& scenario);

struct FringeFit {
  double phase_mod_2pi = 0.0;
  double visibility = 0.0;
};

// Recovers the total phase (mod 2 pi) and the visibility from a fringe scan
// over the last laser phase. `sign` is (-1)^n, `last_coeff` the vertex
// coefficient of the scanned pulse.
FringeFit fit_fringe(const ScanTable& table, int sign, int last_coeff);

// ---------------------------------------------------------------------------
// Series-comparison studies (shared by the CLI and the verification suite)
// ---------------------------------------------------------------------------

struct StudyInputs {
  Vec3 k0 = Vec3::Zero();
  Vec3 g = Vec3::Zero();        // local g (inertial) or effective g'_0
  Mat3 gamma0 = Mat3::Zero();
  Vec3 omega = Vec3::Zero();    // laser rotation (inertial) / frame rate
  Vec3 omega_k = Vec3::Zero();  // independent laser rate (non-inertial study)
  double T = 0.0;
  Vec3 x0 = Vec3::Zero();
  Vec3 p0 = Vec3::Zero();
  double mass = 0.0;
  double laser_phase = 0.0;
  int levels = 3;               // halving levels
  double oracle_step = 1e-4;    // exact-engine RK4 step for circular frames
};

struct SeriesComparison {
  std::string series_name;
  std::vector<double> scales;        // 1, 1/2, 1/4, ...
  std::vector<double> exact_phase;
  std::vector<double> series_phase;
  std::vector<double> residual;      // |exact - series|
  std::vector<double> exponents;     // log2(r_i / r_{i+1})
};

// Exact engines for the two study configurations.
double exact_mz_phase_inertial(const StudyInputs& in, double scale);
double exact_mz_phase_comoving_circular(const StudyInputs& in, double scale,
                                        bool independent_laser_rate);

// Inertial constant-gradient engine with rotating lasers, compared against
// the closed Mach-Zehnder expansion (and the non-inertial series with the
// frame rotations switched off).
std::vector<SeriesComparison> inertial_mz_series_study(const StudyInputs& in);

// Circular co-moving frame with lasers locked to the orbit, compared against
// the atomic-fountain expansion.
SeriesComparison fountain_series_study(const StudyInputs& in);

// Circular co-moving frame with an independent laser rate, compared against
// the general non-inertial expansion.
SeriesComparison noninertial_series_study(const StudyInputs& in);

// Picks the applicable studies for a scenario (symmetric 3-pulse geometry).
std::vector<SeriesComparison> compare_series(const Scenario& scenario);

// ---------------------------------------------------------------------------
// Output formatting (deterministic, 17 significant digits)
// ---------------------------------------------------------------------------

std::string format_double(double value);
std::string report_to_json(const Report& report);
std::string report_to_text(const Report& report);
std::string scan_to_csv(const ScanTable& table);
std::string scan_to_json(const ScanTable& table);
std::string comparisons_to_text(const std::vector<SeriesComparison>& list);
std::string comparisons_to_json(const std::vector<SeriesComparison>& list);

}  // namespace atomif
