// Command-line front end: simulation, EuRoC-format evaluation, and
// observability analysis, driven by a JSON config with flag overrides.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "lievio/lievio.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  std::string dataset_path;
  std::string modality;
  std::string name = "sim";
  long long seed = -1;
  int runs = -1;
  bool stationary = false;
  double delta = 2.0;
};

lievio::Modality parse_modality(const std::string& s) {
  if (s == "relpos") return lievio::Modality::RelativePosition;
  if (s == "stereo") return lievio::Modality::StereoBearing;
  if (s == "mono") return lievio::Modality::MonoBearing;
  throw lievio::DegenerateInput("unknown modality '" + s + "' (use relpos|stereo|mono)");
}

template <typename T>
void take(const json& j, const char* key, T& dst, std::vector<std::string>& errors) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception&) {
    errors.push_back(std::string(key) + ": wrong type");
  }
}

void load_config(const std::string& path, lievio::ScenarioConfig& cfg,
                 lievio::ObserverConfig& ocfg, CliOptions& opts) {
  std::ifstream in(path);
  if (!in) throw lievio::ParseError(path, 0, "cannot open config file");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw lievio::ParseError(path, 0, e.what());
  }

  static const std::set<std::string> known = {
      "radius", "v_forward", "vert_amp", "vert_freq", "roll_amp", "roll_freq",
      "pitch_amp", "pitch_freq", "duration", "imu_rate", "cam_rate",
      "n_world_landmarks", "cube_side", "max_visible", "fov_deg",
      "sample_floor_ceiling", "noise", "seed", "modality",
      "init_att_err_deg", "init_pos_err_m", "init_vel_err_mps", "init_grav_err_deg",
      "gauge_yaw", "gauge_translation", "observer", "dataset_path", "name",
      "runs", "delta", "stationary"};
  std::vector<std::string> errors;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) errors.push_back(it.key() + ": unknown key");
  }

  take(j, "radius", cfg.radius, errors);
  take(j, "v_forward", cfg.v_forward, errors);
  take(j, "vert_amp", cfg.vert_amp, errors);
  take(j, "vert_freq", cfg.vert_freq, errors);
  take(j, "roll_amp", cfg.roll_amp, errors);
  take(j, "roll_freq", cfg.roll_freq, errors);
  take(j, "pitch_amp", cfg.pitch_amp, errors);
  take(j, "pitch_freq", cfg.pitch_freq, errors);
  take(j, "duration", cfg.duration, errors);
  take(j, "imu_rate", cfg.imu_rate, errors);
  take(j, "cam_rate", cfg.cam_rate, errors);
  take(j, "n_world_landmarks", cfg.n_world_landmarks, errors);
  take(j, "cube_side", cfg.cube_side, errors);
  take(j, "max_visible", cfg.max_visible, errors);
  take(j, "fov_deg", cfg.fov_deg, errors);
  take(j, "sample_floor_ceiling", cfg.sample_floor_ceiling, errors);
  take(j, "seed", cfg.seed, errors);
  take(j, "init_att_err_deg", cfg.init_att_err_deg, errors);
  take(j, "init_pos_err_m", cfg.init_pos_err_m, errors);
  take(j, "init_vel_err_mps", cfg.init_vel_err_mps, errors);
  take(j, "init_grav_err_deg", cfg.init_grav_err_deg, errors);
  take(j, "gauge_yaw", cfg.gauge_yaw, errors);
  if (j.contains("gauge_translation")) {
    try {
      const auto v = j.at("gauge_translation").get<std::vector<double>>();
      if (v.size() != 3) throw json::other_error::create(501, "size", nullptr);
      cfg.gauge_translation = lievio::Vec3(v[0], v[1], v[2]);
    } catch (const json::exception&) {
      errors.push_back("gauge_translation: expected [x, y, z]");
    }
  }
  if (j.contains("noise")) {
    const json& nj = j.at("noise");
    take(nj, "gyro_std", cfg.noise.gyro_std, errors);
    take(nj, "accel_std", cfg.noise.accel_std, errors);
    take(nj, "bearing_std", cfg.noise.bearing_std, errors);
    take(nj, "relpos_std", cfg.noise.relpos_std, errors);
  }
  if (j.contains("modality")) {
    std::string m;
    take(j, "modality", m, errors);
    if (!m.empty()) cfg.modality = parse_modality(m);
  }
  if (j.contains("observer")) {
    const json& oj = j.at("observer");
    take(oj, "k_r", ocfg.k_r, errors);
    take(oj, "p0_v", ocfg.p0_v, errors);
    take(oj, "p0_g", ocfg.p0_g, errors);
    take(oj, "p0_l", ocfg.p0_l, errors);
    take(oj, "v_v", ocfg.v_v, errors);
    take(oj, "v_g", ocfg.v_g, errors);
    take(oj, "v_l", ocfg.v_l, errors);
    take(oj, "relpos_std", ocfg.relpos_std, errors);
    take(oj, "bearing_std_m", ocfg.bearing_std_m, errors);
    take(oj, "init_depth", ocfg.init_depth, errors);
  }
  take(j, "dataset_path", opts.dataset_path, errors);
  take(j, "name", opts.name, errors);
  take(j, "delta", opts.delta, errors);
  take(j, "stationary", opts.stationary, errors);
  if (j.contains("runs")) {
    int r = 0;
    take(j, "runs", r, errors);
    if (opts.runs < 0) opts.runs = r;
  }

  if (!errors.empty()) {
    std::string msg = "config validation failed:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw lievio::ParseError(path, 0, msg);
  }
}

json config_echo(const lievio::ScenarioConfig& cfg, const lievio::ObserverConfig& ocfg) {
  json j;
  j["radius"] = cfg.radius;
  j["v_forward"] = cfg.v_forward;
  j["duration"] = cfg.duration;
  j["imu_rate"] = cfg.imu_rate;
  j["cam_rate"] = cfg.cam_rate;
  j["max_visible"] = cfg.max_visible;
  j["fov_deg"] = cfg.fov_deg;
  j["seed"] = cfg.seed;
  j["modality"] = cfg.modality == lievio::Modality::RelativePosition ? "relpos"
                  : cfg.modality == lievio::Modality::StereoBearing ? "stereo"
                                                                    : "mono";
  j["noise"] = {{"gyro_std", cfg.noise.gyro_std},
                {"accel_std", cfg.noise.accel_std},
                {"bearing_std", cfg.noise.bearing_std},
                {"relpos_std", cfg.noise.relpos_std}};
  j["observer"] = {{"k_r", ocfg.k_r},     {"p0_v", ocfg.p0_v}, {"p0_g", ocfg.p0_g},
                   {"p0_l", ocfg.p0_l},   {"v_v", ocfg.v_v},   {"v_g", ocfg.v_g},
                   {"v_l", ocfg.v_l},     {"relpos_std", ocfg.relpos_std},
                   {"bearing_std_m", ocfg.bearing_std_m}, {"init_depth", ocfg.init_depth}};
  return j;
}

int cmd_simulate(const lievio::ScenarioConfig& cfg, const lievio::ObserverConfig& ocfg,
                 const CliOptions& opts) {
  const auto rig = lievio::SensorRig::euroc();
  const int runs = opts.runs > 0 ? opts.runs : 1;
  const fs::path dir = opts.out_dir.empty() ? fs::path("runs") / opts.name
                                            : fs::path(opts.out_dir);
  fs::create_directories(dir);

  const auto mc = lievio::run_monte_carlo(cfg, ocfg, rig, runs);
  {
    std::ofstream f(dir / "rmse.csv");
    lievio::write_rmse_csv(f, mc);
  }
  {
    const auto r = lievio::run_single(cfg, ocfg, rig, cfg.seed);
    std::ofstream ft(dir / "truth.csv");
    lievio::write_traj_csv(ft, r.t, r.truth_p, r.truth_q);
    std::ofstream fe(dir / "estimate.csv");
    lievio::write_traj_csv(fe, r.t, r.est_p, r.est_q);
  }
  {
    const auto reports = lievio::scenario_gramians(cfg, rig, opts.delta);
    std::ofstream fg(dir / "gramian.csv");
    lievio::write_gramian_csv(fg, reports);
  }
  std::cout << "simulate: " << runs << " run(s), final RMSE pos "
            << mc.rmse_pos_m.back() << " m, vel " << mc.rmse_vel_mps.back()
            << " m/s, att " << mc.rmse_att_deg.back() << " deg -> " << dir.string()
            << std::endl;
  return 0;
}

int cmd_euroc(const lievio::ScenarioConfig& cfg, const lievio::ObserverConfig& ocfg,
              const CliOptions& opts) {
  if (opts.dataset_path.empty()) {
    throw lievio::DegenerateInput("euroc: dataset path required (--dataset or config)");
  }
  const auto rig = lievio::SensorRig::euroc();
  const auto records = lievio::load_euroc(opts.dataset_path);
  const auto res = lievio::run_euroc(records, cfg, ocfg, rig);

  const fs::path dir = opts.out_dir.empty() ? fs::path("results") : fs::path(opts.out_dir);
  fs::create_directories(dir);
  json out;
  out["sequence"] = res.sequence_name;
  out["rms_position"] = res.rms_position;
  out["runtime_seconds"] = res.runtime_seconds;
  out["config"] = config_echo(cfg, ocfg);
  std::ofstream f(dir / (res.sequence_name + ".json"));
  f << out.dump(2) << '\n';
  std::cout << "euroc: " << res.sequence_name << " aligned RMS position "
            << res.rms_position << " m" << std::endl;
  return 0;
}

int cmd_observability(const lievio::ScenarioConfig& cfg, const CliOptions& opts) {
  const auto rig = lievio::SensorRig::euroc();
  const auto reports = lievio::scenario_gramians(cfg, rig, opts.delta, opts.stationary);
  const fs::path dir = opts.out_dir.empty() ? fs::path("runs") / opts.name
                                            : fs::path(opts.out_dir);
  fs::create_directories(dir);
  std::ofstream f(dir / "gramian.csv");
  lievio::write_gramian_csv(f, reports);
  double min_eig = reports.empty() ? 0.0 : reports.front().min_eig;
  for (const auto& r : reports) min_eig = std::min(min_eig, r.min_eig);
  std::cout << "observability: " << reports.size() << " window(s), min Gramian eig "
            << min_eig << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  // LIE_VIO_THREADS caps internal linear-algebra parallelism.
  if (const char* env = std::getenv("LIE_VIO_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) Eigen::setNbThreads(cap);
  }

  CLI::App app{"Geometric visual-inertial observer toolkit"};
  app.require_subcommand(1);
  CliOptions opts;
  lievio::ScenarioConfig cfg = lievio::default_scenario();
  lievio::ObserverConfig ocfg;

  std::string modality_flag;
  long long seed_flag = -1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "JSON config file");
    sub->add_option("--seed", seed_flag, "RNG seed override");
    sub->add_option("--modality", modality_flag, "relpos|stereo|mono");
    sub->add_option("--out", opts.out_dir, "output directory");
  };

  CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo simulation");
  add_common(sim);
  sim->add_option("--runs", opts.runs, "number of Monte Carlo runs");

  CLI::App* eur = app.add_subcommand("euroc", "EuRoC-format dataset evaluation");
  add_common(eur);
  eur->add_option("--dataset", opts.dataset_path, "EuRoC ASL directory (mav0/...)");

  CLI::App* obs = app.add_subcommand("observability", "Gramian window analysis");
  add_common(obs);
  obs->add_flag("--stationary", opts.stationary, "freeze the platform at t = 0");
  obs->add_option("--delta", opts.delta, "Gramian window length [s]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    std::string dataset_flag = opts.dataset_path;  // flag beats config
    if (!opts.config_path.empty()) load_config(opts.config_path, cfg, ocfg, opts);
    if (!dataset_flag.empty()) opts.dataset_path = dataset_flag;
    if (seed_flag >= 0) cfg.seed = static_cast<uint64_t>(seed_flag);
    if (!modality_flag.empty()) cfg.modality = parse_modality(modality_flag);

    if (sim->parsed()) return cmd_simulate(cfg, ocfg, opts);
    if (eur->parsed()) return cmd_euroc(cfg, ocfg, opts);
    if (obs->parsed()) return cmd_observability(cfg, opts);
  } catch (const lievio::ParseError& e) {
    std::cerr << "error [config/parse]: " << e.what() << std::endl;
    return 2;
  } catch (const lievio::DegenerateInput& e) {
    std::cerr << "error [input]: " << e.what() << std::endl;
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 1;
}
