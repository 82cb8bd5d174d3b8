#include "risradar/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace risradar {

namespace {

using nlohmann::json;

void requireObject(const json &j, const std::string &where) {
  if (!j.is_object()) {
    throw ConfigError(where + ": expected a JSON object");
  }
}

void rejectUnknown(const json &j, const std::set<std::string> &known,
                   const std::string &where) {
  for (const auto &item : j.items()) {
    if (!known.count(item.key())) {
      throw ConfigError(where + ": unknown key '" + item.key() + "'");
    }
  }
}

template <typename T>
void read(const json &j, const char *key, T &out, const std::string &where) {
  if (!j.contains(key)) {
    return;
  }
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception &) {
    throw ConfigError(where + ": key '" + key + "' has the wrong type");
  }
}

json parseJson(const std::string &text, const std::string &where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error &e) {
    throw ConfigError(where + ": invalid JSON (" + e.what() + ")");
  }
}

ChannelParams channelFromJson(const json &j, ChannelParams channel,
                              double ris_offset_deg) {
  const std::string where = "scene.channel";
  requireObject(j, where);
  rejectUnknown(j,
                {"ref_loss_db", "ref_distance", "distance", "path_exponent",
                 "rician_k", "los_departure_deg", "los_arrival_deg", "seed"},
                where);
  double ref_loss_db = linearToDb(channel.ref_loss);
  read(j, "ref_loss_db", ref_loss_db, where);
  channel.ref_loss = dbToLinear(ref_loss_db);
  read(j, "ref_distance", channel.ref_distance, where);
  read(j, "distance", channel.distance, where);
  read(j, "path_exponent", channel.path_exponent, where);
  read(j, "rician_k", channel.rician_k, where);
  channel.los_departure_deg = ris_offset_deg;
  read(j, "los_departure_deg", channel.los_departure_deg, where);
  read(j, "los_arrival_deg", channel.los_arrival_deg, where);
  read(j, "seed", channel.seed, where);
  return channel;
}

Scene sceneFromJson(const json &j) {
  const std::string where = "scene";
  requireObject(j, where);
  rejectUnknown(j,
                {"n_radar", "m_ris", "spacing_radar", "spacing_ris",
                 "target_angle_deg", "snr_db", "noise_power_db",
                 "ris_offset_deg", "interference_count", "inr_db",
                 "interferences", "channel"},
                where);
  Scene scene = defaultScene();
  read(j, "n_radar", scene.geometry.n_radar, where);
  read(j, "m_ris", scene.geometry.m_ris, where);
  read(j, "spacing_radar", scene.geometry.spacing_radar, where);
  read(j, "spacing_ris", scene.geometry.spacing_ris, where);
  read(j, "target_angle_deg", scene.target_angle_deg, where);
  read(j, "ris_offset_deg", scene.ris_offset_deg, where);

  double noise_db = 0.0;
  double snr_db = 10.0;
  double inr_db = 30.0;
  read(j, "noise_power_db", noise_db, where);
  read(j, "snr_db", snr_db, where);
  read(j, "inr_db", inr_db, where);
  scene.noise_power = dbToLinear(noise_db);
  scene.target_power = scene.noise_power * dbToLinear(snr_db);

  if (j.contains("interferences") && j.contains("interference_count")) {
    throw ConfigError(
        "scene: give either 'interferences' or 'interference_count'");
  }
  scene.interferences.clear();
  if (j.contains("interferences")) {
    const json &list = j.at("interferences");
    if (!list.is_array()) {
      throw ConfigError("scene.interferences: expected an array");
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string item = "scene.interferences[" + std::to_string(i) + "]";
      requireObject(list[i], item);
      rejectUnknown(list[i], {"angle_deg", "inr_db"}, item);
      if (!list[i].contains("angle_deg")) {
        throw ConfigError(item + ": missing 'angle_deg'");
      }
      Interference itf;
      double db = inr_db;
      read(list[i], "angle_deg", itf.angle_deg, item);
      read(list[i], "inr_db", db, item);
      itf.power = scene.noise_power * dbToLinear(db);
      scene.interferences.push_back(itf);
    }
  } else {
    int count = 5;
    read(j, "interference_count", count, where);
    const auto &angles = referenceInterferenceAngles();
    if (count < 0 || count > static_cast<int>(angles.size())) {
      throw ConfigError("scene: interference_count must be in 0..15");
    }
    for (int i = 0; i < count; ++i) {
      scene.interferences.push_back(
          {angles[i], scene.noise_power * dbToLinear(inr_db)});
    }
  }

  ChannelParams channel = scene.channel;
  channel.los_departure_deg = scene.ris_offset_deg;
  scene.channel = j.contains("channel")
                      ? channelFromJson(j.at("channel"), channel,
                                        scene.ris_offset_deg)
                      : channel;
  scene.validate();
  return scene;
}

CodesignConfig codesignFromJson(const json &j, CodesignConfig cfg) {
  const std::string where = "codesign";
  requireObject(j, where);
  rejectUnknown(j,
                {"delta2", "delta3", "p_max", "dinkelbach_max", "tol_f",
                 "max_iter", "mu_margin", "mu_policy", "init", "init_seed"},
                where);
  read(j, "delta2", cfg.delta2, where);
  read(j, "delta3", cfg.delta3, where);
  read(j, "p_max", cfg.p_max, where);
  read(j, "dinkelbach_max", cfg.dinkelbach_max, where);
  read(j, "tol_f", cfg.rnm.tol_f, where);
  read(j, "max_iter", cfg.rnm.max_iter, where);
  read(j, "mu_margin", cfg.rnm.mu_margin, where);
  std::string policy = toString(cfg.rnm.mu_policy);
  read(j, "mu_policy", policy, where);
  cfg.rnm.mu_policy = parseMuPolicy(policy);
  std::string init = cfg.init == InitPolicy::Random ? "random" : "matched";
  read(j, "init", init, where);
  if (init == "matched") {
    cfg.init = InitPolicy::Matched;
  } else if (init == "random") {
    cfg.init = InitPolicy::Random;
  } else {
    throw ConfigError("codesign.init: expected 'matched' or 'random'");
  }
  read(j, "init_seed", cfg.init_seed, where);
  cfg.validate();
  return cfg;
}

} // namespace

std::string readFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot read '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Scene parseScene(const std::string &text) {
  return sceneFromJson(parseJson(text, "scene"));
}

Scene loadScene(const std::string &path) {
  try {
    return parseScene(readFile(path));
  } catch (const ConfigError &e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string sceneToJson(const Scene &scene) {
  nlohmann::ordered_json j;
  j["n_radar"] = scene.geometry.n_radar;
  j["m_ris"] = scene.geometry.m_ris;
  j["spacing_radar"] = scene.geometry.spacing_radar;
  j["spacing_ris"] = scene.geometry.spacing_ris;
  j["target_angle_deg"] = scene.target_angle_deg;
  j["noise_power_db"] = linearToDb(scene.noise_power);
  j["snr_db"] = linearToDb(scene.target_power / scene.noise_power);
  j["ris_offset_deg"] = scene.ris_offset_deg;
  j["interferences"] = nlohmann::ordered_json::array();
  for (const auto &itf : scene.interferences) {
    nlohmann::ordered_json item;
    item["angle_deg"] = itf.angle_deg;
    item["inr_db"] = linearToDb(itf.power / scene.noise_power);
    j["interferences"].push_back(item);
  }
  nlohmann::ordered_json ch;
  ch["ref_loss_db"] = linearToDb(scene.channel.ref_loss);
  ch["ref_distance"] = scene.channel.ref_distance;
  ch["distance"] = scene.channel.distance;
  ch["path_exponent"] = scene.channel.path_exponent;
  ch["rician_k"] = scene.channel.rician_k;
  ch["los_departure_deg"] = scene.channel.los_departure_deg;
  ch["los_arrival_deg"] = scene.channel.los_arrival_deg;
  ch["seed"] = scene.channel.seed;
  j["channel"] = ch;
  return j.dump(2) + "\n";
}

ExperimentSpec parseExperimentSpec(const std::string &text) {
  const json j = parseJson(text, "experiment");
  const std::string where = "experiment";
  requireObject(j, where);
  rejectUnknown(j,
                {"scene", "sweep", "trials", "seed", "solver", "modes",
                 "threads", "codesign"},
                where);
  ExperimentSpec spec;
  if (j.contains("scene")) {
    spec.scene = sceneFromJson(j.at("scene"));
  }
  if (!j.contains("sweep")) {
    throw ConfigError("experiment: missing 'sweep'");
  }
  const json &sweep = j.at("sweep");
  requireObject(sweep, "experiment.sweep");
  rejectUnknown(sweep, {"variable", "values"}, "experiment.sweep");
  if (!sweep.contains("variable") || !sweep.contains("values")) {
    throw ConfigError("experiment.sweep: needs 'variable' and 'values'");
  }
  std::string variable;
  read(sweep, "variable", variable, "experiment.sweep");
  spec.variable = parseSweepVariable(variable);
  read(sweep, "values", spec.values, "experiment.sweep");

  read(j, "trials", spec.trials, where);
  read(j, "seed", spec.base_seed, where);
  read(j, "threads", spec.threads, where);
  if (j.contains("codesign")) {
    spec.codesign = codesignFromJson(j.at("codesign"), spec.codesign);
  }
  std::string solver = toString(spec.codesign.solver);
  read(j, "solver", solver, where);
  spec.codesign.solver = parseSolver(solver);
  if (j.contains("modes")) {
    std::vector<std::string> modes;
    read(j, "modes", modes, where);
    spec.modes.clear();
    for (const auto &m : modes) {
      spec.modes.push_back(parseMode(m));
    }
  }
  spec.validate();
  return spec;
}

ExperimentSpec loadExperimentSpec(const std::string &path) {
  try {
    return parseExperimentSpec(readFile(path));
  } catch (const ConfigError &e) {
    throw ConfigError(path + ": " + e.what());
  }
}

} // namespace risradar
