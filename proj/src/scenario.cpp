#include "aia/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "aia/rng.hpp"
#include "json.hpp"

namespace aia {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kDegToRad = std::numbers::pi / 180.0;

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw std::invalid_argument("scenario." + field + ": " + why);
}

Eigen::Vector2d parse_vec2(const Json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2) bad_field(field, "expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Eigen::Matrix2d parse_mat2(const Json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_array() || j[0].size() != 2 ||
      !j[1].is_array() || j[1].size() != 2) {
    bad_field(field, "expected 2x2 row-major array");
  }
  Eigen::Matrix2d m;
  m << j[0][0].get<double>(), j[0][1].get<double>(), j[1][0].get<double>(), j[1][1].get<double>();
  return m;
}

Json emit_vec2(const Eigen::Vector2d& v) { return Json::array({v.x(), v.y()}); }

Json emit_mat2(const Eigen::Matrix2d& m) {
  return Json::array({Json::array({m(0, 0), m(0, 1)}), Json::array({m(1, 0), m(1, 1)})});
}

bool psd_check(const Eigen::Matrix2d& m) {
  if (std::abs(m(0, 1) - m(1, 0)) > 1e-12) return false;
  return m(0, 0) >= 0.0 && m.determinant() >= -1e-15;
}

int line_of_offset(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

}  // namespace

Pose RobotStart::pose() const { return Pose{x, y, wrap_angle(theta_deg * kDegToRad)}; }

Workspace Scenario::make_workspace() const {
  return Workspace(width, height, obstacles, grid_resolution);
}

std::vector<double> Scenario::effective_turn_rates_deg() const {
  if (!turn_rates_deg.empty()) return turn_rates_deg;
  std::vector<double> rates;
  for (int d = 0; d < 360; d += 5) rates.push_back(static_cast<double>(d));
  return rates;
}

std::vector<ControlInput> Scenario::control_set() const {
  std::vector<ControlInput> controls;
  auto rates = effective_turn_rates_deg();
  controls.reserve(speeds.size() * rates.size());
  for (double v : speeds) {
    for (double r : rates) controls.push_back(ControlInput{v, r * kDegToRad});
  }
  return controls;
}

std::vector<Pose> Scenario::initial_poses() const {
  std::vector<Pose> poses;
  poses.reserve(robots.size());
  for (const auto& r : robots) poses.push_back(r.pose());
  return poses;
}

Scenario parse_scenario(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::ostringstream msg;
    msg << "scenario parse error at line " << line_of_offset(text, e.byte) << ": " << e.what();
    throw std::runtime_error(msg.str());
  }

  Scenario sc;
  if (j.contains("workspace")) {
    const auto& w = j["workspace"];
    sc.width = w.value("width", sc.width);
    sc.height = w.value("height", sc.height);
    sc.grid_resolution = w.value("grid_resolution", sc.grid_resolution);
    if (w.contains("obstacles")) {
      for (const auto& o : w["obstacles"]) {
        sc.obstacles.push_back(Rect{o.at("x_min").get<double>(), o.at("y_min").get<double>(),
                                    o.at("x_max").get<double>(), o.at("y_max").get<double>()});
      }
    }
  }
  if (!(sc.width > 0.0) || !(sc.height > 0.0)) bad_field("workspace", "dimensions must be positive");
  if (!(sc.grid_resolution > 0.0) || sc.grid_resolution > std::min(sc.width, sc.height) / 4.0) {
    bad_field("workspace.grid_resolution", "must be positive and at most min(width,height)/4");
  }
  for (std::size_t k = 0; k < sc.obstacles.size(); ++k) {
    const Rect& r = sc.obstacles[k];
    if (!(r.x_max > r.x_min) || !(r.y_max > r.y_min) || r.x_min < 0.0 || r.y_min < 0.0 ||
        r.x_max > sc.width || r.y_max > sc.height) {
      bad_field("workspace.obstacles[" + std::to_string(k) + "]",
                "must have positive area and lie within bounds");
    }
  }

  if (!j.contains("robots") || !j["robots"].is_array() || j["robots"].empty()) {
    bad_field("robots", "at least one robot required");
  }
  for (const auto& r : j["robots"]) {
    RobotStart rs;
    rs.x = r.at("x").get<double>();
    rs.y = r.at("y").get<double>();
    rs.theta_deg = r.value("theta_deg", 0.0);
    sc.robots.push_back(rs);
  }

  if (!j.contains("landmarks") || !j["landmarks"].is_array() || j["landmarks"].empty()) {
    bad_field("landmarks", "at least one landmark required");
  }
  int lm_index = 0;
  for (const auto& l : j["landmarks"]) {
    std::string fld = "landmarks[" + std::to_string(lm_index) + "]";
    LandmarkSpec spec;
    spec.true_position = parse_vec2(l.at("true_position"), fld + ".true_position");
    spec.prior_mean = l.contains("prior_mean") ? parse_vec2(l["prior_mean"], fld + ".prior_mean")
                                               : spec.true_position;
    spec.prior_cov = parse_mat2(l.at("prior_cov"), fld + ".prior_cov");
    if (!psd_check(spec.prior_cov)) bad_field(fld + ".prior_cov", "must be symmetric PSD");
    if (l.contains("dynamics")) {
      const auto& d = l["dynamics"];
      spec.dynamics.A = parse_mat2(d.at("A"), fld + ".dynamics.A");
      if (d.contains("B")) spec.dynamics.B = parse_mat2(d["B"], fld + ".dynamics.B");
      if (d.contains("Q")) {
        spec.dynamics.Q = parse_mat2(d["Q"], fld + ".dynamics.Q");
        if (!psd_check(spec.dynamics.Q)) bad_field(fld + ".dynamics.Q", "must be symmetric PSD");
      }
      if (d.contains("inputs")) {
        for (const auto& a : d["inputs"]) {
          spec.dynamics.input_sequence.push_back(parse_vec2(a, fld + ".dynamics.inputs"));
        }
      }
    }
    sc.landmarks.push_back(std::move(spec));
    ++lm_index;
  }

  if (j.contains("sensor")) {
    const auto& s = j["sensor"];
    sc.sensor.range = s.value("range", sc.sensor.range);
    sc.sensor.noise_slope = s.value("noise_slope", sc.sensor.noise_slope);
    sc.sensor.noise_floor = s.value("noise_floor", sc.sensor.noise_floor);
  }
  if (!(sc.sensor.range > 0.0)) bad_field("sensor.range", "must be positive");
  if (sc.sensor.noise_slope < 0.0) bad_field("sensor.noise_slope", "must be non-negative");
  if (!(sc.sensor.noise_floor > 0.0)) bad_field("sensor.noise_floor", "must be positive");

  if (j.contains("motion")) {
    const auto& m = j["motion"];
    if (m.contains("speeds")) sc.speeds = m["speeds"].get<std::vector<double>>();
    if (m.contains("turn_rates_deg")) {
      sc.turn_rates_deg = m["turn_rates_deg"].get<std::vector<double>>();
    }
  }
  if (sc.speeds.empty()) bad_field("motion.speeds", "must be non-empty");
  for (double v : sc.speeds) {
    if (v < 0.0) bad_field("motion.speeds", "speeds must be non-negative");
  }

  sc.delta = j.value("delta", sc.delta);
  if (!(sc.delta > 0.0)) bad_field("delta", "must be positive");
  sc.comm_period = j.value("comm_period", sc.comm_period);
  if (sc.comm_period < 1) bad_field("comm_period", "must be at least 1");

  if (j.contains("mode")) {
    std::string m = j["mode"].get<std::string>();
    if (m == "online") {
      sc.mode = Mode::Online;
    } else if (m == "offline") {
      sc.mode = Mode::Offline;
    } else {
      bad_field("mode", "expected \"online\" or \"offline\"");
    }
  }

  if (j.contains("planner")) {
    const auto& p = j["planner"];
    sc.planner.p_v = p.value("p_v", sc.planner.p_v);
    sc.planner.p_u = p.value("p_u", sc.planner.p_u);
    sc.planner.n_max = p.value("n_max", sc.planner.n_max);
    sc.planner.stop_at_first_goal = p.value("stop_at_first_goal", sc.planner.stop_at_first_goal);
    sc.planner.node_budget = p.value("node_budget", sc.planner.node_budget);
    if (p.contains("goal_mode")) {
      std::string g = p["goal_mode"].get<std::string>();
      if (g == "any") {
        sc.planner.goal_mode = GoalMode::AnyOfScope;
      } else if (g == "all") {
        sc.planner.goal_mode = GoalMode::AllOfScope;
      } else {
        bad_field("planner.goal_mode", "expected \"any\" or \"all\"");
      }
    }
  }
  if (sc.planner.p_v < 0.0 || sc.planner.p_v > 1.0) bad_field("planner.p_v", "must be in [0,1]");
  if (sc.planner.p_u < 0.0 || sc.planner.p_u > 1.0) bad_field("planner.p_u", "must be in [0,1]");
  if (sc.planner.n_max < 0) bad_field("planner.n_max", "must be non-negative");
  sc.planner.delta = sc.delta;

  sc.seed = j.value("seed", sc.seed);
  sc.step_cap = j.value("step_cap", sc.step_cap);
  if (sc.step_cap < 1) bad_field("step_cap", "must be at least 1");

  // Placement sanity: starts must be in free space.
  Workspace ws = sc.make_workspace();
  for (std::size_t k = 0; k < sc.robots.size(); ++k) {
    if (!ws.is_free(sc.robots[k].pose().position())) {
      bad_field("robots[" + std::to_string(k) + "]", "start pose not in free space");
    }
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string emit_scenario(const Scenario& sc) {
  Json j;
  Json w;
  w["width"] = sc.width;
  w["height"] = sc.height;
  w["grid_resolution"] = sc.grid_resolution;
  if (!sc.obstacles.empty()) {
    Json obs = Json::array();
    for (const Rect& r : sc.obstacles) {
      obs.push_back({{"x_min", r.x_min}, {"y_min", r.y_min}, {"x_max", r.x_max}, {"y_max", r.y_max}});
    }
    w["obstacles"] = obs;
  }
  j["workspace"] = w;

  Json robots = Json::array();
  for (const auto& r : sc.robots) {
    robots.push_back({{"x", r.x}, {"y", r.y}, {"theta_deg", r.theta_deg}});
  }
  j["robots"] = robots;

  Json landmarks = Json::array();
  for (const auto& l : sc.landmarks) {
    Json lm;
    lm["true_position"] = emit_vec2(l.true_position);
    lm["prior_mean"] = emit_vec2(l.prior_mean);
    lm["prior_cov"] = emit_mat2(l.prior_cov);
    if (!l.dynamics.is_static()) {
      Json d;
      d["A"] = emit_mat2(l.dynamics.A);
      d["B"] = emit_mat2(l.dynamics.B);
      d["Q"] = emit_mat2(l.dynamics.Q);
      if (!l.dynamics.input_sequence.empty()) {
        Json inputs = Json::array();
        for (const auto& a : l.dynamics.input_sequence) inputs.push_back(emit_vec2(a));
        d["inputs"] = inputs;
      }
      lm["dynamics"] = d;
    }
    landmarks.push_back(lm);
  }
  j["landmarks"] = landmarks;

  j["sensor"] = {{"range", sc.sensor.range},
                 {"noise_slope", sc.sensor.noise_slope},
                 {"noise_floor", sc.sensor.noise_floor}};
  j["motion"] = {{"speeds", sc.speeds}, {"turn_rates_deg", sc.effective_turn_rates_deg()}};
  j["delta"] = sc.delta;
  j["comm_period"] = sc.comm_period;
  j["mode"] = sc.mode == Mode::Online ? "online" : "offline";
  j["planner"] = {{"p_v", sc.planner.p_v},
                  {"p_u", sc.planner.p_u},
                  {"n_max", sc.planner.n_max},
                  {"goal_mode", sc.planner.goal_mode == GoalMode::AllOfScope ? "all" : "any"},
                  {"stop_at_first_goal", sc.planner.stop_at_first_goal},
                  {"node_budget", sc.planner.node_budget}};
  j["seed"] = sc.seed;
  j["step_cap"] = sc.step_cap;
  return j.dump(2);
}

bool operator==(const Scenario& a, const Scenario& b) {
  auto rect_eq = [](const Rect& x, const Rect& y) {
    return x.x_min == y.x_min && x.y_min == y.y_min && x.x_max == y.x_max && x.y_max == y.y_max;
  };
  if (a.width != b.width || a.height != b.height || a.grid_resolution != b.grid_resolution ||
      a.obstacles.size() != b.obstacles.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.obstacles.size(); ++i) {
    if (!rect_eq(a.obstacles[i], b.obstacles[i])) return false;
  }
  if (a.robots.size() != b.robots.size() || a.landmarks.size() != b.landmarks.size()) return false;
  for (std::size_t i = 0; i < a.robots.size(); ++i) {
    if (a.robots[i].x != b.robots[i].x || a.robots[i].y != b.robots[i].y ||
        a.robots[i].theta_deg != b.robots[i].theta_deg) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.landmarks.size(); ++i) {
    const auto& x = a.landmarks[i];
    const auto& y = b.landmarks[i];
    if (x.true_position != y.true_position || x.prior_mean != y.prior_mean ||
        x.prior_cov != y.prior_cov || x.dynamics.A != y.dynamics.A ||
        x.dynamics.B != y.dynamics.B || x.dynamics.Q != y.dynamics.Q ||
        x.dynamics.input_sequence.size() != y.dynamics.input_sequence.size()) {
      return false;
    }
    for (std::size_t k = 0; k < x.dynamics.input_sequence.size(); ++k) {
      if (x.dynamics.input_sequence[k] != y.dynamics.input_sequence[k]) return false;
    }
  }
  return a.sensor.range == b.sensor.range && a.sensor.noise_slope == b.sensor.noise_slope &&
         a.sensor.noise_floor == b.sensor.noise_floor && a.speeds == b.speeds &&
         a.effective_turn_rates_deg() == b.effective_turn_rates_deg() && a.delta == b.delta &&
         a.comm_period == b.comm_period && a.mode == b.mode &&
         a.planner.p_v == b.planner.p_v && a.planner.p_u == b.planner.p_u &&
         a.planner.n_max == b.planner.n_max && a.planner.goal_mode == b.planner.goal_mode &&
         a.planner.stop_at_first_goal == b.planner.stop_at_first_goal &&
         a.planner.node_budget == b.planner.node_budget && a.seed == b.seed &&
         a.step_cap == b.step_cap;
}

double halton(std::uint64_t index, std::uint64_t base) {
  double f = 1.0;
  double r = 0.0;
  while (index > 0) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

Scenario make_generated_scenario(const Scenario& base, Deployment deployment, int n_robots,
                                 int m_landmarks, std::uint64_t seed) {
  if (n_robots < 1) throw std::invalid_argument("scenario.robots: at least one robot required");
  if (m_landmarks < 1) {
    throw std::invalid_argument("scenario.landmarks: at least one landmark required");
  }
  Scenario sc = base;
  sc.seed = seed;
  sc.robots.clear();
  sc.landmarks.clear();
  Workspace ws = sc.make_workspace();

  if (deployment == Deployment::CornerCluster) {
    const double spacing = 0.3;
    const int per_row = 4;
    for (int k = 0; k < n_robots; ++k) {
      RobotStart r;
      r.x = 0.5 + spacing * (k % per_row);
      r.y = 0.5 + spacing * (k / per_row);
      r.theta_deg = 0.0;
      sc.robots.push_back(r);
    }
  } else {
    int g = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_robots))));
    for (int k = 0; k < n_robots; ++k) {
      RobotStart r;
      r.x = sc.width * ((k % g) + 0.5) / g;
      r.y = sc.height * ((k / g) + 0.5) / g;
      r.theta_deg = 0.0;
      sc.robots.push_back(r);
    }
  }
  for (std::size_t k = 0; k < sc.robots.size(); ++k) {
    if (!ws.is_free(sc.robots[k].pose().position())) {
      throw std::invalid_argument("scenario.robots[" + std::to_string(k) +
                                  "]: generated start not in free space");
    }
  }

  // Quasi-random placement: Halton stream entered at a seed-derived offset,
  // rejecting occupied points. Prior means get a seeded offset so the
  // estimator does not start on the truth.
  const double margin = 0.5;
  std::uint64_t idx = 1 + mix_seed(seed, 0x706c6163) % 65536;
  Rng prior_rng(mix_seed(seed, 0x7072696f));
  int placed = 0;
  std::uint64_t guard = 0;
  while (placed < m_landmarks) {
    if (++guard > 1000000) throw std::runtime_error("landmark placement failed");
    Eigen::Vector2d p{margin + halton(idx, 2) * (sc.width - 2.0 * margin),
                      margin + halton(idx, 3) * (sc.height - 2.0 * margin)};
    ++idx;
    if (!ws.is_free(p)) continue;
    LandmarkSpec spec;
    spec.true_position = p;
    spec.prior_cov = 0.04 * Eigen::Matrix2d::Identity();
    Eigen::Vector2d offset{0.2 * gaussian(prior_rng), 0.2 * gaussian(prior_rng)};
    spec.prior_mean = p + offset;
    if (!ws.is_free(spec.prior_mean)) spec.prior_mean = p;
    sc.landmarks.push_back(std::move(spec));
    ++placed;
  }
  return sc;
}

}  // namespace aia
