#include "fogalloc/config.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <type_traits>

namespace fogalloc {

using nlohmann::json;

namespace {

struct Source {
  std::string_view text;
  std::string name;

  // 1-based line and column of a byte offset.
  std::string at_offset(std::size_t offset) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    return name + ":" + std::to_string(line) + ":" + std::to_string(col);
  }

  // Position of the first occurrence of a quoted key; JSON carries no source
  // positions after parsing, so this is the best available anchor.
  std::string at_key(const std::string& key) const {
    const std::size_t pos = text.find("\"" + key + "\"");
    return pos == std::string_view::npos ? name : at_offset(pos);
  }

  [[noreturn]] void fail(const std::string& key, const std::string& path,
                         const std::string& msg) const {
    throw ConfigError(at_key(key) + ": " + path + ": " + msg);
  }
};

class Reader {
 public:
  Reader(const Source& src, const json* obj, std::string path)
      : src_(src), obj_(obj), path_(std::move(path)) {}

  template <typename T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!obj_ || !obj_->contains(key)) return;
    const json& v = (*obj_)[key];
    const std::string where = path_ + key;
    if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) src_.fail(key, where, "expected a string");
      out = v.get<std::string>();
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) src_.fail(key, where, "expected true or false");
      out = v.get<bool>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) src_.fail(key, where, "expected a number");
      out = v.get<T>();
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!v.is_number_unsigned()) src_.fail(key, where, "expected a nonnegative integer");
      out = v.get<T>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) src_.fail(key, where, "expected an integer");
      out = v.get<T>();
    } else {
      using E = typename T::value_type;
      if (!v.is_array()) src_.fail(key, where, "expected an array");
      T items;
      for (const auto& item : v) {
        if constexpr (std::is_unsigned_v<E>) {
          if (!item.is_number_unsigned()) src_.fail(key, where, "expected nonnegative integers");
        } else {
          if (!item.is_number()) src_.fail(key, where, "expected numbers");
        }
        items.push_back(item.get<E>());
      }
      out = std::move(items);
    }
  }

  Reader section(const std::string& key) {
    seen_.insert(key);
    if (!obj_ || !obj_->contains(key)) return Reader(src_, nullptr, path_ + key + ".");
    const json& v = (*obj_)[key];
    if (!v.is_object()) src_.fail(key, path_ + key, "expected an object");
    return Reader(src_, &v, path_ + key + ".");
  }

  void finish() const {
    if (!obj_) return;
    for (const auto& item : obj_->items()) {
      if (!seen_.count(item.key())) src_.fail(item.key(), path_ + item.key(), "unknown key");
    }
  }

 private:
  const Source& src_;
  const json* obj_;
  std::string path_;
  std::set<std::string> seen_;
};

std::vector<Method> methods_for(std::string_view name) {
  if (name == "local") return {Method::local};
  if (name == "dc") return {Method::local, Method::dc};
  if (name == "two-step") return {Method::local, Method::two_step};
  return {Method::local, Method::dc, Method::two_step};
}

}  // namespace

void validate_method_name(std::string_view name) {
  if (name != "local" && name != "dc" && name != "two-step" && name != "both") {
    throw ConfigError("method must be one of local, dc, two-step, both; got '" +
                      std::string(name) + "'");
  }
}

void set_method(Config& c, std::string_view name) {
  validate_method_name(name);
  c.method = std::string(name);
  c.experiment.methods = methods_for(name);
}

Config parse_config(std::string_view text, std::string_view source) {
  Source src{text, std::string(source)};
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    const auto cut = msg.find(": ");
    if (cut != std::string::npos && msg.rfind("[json.exception", 0) == 0) msg = msg.substr(cut + 2);
    throw ConfigError(src.at_offset(e.byte > 0 ? e.byte - 1 : 0) + ": " + msg);
  }
  if (!root.is_object()) throw ConfigError(src.name + ":1:1: config must be a JSON object");

  Config c;
  ExperimentConfig& x = c.experiment;
  ScenarioConfig& sc = x.scenario;
  Reader top(src, &root, "");

  int version = kConfigSchemaVersion;
  top.get("schema_version", version);
  if (version != kConfigSchemaVersion) {
    src.fail("schema_version", "schema_version",
             "unsupported version " + std::to_string(version) + " (expected " +
                 std::to_string(kConfigSchemaVersion) + ")");
  }
  top.get("seed", x.seed);
  top.get("jobs", x.jobs);

  Reader task = top.section("task");
  task.get("t_max_s", sc.t_max_s);
  task.get("cycles_per_bit", sc.cycles_per_bit);
  task.get("bits_min", sc.b_min_bits);
  task.get("bits_max", sc.b_max_bits);
  task.finish();

  Reader radio = top.section("radio");
  radio.get("bandwidth_hz", sc.bandwidth_hz);
  radio.get("noise_dbm", sc.noise_dbm);
  radio.get("p_max_w", sc.p_max_w);
  radio.get("disk_radius_m", sc.disk_radius_m);
  radio.get("max_link_radius_m", sc.max_link_radius_m);
  radio.get("min_distance_m", sc.min_distance_m);
  radio.finish();

  Reader dev = top.section("devices");
  dev.get("num_offload", sc.num_offload);
  dev.get("kappa", sc.kappa);
  dev.get("f_min_hz", sc.f_min_hz);
  dev.get("f_max_hz", sc.f_max_hz);
  dev.get("f0_max_hz", sc.f0_max_hz);
  dev.get("throttle_lo", sc.throttle_lo);
  dev.get("throttle_hi", sc.throttle_hi);
  dev.finish();

  Reader method = top.section("method");
  method.get("name", c.method);
  method.get("gamma", x.gamma);
  Reader dc = method.section("dc");
  dc.get("lambda", x.dc.lambda);
  dc.get("epsilon", x.dc.epsilon);
  dc.get("k_max", x.dc.k_max);
  dc.finish();
  Reader ts = method.section("two_step");
  ts.get("alpha", x.two_step.alpha);
  ts.finish();
  method.finish();

  SolverOptions so;
  Reader solver = top.section("solver");
  solver.get("tol", so.tol);
  solver.get("feas_tol", so.feas_tol);
  solver.get("mu0", so.mu0);
  solver.get("mu_factor", so.mu_factor);
  solver.get("gap_tol", so.gap_tol);
  solver.get("newton_tol", so.newton_tol);
  solver.get("max_newton_iters", so.max_newton_iters);
  solver.get("ls_alpha", so.ls_alpha);
  solver.get("ls_beta", so.ls_beta);
  solver.get("fd_step", so.fd_step);
  solver.finish();
  x.dc.solver = so;
  x.two_step.solver = so;
  x.dc.gamma = x.gamma;
  x.two_step.gamma = x.gamma;

  Reader exp = top.section("experiment");
  exp.get("runs", x.runs);
  exp.get("j_values", x.j_values);
  exp.get("t_max_grid", x.t_max_grid);
  exp.get("f_max_grid", x.f_max_grid);
  exp.get("fmax_sweep_t_max", x.fmax_sweep_t_max);
  exp.get("runtime_f_max", x.runtime_f_max);
  exp.get("runtime_j_values", x.runtime_j_values);
  exp.get("runtime_t_max", x.runtime_t_max);
  exp.get("record_wall_time", x.record_wall_time);
  exp.finish();

  Reader out = top.section("output");
  out.get("csv", c.csv_path);
  out.get("summary", c.summary_path);
  out.finish();
  top.finish();

  try {
    validate_method_name(c.method);
  } catch (const ConfigError& e) {
    src.fail("name", "method.name", e.what());
  }
  x.methods = methods_for(c.method);
  try {
    x.validate();
    if (!(so.tol > 0.0 && so.feas_tol > 0.0 && so.mu0 > 0.0 && so.mu_factor > 1.0 &&
          so.gap_tol > 0.0 && so.newton_tol > 0.0 && so.max_newton_iters > 0 &&
          so.ls_alpha > 0.0 && so.ls_alpha < 0.5 && so.ls_beta > 0.0 && so.ls_beta < 1.0 &&
          so.fd_step > 0.0)) {
      throw std::invalid_argument("solver options out of range");
    }
    if (!(x.dc.lambda >= 0.0) || !(x.dc.epsilon > 0.0) || x.dc.k_max < 1) {
      throw std::invalid_argument("DC parameters out of range");
    }
    if (!(x.two_step.alpha > 0.0 && x.two_step.alpha < 1.0)) {
      throw std::invalid_argument("two_step.alpha must lie in (0, 1)");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(src.name + ": " + e.what());
  }
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string serialize_config(const Config& c) {
  const ExperimentConfig& x = c.experiment;
  const ScenarioConfig& sc = x.scenario;
  const SolverOptions& so = x.dc.solver;
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["seed"] = x.seed;
  j["jobs"] = x.jobs;
  j["task"] = {{"t_max_s", sc.t_max_s},
               {"cycles_per_bit", sc.cycles_per_bit},
               {"bits_min", sc.b_min_bits},
               {"bits_max", sc.b_max_bits}};
  j["radio"] = {{"bandwidth_hz", sc.bandwidth_hz},     {"noise_dbm", sc.noise_dbm},
                {"p_max_w", sc.p_max_w},               {"disk_radius_m", sc.disk_radius_m},
                {"max_link_radius_m", sc.max_link_radius_m},
                {"min_distance_m", sc.min_distance_m}};
  j["devices"] = {{"num_offload", sc.num_offload}, {"kappa", sc.kappa},
                  {"f_min_hz", sc.f_min_hz},       {"f_max_hz", sc.f_max_hz},
                  {"f0_max_hz", sc.f0_max_hz},     {"throttle_lo", sc.throttle_lo},
                  {"throttle_hi", sc.throttle_hi}};
  j["method"] = {{"name", c.method},
                 {"gamma", x.gamma},
                 {"dc", {{"lambda", x.dc.lambda}, {"epsilon", x.dc.epsilon}, {"k_max", x.dc.k_max}}},
                 {"two_step", {{"alpha", x.two_step.alpha}}}};
  j["solver"] = {{"tol", so.tol},
                 {"feas_tol", so.feas_tol},
                 {"mu0", so.mu0},
                 {"mu_factor", so.mu_factor},
                 {"gap_tol", so.gap_tol},
                 {"newton_tol", so.newton_tol},
                 {"max_newton_iters", so.max_newton_iters},
                 {"ls_alpha", so.ls_alpha},
                 {"ls_beta", so.ls_beta},
                 {"fd_step", so.fd_step}};
  j["experiment"] = {{"runs", x.runs},
                     {"j_values", x.j_values},
                     {"t_max_grid", x.t_max_grid},
                     {"f_max_grid", x.f_max_grid},
                     {"fmax_sweep_t_max", x.fmax_sweep_t_max},
                     {"runtime_f_max", x.runtime_f_max},
                     {"runtime_j_values", x.runtime_j_values},
                     {"runtime_t_max", x.runtime_t_max},
                     {"record_wall_time", x.record_wall_time}};
  j["output"] = {{"csv", c.csv_path}, {"summary", c.summary_path}};
  return j.dump(2) + "\n";
}

}  // namespace fogalloc
