#include "tei/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "tei/error.hpp"

namespace tei {

namespace {

void only_keys(const Json& j, std::initializer_list<const char*> keys, const char* where) {
  if (!j.is_object()) throw Error(ErrorCode::InputParse, std::string(where) + " must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw Error(ErrorCode::InputParse, std::string("unknown key '") + k + "' in " + where);
}

double number(const Json& j, const char* key, const char* where) {
  if (!j.contains(key)) throw Error(ErrorCode::InputParse, std::string("missing '") + key + "' in " + where);
  if (!j.at(key).is_number()) throw Error(ErrorCode::InputParse, std::string("'") + key + "' in " + where + " must be a number");
  return j.at(key).get<double>();
}

std::vector<double> number_array(const Json& j, const char* where) {
  if (!j.is_array()) throw Error(ErrorCode::InputParse, std::string(where) + " must be an array");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw Error(ErrorCode::InputParse, std::string(where) + " must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

double normal_density(double x, double mean, double sigma) {
  const double z = (x - mean) / sigma;
  return std::exp(-0.5 * z * z) / sigma;
}

ProbVector parse_measure(const Json& j, const FiniteMetricSpace& space, const char* where) {
  only_keys(j, {"gaussian", "mixture", "log_polynomial", "weights", "normalize", "uniform"}, where);
  const std::size_t n = space.n;
  auto need_points = [&] {
    if (space.points.size() != n) throw Error(ErrorCode::InputParse, std::string(where) + ": density forms need point coordinates");
  };
  if (j.contains("gaussian")) {
    need_points();
    const Json& g = j.at("gaussian");
    only_keys(g, {"mean", "sigma"}, "gaussian");
    const double sigma = number(g, "sigma", "gaussian");
    if (!(sigma > 0)) throw Error(ErrorCode::InvalidArgument, "sigma must be positive");
    return gaussian_on_grid(space.points, number(g, "mean", "gaussian"), sigma);
  }
  if (j.contains("mixture")) {
    need_points();
    const Json& m = j.at("mixture");
    if (!m.is_array() || m.empty()) throw Error(ErrorCode::InputParse, "mixture must be a nonempty array");
    std::vector<double> w(n, 0.0);
    for (const auto& c : m) {
      only_keys(c, {"weight", "mean", "sigma"}, "mixture component");
      const double wt = number(c, "weight", "mixture component");
      const double mean = number(c, "mean", "mixture component");
      const double sigma = number(c, "sigma", "mixture component");
      if (!(wt >= 0) || !(sigma > 0)) throw Error(ErrorCode::InvalidArgument, "mixture weights must be >= 0 and sigmas > 0");
      for (std::size_t i = 0; i < n; ++i) w[i] += wt * normal_density(space.points[i], mean, sigma);
    }
    return ProbVector::from_weights(std::move(w), true);
  }
  if (j.contains("log_polynomial")) {
    need_points();
    const std::vector<double> coef = number_array(j.at("log_polynomial"), "log_polynomial");
    std::vector<double> logw(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = coef.size(); k-- > 0;) logw[i] = logw[i] * space.points[i] + coef[k];
    const double top = *std::max_element(logw.begin(), logw.end());
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = std::exp(logw[i] - top);
    return ProbVector::from_weights(std::move(w), true);
  }
  if (j.contains("weights")) {
    std::vector<double> w = number_array(j.at("weights"), "weights");
    if (w.size() != n) throw Error(ErrorCode::DimensionMismatch, std::string(where) + " weights length differs from the space");
    bool normalize = false;
    if (j.contains("normalize")) {
      if (!j.at("normalize").is_boolean()) throw Error(ErrorCode::InputParse, "normalize must be a boolean");
      normalize = j.at("normalize").get<bool>();
    }
    return ProbVector::from_weights(std::move(w), normalize);
  }
  if (j.contains("uniform")) return ProbVector::uniform(n);
  throw Error(ErrorCode::InputParse, std::string(where) + " needs one of gaussian, mixture, weights, uniform");
}

}  // namespace

Instance parse_instance(const Json& j) {
  only_keys(j, {"name", "space", "mu", "nu", "cost"}, "instance");
  for (const char* k : {"space", "mu", "cost"})
    if (!j.contains(k)) throw Error(ErrorCode::InputParse, std::string("instance is missing '") + k + "'");
  Instance inst;
  if (j.contains("name")) {
    if (!j.at("name").is_string()) throw Error(ErrorCode::InputParse, "name must be a string");
    inst.name = j.at("name").get<std::string>();
  }
  const Json& s = j.at("space");
  only_keys(s, {"grid", "dist", "points"}, "space");
  if (s.contains("grid")) {
    const Json& g = s.at("grid");
    only_keys(g, {"a", "b", "n"}, "grid");
    const double n = number(g, "n", "grid");
    if (!(n >= 2) || n != std::floor(n)) throw Error(ErrorCode::InvalidArgument, "grid n must be an integer >= 2");
    inst.space = grid_space(number(g, "a", "grid"), number(g, "b", "grid"), static_cast<std::size_t>(n));
    inst.grid = true;
  } else if (s.contains("dist")) {
    const Json& d = s.at("dist");
    if (!d.is_array()) throw Error(ErrorCode::InputParse, "dist must be an array of rows");
    std::vector<std::vector<double>> rows;
    for (const auto& r : d) rows.push_back(number_array(r, "dist row"));
    std::vector<double> points;
    if (s.contains("points")) points = number_array(s.at("points"), "points");
    Matrix m;
    try {
      m = Matrix::from_rows(rows);
    } catch (const Error& e) {
      throw Error(ErrorCode::InputParse, e.what());
    }
    inst.space = validate_space(m, std::move(points));
  } else {
    throw Error(ErrorCode::InputParse, "space needs grid or dist");
  }
  inst.mu = parse_measure(j.at("mu"), inst.space, "mu");
  if (j.contains("nu")) inst.nu = parse_measure(j.at("nu"), inst.space, "nu");
  const Json& c = j.at("cost");
  only_keys(c, {"profile", "p", "truncate"}, "cost");
  if (!c.contains("profile") || !c.at("profile").is_string()) throw Error(ErrorCode::InputParse, "cost.profile must be a string");
  const std::string prof = c.at("profile").get<std::string>();
  if (prof == "square") inst.profile = CostProfile::square();
  else if (prof == "power") inst.profile = CostProfile::power(number(c, "p", "cost"));
  else if (prof == "linear_plus_square") inst.profile = CostProfile::linear_plus_square();
  else throw Error(ErrorCode::InputParse, "unknown cost profile '" + prof + "'");
  if (c.contains("truncate")) inst.truncate = number(c, "truncate", "cost");
  return inst;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InputParse, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InputParse, path.string() + ": " + e.what());
  }
}

Instance load_instance(const std::filesystem::path& path) {
  Instance inst = parse_instance(read_json(path));
  if (inst.name.empty()) inst.name = path.stem().string();
  return inst;
}

Json instance_summary(const Instance& inst) {
  Json j;
  j["name"] = inst.name;
  j["n"] = inst.space.n;
  j["grid"] = inst.grid;
  j["cost_profile"] = inst.profile.name();
  if (inst.truncate) j["truncate"] = *inst.truncate;
  j["mu_support"] = inst.mu.support.size();
  return j;
}

Json to_json(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  j["instance"] = c.instance;
  j["output_dir"] = c.output_dir;
  j["seed"] = c.seed;
  j["a"] = c.a;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["alpha_q"] = c.alpha_q;
  j["beta_q"] = c.beta_q;
  j["slack"] = c.slack ? Json(*c.slack) : Json(nullptr);
  j["method"] = c.method;
  j["multistarts"] = c.multistarts;
  j["max_iter"] = c.max_iter;
  j["levels"] = c.levels;
  j["slope"] = c.slope;
  j["slope_radius"] = c.slope_radius;
  j["margin"] = c.margin;
  j["bracket_tol"] = c.bracket_tol;
  j["probes"] = c.probes;
  j["lambda_o"] = c.lambda_o;
  j["semiconcave_samples"] = c.semiconcave_samples;
  j["concentration_a"] = c.concentration_a ? Json(*c.concentration_a) : Json(nullptr);
  j["concentration_b"] = c.concentration_b ? Json(*c.concentration_b) : Json(nullptr);
  j["dual_tol"] = c.dual_tol;
  j["ma_stencil"] = c.ma_stencil;
  return j;
}

RunConfig config_from_json(const Json& j, RunConfig c) {
  if (!j.is_object()) throw Error(ErrorCode::InputParse, "config must be an object");
  auto str = [](const Json& v, const std::string& k) {
    if (!v.is_string()) throw Error(ErrorCode::InputParse, "config '" + k + "' must be a string");
    return v.get<std::string>();
  };
  auto num = [](const Json& v, const std::string& k) {
    if (!v.is_number()) throw Error(ErrorCode::InputParse, "config '" + k + "' must be a number");
    return v.get<double>();
  };
  auto count = [](const Json& v, const std::string& k) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) throw Error(ErrorCode::InputParse, "config '" + k + "' must be a nonnegative integer");
    return v.get<std::uint64_t>();
  };
  auto opt_num = [&](const Json& v, const std::string& k) -> std::optional<double> {
    if (v.is_null()) return std::nullopt;
    return num(v, k);
  };
  for (const auto& [k, v] : j.items()) {
    if (k == "command") c.command = str(v, k);
    else if (k == "instance") c.instance = str(v, k);
    else if (k == "output_dir") c.output_dir = str(v, k);
    else if (k == "seed") c.seed = count(v, k);
    else if (k == "a") c.a = num(v, k);
    else if (k == "alpha") c.alpha = str(v, k);
    else if (k == "beta") c.beta = str(v, k);
    else if (k == "alpha_q") c.alpha_q = num(v, k);
    else if (k == "beta_q") c.beta_q = num(v, k);
    else if (k == "slack") c.slack = opt_num(v, k);
    else if (k == "method") c.method = str(v, k);
    else if (k == "multistarts") c.multistarts = count(v, k);
    else if (k == "max_iter") c.max_iter = count(v, k);
    else if (k == "levels") c.levels = number_array(v, "levels");
    else if (k == "slope") c.slope = str(v, k);
    else if (k == "slope_radius") c.slope_radius = num(v, k);
    else if (k == "margin") c.margin = num(v, k);
    else if (k == "bracket_tol") c.bracket_tol = num(v, k);
    else if (k == "probes") c.probes = count(v, k);
    else if (k == "lambda_o") c.lambda_o = num(v, k);
    else if (k == "semiconcave_samples") c.semiconcave_samples = count(v, k);
    else if (k == "concentration_a") c.concentration_a = opt_num(v, k);
    else if (k == "concentration_b") c.concentration_b = opt_num(v, k);
    else if (k == "dual_tol") c.dual_tol = num(v, k);
    else if (k == "ma_stencil") c.ma_stencil = count(v, k);
    else throw Error(ErrorCode::InputParse, "unknown config key '" + k + "'");
  }
  return c;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::InputParse, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::InputParse, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns) {
  std::ostringstream os;
  for (std::size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << header[c];
  os << '\n';
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  char buf[32];
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", columns[c][r]);
      os << (c ? "," : "") << buf;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace tei
