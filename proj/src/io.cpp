#include "simreg/io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace simreg::io {

namespace {

using nlohmann::json;

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Err::FileError, "cannot open " + path + " for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) raise(Err::FileError, "cannot open " + path + " for writing");
  return out;
}

double parse_double(const std::string& tok, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0')
    raise(Err::ParseError, "bad number '" + tok + "' in " + where);
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  return out;
}

json vector_to_json(const Ref<const Vector>& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vector json_to_vector(const json& a, const std::string& key) {
  if (!a.is_array()) raise(Err::ParseError, key + " must be an array");
  Vector v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Index>(i)] = a[i].get<double>();
  return v;
}

json matrix_to_json(const Ref<const Matrix>& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) rows.push_back(vector_to_json(m.row(i).transpose()));
  return rows;
}

json intervals_to_json(const std::vector<Interval>& iv) {
  json a = json::array();
  for (const Interval& i : iv) a.push_back(json{{"lo", i.lo}, {"hi", i.hi}});
  return a;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  // 17 significant digits round-trip any IEEE-754 double
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
  std::ofstream out = open_out(path);
  out << "i,x";
  for (Index j = 0; j < data.p(); ++j) out << ",y" << (j + 1);
  out << '\n';
  for (Index i = 0; i < data.n(); ++i) {
    out << (i + 1) << ',' << format_double(data.x[i]);
    for (Index j = 0; j < data.p(); ++j) out << ',' << format_double(data.y(i, j));
    out << '\n';
  }
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) raise(Err::InsufficientData, path + " is empty");
  const auto header = split_csv(line);
  if (header.size() < 3 || header[0] != "i" || header[1] != "x")
    raise(Err::ParseError, path + " must start with header i,x,y1,...");
  const Index p = static_cast<Index>(header.size()) - 2;
  std::vector<double> xs;
  std::vector<double> ys;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto toks = split_csv(line);
    if (static_cast<Index>(toks.size()) != p + 2)
      raise(Err::ParseError, "row with wrong field count in " + path);
    xs.push_back(parse_double(toks[1], path));
    for (Index j = 0; j < p; ++j) ys.push_back(parse_double(toks[2 + j], path));
  }
  Dataset data;
  const Index n = static_cast<Index>(xs.size());
  data.x = Eigen::Map<Vector>(xs.data(), n);
  data.y.resize(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) data.y(i, j) = ys[static_cast<std::size_t>(i) * p + j];
  return data;
}

ModelConfig read_model_config(const std::string& path) {
  std::ifstream in = open_in(path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    raise(Err::ParseError, path + ": " + e.what());
  }
  try {
    ModelConfig cfg;
    cfg.params.v = json_to_vector(doc.at("v"), "v");
    cfg.params.theta = json_to_vector(doc.at("theta"), "theta");
    cfg.params.a = json_to_vector(doc.at("a"), "a");
    cfg.sigma = json_to_vector(doc.at("sigma"), "sigma");
    if (doc.contains("p") && doc["p"].get<Index>() != cfg.params.p())
      raise(Err::ConfigError, "p does not match the parameter arrays");
    const json& shape = doc.at("shape");
    const std::string type = shape.at("type").get<std::string>();
    if (type == "fourier_cosine") {
      cfg.shape = ShapeSpec::fourier_cosine(json_to_vector(shape.at("coeffs"), "coeffs"));
    } else if (type == "tabulated") {
      cfg.shape = ShapeSpec::tabulated(json_to_vector(shape.at("coeffs"), "coeffs"),
                                       shape.value("symmetric", false));
    } else {
      raise(Err::ConfigError, "unknown shape type " + type);
    }
    if (doc.contains("density")) {
      const std::string dens = doc["density"].value("type", "uniform");
      if (dens != "uniform") raise(Err::ConfigError, "only the uniform density is configurable");
    }
    cfg.density = DesignDensity::uniform();
    cfg.n = doc.value("n", Index{0});
    cfg.seed = doc.value("seed", std::uint64_t{0});
    if (doc.contains("nw")) {
      const json& nw = doc["nw"];
      NWJsonConfig k;
      k.alpha = nw.value("alpha", 0.9);
      k.kernel = nw.value("kernel", std::string("uniform"));
      k.weights = nw.value("weights", std::string("uniform"));
      k.grid_points = nw.value("grid_points", Index{101});
      if (k.kernel != "uniform" && k.kernel != "epanechnikov")
        raise(Err::ConfigError, "nw.kernel must be uniform or epanechnikov");
      if (k.weights != "uniform" && k.weights != "optimal")
        raise(Err::ConfigError, "nw.weights must be uniform or optimal");
      cfg.nw = k;
    }
    return cfg;
  } catch (const json::exception& e) {
    raise(Err::ConfigError, path + ": " + e.what());
  }
}

void write_model_config(const std::string& path, const ModelConfig& config) {
  json doc;
  doc["p"] = config.params.p();
  doc["v"] = vector_to_json(config.params.v);
  doc["theta"] = vector_to_json(config.params.theta);
  doc["a"] = vector_to_json(config.params.a);
  doc["sigma"] = vector_to_json(config.sigma);
  doc["shape"] = {{"type", config.shape.is_fourier() ? "fourier_cosine" : "tabulated"},
                  {"coeffs", vector_to_json(config.shape.data())}};
  if (!config.shape.is_fourier()) doc["shape"]["symmetric"] = config.shape.symmetric();
  doc["density"] = {{"type", "uniform"}};
  doc["n"] = config.n;
  doc["seed"] = config.seed;
  if (config.nw)
    doc["nw"] = {{"alpha", config.nw->alpha},
                 {"kernel", config.nw->kernel},
                 {"weights", config.nw->weights},
                 {"grid_points", config.nw->grid_points}};
  open_out(path) << doc.dump(2) << '\n';
}

void write_snapshot_json(const std::string& path, const FitResult& fit) {
  json doc;
  doc["n"] = fit.n;
  doc["v_hat"] = vector_to_json(fit.v_hat);
  doc["theta_hat"] = vector_to_json(fit.theta_hat);
  doc["a_hat"] = fit.a_hat ? vector_to_json(*fit.a_hat) : json();
  doc["f1_hat"] = fit.f1_hat;
  json trunc = json::array();
  for (Index j = 0; j < fit.truncations.size(); ++j) trunc.push_back(fit.truncations[j]);
  doc["truncations"] = trunc;
  open_out(path) << doc.dump(2) << '\n';
}

void write_trajectory_csv(const std::string& path, const FitResult& fit) {
  std::ofstream out = open_out(path);
  out << "n,component,value\n";
  for (std::size_t i = 0; i < fit.v_trajectory.size(); ++i) {
    const Index step = static_cast<Index>(i) + 1;
    const Vector& v = fit.v_trajectory[i];
    const Vector& th = fit.theta_trajectory[i];
    for (Index j = 0; j < v.size(); ++j)
      out << step << ",v" << (j + 1) << ',' << format_double(v[j]) << '\n';
    for (Index j = 0; j < th.size(); ++j)
      out << step << ",theta" << (j + 1) << ',' << format_double(th[j]) << '\n';
  }
}

void write_grid_csv(const std::string& path, const Ref<const Vector>& grid,
                    const Ref<const Vector>& f_values, const std::vector<Interval>* intervals) {
  std::ofstream out = open_out(path);
  out << (intervals ? "x,f_hat,ci_lo,ci_hi" : "x,f_hat") << '\n';
  for (Index k = 0; k < grid.size(); ++k) {
    out << format_double(grid[k]) << ',' << format_double(f_values[k]);
    if (intervals)
      out << ',' << format_double((*intervals)[k].lo) << ','
          << format_double((*intervals)[k].hi);
    out << '\n';
  }
}

void write_report_json(const std::string& path, const CovarianceReport& report) {
  json doc;
  doc["gamma_v"] = matrix_to_json(report.gamma_v);
  doc["sigma_theta"] = matrix_to_json(report.sigma_theta);
  doc["gamma_a"] = matrix_to_json(report.gamma_a);
  doc["gamma_a_tilde"] = matrix_to_json(report.gamma_a_tilde);
  doc["intervals"] = {{"v", intervals_to_json(report.ci_v)},
                      {"theta", intervals_to_json(report.ci_theta)},
                      {"a", intervals_to_json(report.ci_a)}};
  doc["level"] = report.level;
  doc["n"] = report.sample_n;
  open_out(path) << doc.dump(2) << '\n';
}

ecg::Signal read_signal(const std::string& path) {
  std::ifstream in = open_in(path);
  ecg::Signal sig;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::string tok = line;
    if (const auto comma = line.find(','); comma != std::string::npos)
      tok = line.substr(0, comma);
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str()) {
      if (first) {
        first = false;
        continue;  // header line
      }
      raise(Err::ParseError, "bad sample '" + tok + "' in " + path);
    }
    first = false;
    sig.samples.push_back(v);
  }
  return sig;
}

void write_beats_csv(const std::string& path, const ecg::SegmentedBeats& beats) {
  std::ofstream out = open_out(path);
  out << "beat,sample,x,value\n";
  for (Index b = 0; b < beats.p(); ++b)
    for (Index i = 0; i < beats.n(); ++i)
      out << (b + 1) << ',' << (i + 1) << ',' << format_double(beats.xgrid[i]) << ','
          << format_double(beats.beats(b, i)) << '\n';
}

void write_ecg_fit_json(const std::string& path, const ecg::FittedModel& fit,
                        const Vector* scores) {
  json doc;
  doc["ref"] = fit.ref + 1;  // 1-based in the file
  doc["v_hat"] = vector_to_json(fit.v_hat);
  doc["theta_hat"] = vector_to_json(fit.theta_hat);
  doc["a_hat"] = vector_to_json(fit.a_hat);
  doc["f1_hat"] = fit.f1_hat;
  doc["g1_hat"] = fit.g1_hat;
  if (scores) doc["scores"] = vector_to_json(*scores);
  open_out(path) << doc.dump(2) << '\n';
}

}  // namespace simreg::io
