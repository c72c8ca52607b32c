#include "p3ls/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <string_view>

namespace p3ls {

namespace {

using nlohmann::json;

std::ifstream open_for_read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return in;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  return out;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else if (c != '\r') {
      current.push_back(c);
    }
  }
  fields.push_back(current);
  return fields;
}

double parse_number(const std::string& field, const std::string& path, int line_no) {
  const char* begin = field.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v))
    throw ParseError(path + ":" + std::to_string(line_no) + ": not a number: '" + field + "'");
  return v;
}

long parse_integer(const std::string& field, const std::string& path, int line_no) {
  const char* begin = field.c_str();
  char* end = nullptr;
  const long v = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0')
    throw ParseError(path + ":" + std::to_string(line_no) + ": not an integer: '" + field + "'");
  return v;
}

void expect_header(std::ifstream& in, const std::string& path, const std::string& expected) {
  std::string line;
  if (!std::getline(in, line)) throw EmptyFile(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected)
    throw ParseError(path + ":1: expected header '" + expected + "', got '" + line + "'");
}

json curve_to_json(const Curve& c) {
  json arr = json::array();
  for (int k = 0; k < c.values.size(); ++k) arr.push_back(c.values(k));
  return arr;
}

Eigen::VectorXd json_to_vector(const json& arr, const std::string& what) {
  if (!arr.is_array()) throw FormatError("model file: " + what + " is not an array");
  Eigen::VectorXd v(arr.size());
  for (size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) throw FormatError("model file: " + what + " has a non-numeric entry");
    v(static_cast<long>(i)) = arr[i].get<double>();
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::vector<PointPattern> load_events(const std::string& path,
                                      std::optional<std::pair<double, double>> window) {
  std::ifstream in = open_for_read(path);
  expect_header(in, path, "subject_id,time");
  std::map<std::string, std::vector<double>> by_subject;
  std::string line;
  int line_no = 1;
  double t_min = std::numeric_limits<double>::infinity();
  double t_max = -std::numeric_limits<double>::infinity();
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_fields(line);
    if (fields.size() != 2)
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected 2 fields, got " +
                       std::to_string(fields.size()));
    if (fields[0].empty())
      throw ParseError(path + ":" + std::to_string(line_no) + ": empty subject id");
    const double t = parse_number(fields[1], path, line_no);
    by_subject[fields[0]].push_back(t);
    t_min = std::min(t_min, t);
    t_max = std::max(t_max, t);
  }
  if (by_subject.empty()) throw EmptyFile(path + ": no data rows");
  double w_lo;
  double w_hi;
  if (window) {
    w_lo = window->first;
    w_hi = window->second;
  } else {
    w_lo = t_min;
    w_hi = t_max > t_min ? t_max : t_min + 1.0;
  }
  std::vector<PointPattern> patterns;
  patterns.reserve(by_subject.size());
  for (auto& [id, events] : by_subject)
    patterns.push_back(make_point_pattern(id, std::move(events), w_lo, w_hi));
  return patterns;
}

void save_events(const std::string& path, const std::vector<PointPattern>& patterns) {
  std::ofstream out = open_for_write(path);
  out << "subject_id,time\n";
  for (const auto& p : patterns)
    for (double t : p.events) out << p.subject_id << ',' << format_double(t) << '\n';
}

std::vector<CountVector> load_counts(const std::string& path) {
  std::ifstream in = open_for_read(path);
  expect_header(in, path, "subject_id,bin_start,bin_end,count");
  struct Row {
    double lo, hi;
    long count;
  };
  std::map<std::string, std::vector<Row>> by_subject;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_fields(line);
    if (fields.size() != 4)
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected 4 fields, got " +
                       std::to_string(fields.size()));
    Row row{parse_number(fields[1], path, line_no), parse_number(fields[2], path, line_no),
            parse_integer(fields[3], path, line_no)};
    if (row.count < 0)
      throw ParseError(path + ":" + std::to_string(line_no) + ": negative count");
    by_subject[fields[0]].push_back(row);
  }
  if (by_subject.empty()) throw EmptyFile(path + ": no data rows");

  std::vector<CountVector> out;
  out.reserve(by_subject.size());
  for (auto& [id, rows] : by_subject) {
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.lo < b.lo; });
    std::vector<double> edges;
    Eigen::VectorXi counts(static_cast<long>(rows.size()));
    edges.push_back(rows.front().lo);
    const double tol = 1e-9 * std::max(1.0, std::abs(rows.back().hi - rows.front().lo));
    for (size_t i = 0; i < rows.size(); ++i) {
      if (std::abs(rows[i].lo - edges.back()) > tol)
        throw ParseError(path + ": bins for subject " + id + " do not tile the window");
      edges.push_back(rows[i].hi);
      counts(static_cast<long>(i)) = static_cast<int>(rows[i].count);
    }
    CountVector cv;
    cv.subject_id = id;
    cv.partition = make_partition(std::move(edges));
    cv.counts = std::move(counts);
    out.push_back(std::move(cv));
  }
  return out;
}

void save_counts(const std::string& path, const std::vector<CountVector>& counts) {
  std::ofstream out = open_for_write(path);
  out << "subject_id,bin_start,bin_end,count\n";
  for (const auto& cv : counts)
    for (int l = 0; l < cv.partition.size(); ++l)
      out << cv.subject_id << ',' << format_double(cv.partition.edges[static_cast<size_t>(l)])
          << ',' << format_double(cv.partition.edges[static_cast<size_t>(l) + 1]) << ','
          << cv.counts(l) << '\n';
}

std::map<std::string, double> load_responses(const std::string& path) {
  std::ifstream in = open_for_read(path);
  expect_header(in, path, "subject_id,y");
  std::map<std::string, double> out;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_fields(line);
    if (fields.size() != 2)
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected 2 fields, got " +
                       std::to_string(fields.size()));
    if (out.count(fields[0]))
      throw ParseError(path + ":" + std::to_string(line_no) + ": duplicate subject id '" +
                       fields[0] + "'");
    out[fields[0]] = parse_number(fields[1], path, line_no);
  }
  if (out.empty()) throw EmptyFile(path + ": no data rows");
  return out;
}

void save_responses(const std::string& path, const std::vector<std::string>& ids,
                    const Eigen::VectorXd& y) {
  if (static_cast<long>(ids.size()) != y.size())
    throw DimensionMismatch("save_responses: id/value count mismatch");
  std::ofstream out = open_for_write(path);
  out << "subject_id,y\n";
  for (size_t i = 0; i < ids.size(); ++i)
    out << ids[i] << ',' << format_double(y(static_cast<long>(i))) << '\n';
}

void save_model(const std::string& path, const PlsModel& model) {
  json j;
  j["format"] = "p3ls-model";
  j["version"] = 1;
  j["grid"] = {{"start", model.grid.start}, {"end", model.grid.end}, {"size", model.grid.size}};
  j["config"] = {{"window_start", model.config.window_start},
                 {"window_end", model.config.window_end},
                 {"grid_size", model.config.grid_size},
                 {"bins", model.config.bins},
                 {"h", model.config.h},
                 {"var_threshold", model.config.var_threshold},
                 {"fixed_q", model.config.fixed_q},
                 {"p", model.config.p},
                 {"p_max", model.config.p_max},
                 {"select_bic", model.config.select_bic}};
  j["q"] = model.q;
  j["p"] = model.p;
  j["p_requested"] = model.p_requested;
  j["ybar"] = model.ybar;
  json betas = json::array();
  for (int i = 0; i < model.betas.size(); ++i) betas.push_back(model.betas(i));
  j["betas"] = betas;
  json psis = json::array();
  for (const auto& psi : model.psis) psis.push_back(curve_to_json(psi));
  j["psis"] = psis;
  j["bhat"] = curve_to_json(model.bhat);
  j["xbar"] = curve_to_json(model.xbar);
  json basis = json::array();
  for (const auto& f : model.basis.functions) basis.push_back(curve_to_json(f));
  j["eigenbasis"] = basis;
  json spectrum = json::array();
  for (int i = 0; i < model.spectrum.size(); ++i) spectrum.push_back(model.spectrum(i));
  j["spectrum"] = spectrum;
  j["gram_deviation"] = model.gram_deviation;
  j["training_rss"] = model.training_rss;
  j["warnings"] = model.warnings;
  std::ofstream out = open_for_write(path);
  out << j.dump(1) << '\n';
}

PlsModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open model file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError("model file " + path + ": " + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "p3ls-model")
      throw FormatError("model file " + path + ": unknown format tag");
    if (j.at("version").get<int>() != 1)
      throw FormatError("model file " + path + ": unsupported version");

    PlsModel model;
    const auto& jg = j.at("grid");
    model.grid = make_uniform_grid(jg.at("start").get<double>(), jg.at("end").get<double>(),
                                   jg.at("size").get<int>());
    const auto& jc = j.at("config");
    model.config.window_start = jc.at("window_start").get<double>();
    model.config.window_end = jc.at("window_end").get<double>();
    model.config.grid_size = jc.at("grid_size").get<int>();
    model.config.bins = jc.at("bins").get<int>();
    model.config.h = jc.at("h").get<double>();
    model.config.var_threshold = jc.at("var_threshold").get<double>();
    model.config.fixed_q = jc.at("fixed_q").get<int>();
    model.config.p = jc.at("p").get<int>();
    model.config.p_max = jc.at("p_max").get<int>();
    model.config.select_bic = jc.at("select_bic").get<bool>();
    model.q = j.at("q").get<int>();
    model.p = j.at("p").get<int>();
    model.p_requested = j.at("p_requested").get<int>();
    model.ybar = j.at("ybar").get<double>();
    model.betas = json_to_vector(j.at("betas"), "betas");
    for (const auto& arr : j.at("psis"))
      model.psis.emplace_back(model.grid, json_to_vector(arr, "psis"));
    model.bhat = Curve(model.grid, json_to_vector(j.at("bhat"), "bhat"));
    model.xbar = Curve(model.grid, json_to_vector(j.at("xbar"), "xbar"));
    std::vector<Curve> basis_curves;
    for (const auto& arr : j.at("eigenbasis"))
      basis_curves.emplace_back(model.grid, json_to_vector(arr, "eigenbasis"));
    const BinPartition partition = uniform_partition(
        model.config.window_start, model.config.window_end, model.config.effective_bins());
    model.basis = make_eigen_basis(std::move(basis_curves), partition);
    model.spectrum = json_to_vector(j.at("spectrum"), "spectrum");
    model.gram_deviation = j.at("gram_deviation").get<double>();
    model.training_rss = j.at("training_rss").get<double>();
    for (const auto& w : j.at("warnings")) model.warnings.push_back(w.get<std::string>());
    if (model.betas.size() != static_cast<long>(model.psis.size()))
      throw FormatError("model file " + path + ": beta/psi count mismatch");
    return model;
  } catch (const json::exception& e) {
    throw FormatError("model file " + path + ": " + e.what());
  }
}

void save_covariance(const std::string& path, const CovarianceEstimate& cov) {
  std::ofstream out = open_for_write(path);
  out << "s,t,khat\n";
  for (int s = 0; s < cov.grid.size; ++s)
    for (int t = 0; t < cov.grid.size; ++t)
      out << format_double(cov.grid.point(s)) << ',' << format_double(cov.grid.point(t)) << ','
          << format_double(cov.khat.entries(s, t)) << '\n';
}

void save_spectrum(const std::string& path, const Eigen::VectorXd& eigenvalues) {
  std::ofstream out = open_for_write(path);
  out << "index,eigenvalue\n";
  for (int i = 0; i < eigenvalues.size(); ++i)
    out << (i + 1) << ',' << format_double(eigenvalues(i)) << '\n';
}

void save_curve(const std::string& path, const Curve& curve, const std::string& value_name) {
  std::ofstream out = open_for_write(path);
  out << "t," << value_name << '\n';
  for (int k = 0; k < curve.grid.size; ++k)
    out << format_double(curve.grid.point(k)) << ',' << format_double(curve.values(k)) << '\n';
}

void save_predictions(const std::string& path, const std::vector<std::string>& ids,
                      const Eigen::VectorXd& yhat) {
  if (static_cast<long>(ids.size()) != yhat.size())
    throw DimensionMismatch("save_predictions: id/value count mismatch");
  std::ofstream out = open_for_write(path);
  out << "subject_id,yhat\n";
  for (size_t i = 0; i < ids.size(); ++i)
    out << ids[i] << ',' << format_double(yhat(static_cast<long>(i))) << '\n';
}

void save_study_result(const std::string& path, const StudyResult& result) {
  std::ofstream out = open_for_write(path);
  out << "replicate,method,p,rmsee,rmspe,status\n";
  for (const auto& rec : result.records)
    out << rec.replicate << ',' << rec.method << ',' << rec.p << ',' << format_double(rec.rmsee)
        << ',' << format_double(rec.rmspe) << ',' << rec.status << '\n';
}

void save_study_quantiles(const std::string& path, const StudyResult& result) {
  auto quantile = [](std::vector<double> v, double q) {
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    const double pos = q * (static_cast<double>(v.size()) - 1.0);
    const auto lo = static_cast<size_t>(pos);
    const size_t hi = std::min(lo + 1, v.size() - 1);
    const double w = pos - static_cast<double>(lo);
    return (1.0 - w) * v[lo] + w * v[hi];
  };
  std::ofstream out = open_for_write(path);
  out << "method,p,metric,q05,q25,median,q75,q95\n";
  for (const char* method : {"p3ls", "fpcr"}) {
    for (int p = result.config.p_min; p <= result.config.p_max; ++p) {
      for (const char* metric : {"rmsee", "rmspe"}) {
        const bool want_rmsee = std::string_view(metric) == "rmsee";
        std::vector<double> vals;
        for (const auto& rec : result.records)
          if (rec.method == method && rec.p == p && rec.status == "ok")
            vals.push_back(want_rmsee ? rec.rmsee : rec.rmspe);
        if (vals.empty()) continue;
        out << method << ',' << p << ',' << metric;
        for (double q : {0.05, 0.25, 0.5, 0.75, 0.95})
          out << ',' << format_double(quantile(vals, q));
        out << '\n';
      }
    }
  }
}

void save_cv_table(const std::string& path, const CvTable& table) {
  std::ofstream out = open_for_write(path);
  out << "h,fold,rmspe\n";
  for (const auto& rec : table.records) {
    out << format_double(rec.h) << ',' << (rec.fold + 1) << ',';
    if (rec.status == "ok")
      out << format_double(rec.rmspe_value) << '\n';
    else
      out << rec.status << '\n';
  }
}

void save_cv_summary(const std::string& path, const CvTable& table) {
  std::ofstream out = open_for_write(path);
  out << "h,avg_rmspe\n";
  for (const auto& [h, avg] : table.averages)
    out << format_double(h) << ',' << format_double(avg) << '\n';
}

}  // namespace p3ls
