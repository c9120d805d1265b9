#include "ralasso/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ralasso {

std::string fmt17(double x) {
  if (!std::isfinite(x))
    throw std::logic_error("refusing to serialize a non-finite number");
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

void dump_rec(const json& j, std::string& out, int depth) {
  const std::string pad(2 * static_cast<std::size_t>(depth + 1), ' ');
  const std::string close_pad(2 * static_cast<std::size_t>(depth), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) { out += "{}"; return; }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + json(key).dump() + ": ";
        dump_rec(value, out, depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) { out += "[]"; return; }
      bool primitive = true;
      for (const auto& el : j)
        if (el.is_structured()) { primitive = false; break; }
      if (primitive) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          dump_rec(j[i], out, depth);
        }
        out += "]";
      } else {
        out += "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ",\n";
          out += pad;
          dump_rec(j[i], out, depth + 1);
        }
        out += "\n" + close_pad + "]";
      }
      return;
    }
    case json::value_t::number_float:
      out += fmt17(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

double parse_double(const std::string& field, long lineno) {
  if (field.empty())
    throw CsvError("line " + std::to_string(lineno) + ": empty field", lineno);
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw CsvError("line " + std::to_string(lineno) + ": '" + field
                       + "' is not a number",
                   lineno);
  if (!std::isfinite(v))
    throw CsvError("line " + std::to_string(lineno)
                       + ": non-finite values are not allowed",
                   lineno);
  return v;
}

}  // namespace

std::string dump_json(const json& j) {
  std::string out;
  dump_rec(j, out, 0);
  out += "\n";
  return out;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw CsvError("cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  long lineno = 0;
  bool have_header = false;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (!have_header) {
      for (const auto& name : fields)
        if (name.empty())
          throw CsvError("line " + std::to_string(lineno) + ": empty column name",
                         lineno);
      t.header = fields;
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size())
      throw CsvError("line " + std::to_string(lineno) + ": expected "
                         + std::to_string(t.header.size()) + " fields, got "
                         + std::to_string(fields.size()),
                     lineno);
    std::vector<double> row(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c)
      row[c] = parse_double(fields[c], lineno);
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw CsvError("'" + path + "' has no header line");
  return t;
}

Dataset read_dataset_csv(const std::string& path) {
  CsvTable t = read_csv(path);
  std::size_t ycol = t.header.size();
  for (std::size_t c = 0; c < t.header.size(); ++c)
    if (t.header[c] == "y") { ycol = c; break; }
  if (ycol == t.header.size())
    throw CsvError("'" + path + "' has no column named 'y'");
  if (t.header.size() < 2)
    throw CsvError("'" + path + "' has no feature columns");
  if (t.rows.empty()) throw CsvError("'" + path + "' has no data rows");

  Dataset d;
  d.X.resize(static_cast<Eigen::Index>(t.rows.size()),
             static_cast<Eigen::Index>(t.header.size() - 1));
  d.y.resize(static_cast<Eigen::Index>(t.rows.size()));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Eigen::Index feat = 0;
    for (std::size_t c = 0; c < t.header.size(); ++c) {
      if (c == ycol) d.y[static_cast<Eigen::Index>(r)] = t.rows[r][c];
      else d.X(static_cast<Eigen::Index>(r), feat++) = t.rows[r][c];
    }
  }
  d.validate();
  return d;
}

Eigen::VectorXd read_column_csv(const std::string& path) {
  CsvTable t = read_csv(path);
  if (t.header.size() != 1)
    throw CsvError("'" + path + "' must have exactly one column, found "
                   + std::to_string(t.header.size()));
  if (t.rows.empty()) throw CsvError("'" + path + "' has no data rows");
  Eigen::VectorXd v(static_cast<Eigen::Index>(t.rows.size()));
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    v[static_cast<Eigen::Index>(r)] = t.rows[r][0];
  return v;
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  CsvTable t = read_csv(path);
  if (t.rows.empty()) throw CsvError("'" + path + "' has no data rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(t.rows.size()),
                    static_cast<Eigen::Index>(t.header.size()));
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    for (std::size_t c = 0; c < t.header.size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = t.rows[r][c];
  return m;
}

namespace {

[[noreturn]] void scenario_error(const std::string& field, const std::string& why) {
  throw std::invalid_argument("scenario field '" + field + "': " + why);
}

template <typename T>
T get_field(const json& j, const std::string& field, const char* type_name) {
  try {
    return j.at(field).get<T>();
  } catch (const json::exception&) {
    scenario_error(field, std::string("expected ") + type_name);
  }
}

}  // namespace

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("scenario must be a JSON object");
  static const std::vector<std::string> known = {
      "model", "error", "n", "p", "beta_star", "beta_star_spec",
      "replications", "seed", "grid"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw std::invalid_argument("scenario has unknown field '" + key + "'");
  }
  if (!j.contains("model")) scenario_error("model", "required");
  if (!j.contains("error")) scenario_error("error", "required");

  Scenario sc;
  sc.model = model_from_string(get_field<std::string>(j, "model", "a string"));
  sc.error = error_law_from_string(get_field<std::string>(j, "error", "a string"));
  if (j.contains("n")) sc.n = get_field<int>(j, "n", "an integer");
  if (j.contains("p")) sc.p = get_field<int>(j, "p", "an integer");
  if (sc.n < 1) scenario_error("n", "must be >= 1");
  if (sc.p < 1) scenario_error("p", "must be >= 1");
  if (j.contains("replications"))
    sc.replications = get_field<int>(j, "replications", "an integer");
  if (sc.replications < 1) scenario_error("replications", "must be >= 1");
  if (j.contains("seed"))
    sc.seed = get_field<std::uint64_t>(j, "seed", "a non-negative integer");

  if (j.contains("beta_star") && j.contains("beta_star_spec"))
    scenario_error("beta_star", "give either beta_star or beta_star_spec, not both");
  if (j.contains("beta_star")) {
    auto vals = get_field<std::vector<double>>(j, "beta_star", "an array of numbers");
    if (static_cast<int>(vals.size()) != sc.p)
      scenario_error("beta_star", "length must equal p");
    sc.beta_star = Eigen::Map<Eigen::VectorXd>(vals.data(),
                                               static_cast<Eigen::Index>(vals.size()));
  } else if (j.contains("beta_star_spec")) {
    const json& spec = j.at("beta_star_spec");
    if (!spec.is_object() || !spec.contains("nonzero") || !spec.contains("value"))
      scenario_error("beta_star_spec", "expected {\"nonzero\": k, \"value\": v}");
    int k = get_field<int>(spec, "nonzero", "an integer");
    double v = get_field<double>(spec, "value", "a number");
    if (k < 0 || k > sc.p) scenario_error("beta_star_spec", "nonzero must be in [0, p]");
    sc.beta_star = Eigen::VectorXd::Zero(sc.p);
    for (int i = 0; i < k; ++i) sc.beta_star[i] = v;
  }

  if (j.contains("grid")) {
    const json& g = j.at("grid");
    if (!g.is_object()) scenario_error("grid", "expected an object");
    for (const auto& [key, value] : g.items()) {
      (void)value;
      if (key != "lambda" && key != "alpha" && key != "n_validation")
        throw std::invalid_argument("grid has unknown field '" + key + "'");
    }
    if (g.contains("lambda"))
      sc.grid.lambdas = get_field<std::vector<double>>(g, "lambda", "an array");
    if (g.contains("alpha"))
      sc.grid.alphas = get_field<std::vector<double>>(g, "alpha", "an array");
    if (g.contains("n_validation"))
      sc.grid.n_validation = get_field<int>(g, "n_validation", "an integer");
    if (sc.grid.n_validation < 1) scenario_error("grid.n_validation", "must be >= 1");
  }
  return sc;
}

json scenario_to_json(const Scenario& sc) {
  json j;
  j["model"] = model_name(sc.model);
  j["error"] = error_law_name(sc.error);
  j["n"] = sc.n;
  j["p"] = sc.p;

  Eigen::VectorXd beta = sc.resolved_beta_star();
  // Prefer the compact form when beta_star is a leading block of one value.
  int k = 0;
  while (k < beta.size() && beta[k] != 0.0 && beta[k] == beta[0]) ++k;
  bool block = true;
  for (int i = k; i < beta.size(); ++i)
    if (beta[i] != 0.0) { block = false; break; }
  if (block && (k == 0 || beta[0] != 0.0)) {
    j["beta_star_spec"] = {{"nonzero", k}, {"value", k > 0 ? beta[0] : 0.0}};
  } else {
    j["beta_star"] = std::vector<double>(beta.data(), beta.data() + beta.size());
  }

  j["replications"] = sc.replications;
  j["seed"] = sc.seed;
  TuningGrid g = sc.resolved_grid();
  j["grid"] = {{"lambda", g.lambdas}, {"alpha", g.alphas},
               {"n_validation", g.n_validation}};
  return j;
}

json report_to_json(const MetricsReport& report) {
  json j;
  json results = json::array();
  for (const auto& s : report.methods) {
    json r;
    r["method"] = method_name(s.method);
    bool tuned = s.method != Method::Oracle;
    r["lambda"] = tuned ? json(s.tuned.lambda) : json(nullptr);
    bool has_alpha = s.method == Method::RaLasso || s.method == Method::CatoniLasso;
    r["alpha"] = has_alpha ? json(s.tuned.alpha) : json(nullptr);
    r["mean_l2"] = s.mean_l2;
    r["mean_l1"] = s.mean_l1;
    r["mean_fp"] = s.mean_fp;
    r["mean_fn"] = s.mean_fn;
    results.push_back(r);
  }
  j["results"] = results;

  auto gain = [](const std::optional<double>& g) {
    return g ? json(*g) : json(nullptr);
  };
  j["relative_gain"] = {
      {"vs_lasso", {{"l2", gain(report.rg_l2_vs_lasso)},
                    {"l1", gain(report.rg_l1_vs_lasso)}}},
      {"vs_r_lasso", {{"l2", gain(report.rg_l2_vs_r_lasso)},
                      {"l1", gain(report.rg_l1_vs_r_lasso)}}}};
  return j;
}

std::string report_to_csv(const MetricsReport& report,
                          const std::vector<std::string>& extra_header) {
  std::ostringstream out;
  for (const auto& line : extra_header) out << "# " << line << "\n";
  out << "method,metric,value\n";
  for (const auto& s : report.methods) {
    const char* name = method_name(s.method);
    if (s.method != Method::Oracle)
      out << name << ",lambda," << fmt17(s.tuned.lambda) << "\n";
    if (s.method == Method::RaLasso || s.method == Method::CatoniLasso)
      out << name << ",alpha," << fmt17(s.tuned.alpha) << "\n";
    out << name << ",mean_l2," << fmt17(s.mean_l2) << "\n";
    out << name << ",mean_l1," << fmt17(s.mean_l1) << "\n";
    out << name << ",mean_fp," << fmt17(s.mean_fp) << "\n";
    out << name << ",mean_fn," << fmt17(s.mean_fn) << "\n";
  }
  bool has_ra = false, has_oracle = false, has_lasso = false, has_rlasso = false;
  for (const auto& s : report.methods) {
    has_ra |= s.method == Method::RaLasso;
    has_oracle |= s.method == Method::Oracle;
    has_lasso |= s.method == Method::Lasso;
    has_rlasso |= s.method == Method::RLasso;
  }
  auto emit = [&](const char* metric, const std::optional<double>& g) {
    out << "relative_gain," << metric << ","
        << (g ? fmt17(*g) : std::string("NA")) << "\n";
  };
  if (has_ra && has_oracle && has_lasso) {
    emit("l2_vs_lasso", report.rg_l2_vs_lasso);
    emit("l1_vs_lasso", report.rg_l1_vs_lasso);
  }
  if (has_ra && has_oracle && has_rlasso) {
    emit("l2_vs_r_lasso", report.rg_l2_vs_r_lasso);
    emit("l1_vs_r_lasso", report.rg_l1_vs_r_lasso);
  }
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CsvError("cannot write '" + path + "'");
  f << content;
  if (!f) throw CsvError("failed while writing '" + path + "'");
}

}  // namespace ralasso
