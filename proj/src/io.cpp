#include "gmesp/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace gmesp {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::abs(v) >= 1e16 ? std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific)
                                        : std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Parse, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Parse, "cannot write '" + path + "'");
  out << text;
}

namespace {

double parse_number(const std::string& tok, const std::string& where) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw Error(ErrorCode::Parse, where + ": bad number '" + tok + "'");
  }
  while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
  if (pos != tok.size()) throw Error(ErrorCode::Parse, where + ": bad number '" + tok + "'");
  return v;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

Vec vec_of(const json& j, const std::string& name) {
  if (!j.is_array()) throw Error(ErrorCode::Parse, name + " must be an array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error(ErrorCode::Parse, name + " must contain numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Mat mat_of(const json& j, Eigen::Index rows, Eigen::Index cols, const std::string& name) {
  if (!j.is_array()) throw Error(ErrorCode::Parse, name + " must be an array");
  Mat M(rows, cols);
  if (!j.empty() && j[0].is_array()) {
    if (static_cast<Eigen::Index>(j.size()) != rows) throw Error(ErrorCode::Parse, name + ": wrong row count");
    for (Eigen::Index i = 0; i < rows; ++i) {
      const Vec r = vec_of(j[static_cast<std::size_t>(i)], name);
      if (r.size() != cols) throw Error(ErrorCode::Parse, name + ": wrong column count");
      M.row(i) = r.transpose();
    }
    return M;
  }
  const Vec flat = vec_of(j, name);
  if (flat.size() != rows * cols) throw Error(ErrorCode::Parse, name + ": expected " + std::to_string(rows * cols) + " entries");
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k) M(i, k) = flat(i * cols + k);
  return M;
}

json json_of(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json json_rows(const Mat& M) {
  json a = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) a.push_back(json_of(M.row(i).transpose()));
  return a;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

Mat read_matrix_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) row.push_back(parse_number(trim(tok), path));
    rows.push_back(row);
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Mat M(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != n) throw Error(ErrorCode::Parse, path + ": matrix is not square");
    for (Eigen::Index j = 0; j < n; ++j) M(i, j) = rows[i][j];
  }
  return M;
}

Mat read_matrix_market(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  for (auto* s : {&object, &format, &field, &symmetry})
    for (auto& ch : *s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  const bool coord = format == "coordinate" && field == "real" && symmetry == "symmetric";
  const bool array = format == "array" && field == "real" && symmetry == "general";
  if (banner != "%%MatrixMarket" || object != "matrix" || !(coord || array))
    throw Error(ErrorCode::Parse, path + ": unsupported Matrix Market header '" + header + "'");
  std::string line;
  do {
    if (!std::getline(in, line)) throw Error(ErrorCode::Parse, path + ": missing size line");
    line = trim(line);
  } while (line.empty() || line[0] == '%');
  std::istringstream ss(line);
  long rows = 0, cols = 0, nnz = 0;
  ss >> rows >> cols;
  if (coord) ss >> nnz;
  if (rows <= 0 || rows != cols) throw Error(ErrorCode::Parse, path + ": matrix must be square");
  Mat M = Mat::Zero(rows, cols);
  if (coord) {
    for (long k = 0; k < nnz; ++k) {
      long i = 0, j = 0;
      double v = 0.0;
      if (!(in >> i >> j >> v)) throw Error(ErrorCode::Parse, path + ": truncated entries");
      if (i < 1 || j < 1 || i > rows || j > cols) throw Error(ErrorCode::Parse, path + ": index out of range");
      M(i - 1, j - 1) = v;
      M(j - 1, i - 1) = v;
    }
  } else {
    for (long j = 0; j < cols; ++j)
      for (long i = 0; i < rows; ++i)
        if (!(in >> M(i, j))) throw Error(ErrorCode::Parse, path + ": truncated entries");
  }
  return M;
}

Instance parse_instance(const std::string& text, const std::string& base_dir) {
  const json j = parse_json(text);
  if (!j.is_object()) throw Error(ErrorCode::Parse, "instance must be a JSON object");
  for (const char* key : {"s", "t", "C"})
    if (!j.contains(key)) throw Error(ErrorCode::Parse, std::string("instance is missing '") + key + "'");
  Mat C;
  if (j["C"].is_string()) {
    std::filesystem::path p(j["C"].get<std::string>());
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    const std::string ext = p.extension().string();
    C = (ext == ".mtx" || ext == ".mm") ? read_matrix_market(p.string()) : read_matrix_csv(p.string());
  } else {
    Eigen::Index n = 0;
    if (j.contains("n")) n = j["n"].get<Eigen::Index>();
    else if (!j["C"].empty() && j["C"][0].is_array()) n = static_cast<Eigen::Index>(j["C"].size());
    else n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(j["C"].size()))));
    C = mat_of(j["C"], n, n, "C");
  }
  if (j.contains("n") && j["n"].get<Eigen::Index>() != C.rows()) throw Error(ErrorCode::Parse, "n does not match C");
  if (!j["s"].is_number_integer() || !j["t"].is_number_integer()) throw Error(ErrorCode::Parse, "s and t must be integers");
  Instance inst = make_instance(C, j["s"].get<int>(), j["t"].get<int>());
  const Eigen::Index n = C.rows();
  if (j.contains("A")) {
    const json& a = j["A"];
    const Eigen::Index m = a.empty() ? 0 : (a[0].is_array() ? static_cast<Eigen::Index>(a.size()) : static_cast<Eigen::Index>(a.size()) / n);
    inst.A = mat_of(a, m, n, "A");
    if (!j.contains("b")) throw Error(ErrorCode::Parse, "A given without b");
    inst.b = vec_of(j["b"], "b");
    if (inst.b.size() != m) throw Error(ErrorCode::Parse, "b has wrong length");
  }
  if (j.contains("l")) inst.l = vec_of(j["l"], "l");
  if (j.contains("c")) inst.c = vec_of(j["c"], "c");
  if (inst.l.size() != n || inst.c.size() != n) throw Error(ErrorCode::Parse, "l and c must have length n");
  try {
    validate(inst);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvariantViolation) throw Error(ErrorCode::Parse, e.what());
    throw;
  }
  return inst;
}

Instance read_instance(const std::string& path) {
  return parse_instance(read_file(path), std::filesystem::path(path).parent_path().string().empty()
                                             ? "."
                                             : std::filesystem::path(path).parent_path().string());
}

std::string instance_to_json(const Instance& inst) {
  json j;
  j["n"] = inst.n();
  j["s"] = inst.s;
  j["t"] = inst.t;
  json flat = json::array();
  for (int i = 0; i < inst.n(); ++i)
    for (int k = 0; k < inst.n(); ++k) flat.push_back(inst.C(i, k));
  j["C"] = flat;
  if (inst.m()) {
    j["A"] = json_rows(inst.A);
    j["b"] = json_of(inst.b);
  }
  j["l"] = json_of(inst.l);
  j["c"] = json_of(inst.c);
  return j.dump(1) + "\n";
}

RelaxPoint parse_relax_point(const std::string& text, int n) {
  const json j = parse_json(text);
  if (!j.contains("x") || !j.contains("X")) throw Error(ErrorCode::Parse, "point needs 'x' and 'X'");
  RelaxPoint p;
  p.x = vec_of(j["x"], "x");
  if (p.x.size() != n) throw Error(ErrorCode::Parse, "x has wrong length");
  p.X = mat_of(j["X"], n, n, "X");
  if (j.contains("scale")) p.X *= j["scale"].get<double>();
  if (j.contains("x_scale")) p.x *= j["x_scale"].get<double>();
  return p;
}

std::string relax_point_to_json(const RelaxPoint& p) {
  json j;
  j["x"] = json_of(p.x);
  j["X"] = json_rows(p.X);
  return j.dump(1) + "\n";
}

MatrixDualPoint parse_matrix_dual(const std::string& text, int n) {
  const json j0 = parse_json(text);
  const json& j = j0.contains("dual") ? j0["dual"] : j0;
  MatrixDualPoint d;
  const std::string kind = j.value("kind", "glinx");
  if (kind == "glinx") d.kind = MatrixKind::Glinx;
  else if (kind == "gnlp-id") d.kind = MatrixKind::GnlpId;
  else if (kind == "gnlp-comp") d.kind = MatrixKind::GnlpComp;
  else throw Error(ErrorCode::Parse, "unknown dual kind '" + kind + "'");
  const RegionSpec reg = parse_region(j.value("region", "full"));
  d.soc_rows = reg.soc_rows;
  d.upper = reg.upper;
  auto scaled = [&](const char* key) { return j.contains(std::string(key) + "_scale") ? j[std::string(key) + "_scale"].get<double>() : 1.0; };
  for (const char* key : {"Theta", "upsilon", "nu", "tau", "xi", "Z", "Omega"})
    if (!j.contains(key)) throw Error(ErrorCode::Parse, std::string("dual point is missing '") + key + "'");
  const json& th = j["Theta"];
  const Eigen::Index p = th.empty() ? 0 : (th[0].is_array() ? static_cast<Eigen::Index>(th.size()) : std::llround(std::sqrt(static_cast<double>(th.size()))));
  d.Theta = mat_of(th, p, p, "Theta") * scaled("Theta");
  d.upsilon = vec_of(j["upsilon"], "upsilon") * scaled("upsilon");
  d.nu = vec_of(j["nu"], "nu") * scaled("nu");
  d.eta = j.contains("eta") ? Vec(vec_of(j["eta"], "eta") * scaled("eta")) : Vec(Vec::Zero(n));
  d.pi = j.contains("pi") ? vec_of(j["pi"], "pi") : Vec();
  d.tau = j["tau"].get<double>();
  d.xi = j["xi"].get<double>();
  d.Z = mat_of(j["Z"], n, n, "Z") * scaled("Z");
  d.Omega = mat_of(j["Omega"], n, n, "Omega") * scaled("Omega");
  d.W = j.contains("W") ? Mat(mat_of(j["W"], n, n, "W") * scaled("W")) : Mat(Mat::Zero(n, n));
  if (d.upsilon.size() != n || d.nu.size() != n || d.eta.size() != n) throw Error(ErrorCode::Parse, "dual vectors have wrong length");
  return d;
}

std::string matrix_dual_to_json(const MatrixDualPoint& d) {
  json j;
  j["kind"] = to_string(d.kind);
  j["region"] = RegionSpec{d.soc_rows, d.upper}.name();
  j["Theta"] = json_rows(d.Theta);
  j["upsilon"] = json_of(d.upsilon);
  j["nu"] = json_of(d.nu);
  j["eta"] = json_of(d.eta);
  j["pi"] = json_of(d.pi);
  j["tau"] = d.tau;
  j["xi"] = d.xi;
  j["Z"] = json_rows(d.Z);
  j["Omega"] = json_rows(d.Omega);
  j["W"] = json_rows(d.W);
  j["objective"] = d.objective;
  return j.dump(1) + "\n";
}

namespace {

json report_json(const BoundReport& r, double lb) {
  json j;
  j["kind"] = to_string(r.kind);
  j["region"] = r.region;
  j["scaling"] = r.scaling;
  j["gamma"] = r.gamma;
  if (r.upsilon.size()) j["upsilon"] = json_of(r.upsilon);
  j["primal"] = finite_or_null(r.primal);
  j["certified"] = finite_or_null(r.certified);
  j["certificate_ok"] = r.certificate_ok;
  j["max_residual"] = r.max_residual;
  j["gap"] = std::isfinite(lb) ? finite_or_null(r.certified - lb) : json(nullptr);
  j["iterations"] = r.iterations;
  j["seconds"] = r.seconds;
  j["status"] = r.status;
  j["diagnostics"] = r.diagnostics;
  return j;
}

}  // namespace

std::string report_to_json(const BoundReport& r, double lb) { return report_json(r, lb).dump(1) + "\n"; }

std::string reports_to_json(const std::vector<BoundReport>& rs, double lb) {
  json a = json::array();
  for (const auto& r : rs) a.push_back(report_json(r, lb));
  json j;
  j["lb"] = finite_or_null(lb);
  j["reports"] = a;
  return j.dump(1) + "\n";
}

std::string report_csv_header() { return "kind,region,scaling,gamma,primal,certified,gap,certificate_ok,iterations,seconds,status\n"; }

std::string report_to_csv(const BoundReport& r, double lb) {
  std::ostringstream o;
  o << to_string(r.kind) << ',' << r.region << ',' << r.scaling << ',' << format_double(r.gamma) << ','
    << format_double(r.primal) << ',' << format_double(r.certified) << ','
    << (std::isfinite(lb) ? format_double(r.certified - lb) : std::string()) << ',' << (r.certificate_ok ? 1 : 0)
    << ',' << r.iterations << ',' << format_double(r.seconds) << ',' << r.status << '\n';
  return o.str();
}

}  // namespace gmesp
