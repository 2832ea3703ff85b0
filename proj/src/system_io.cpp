#include "ebal/system_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ebal {

namespace {

[[noreturn]] void parse_fail(const std::string& origin, int line, const std::string& why) {
  throw Error(ErrorCode::ParseError, origin + ":" + std::to_string(line) + ": " + why, line);
}

std::vector<std::string> tokens(const std::string& line) {
  std::string body = line.substr(0, line.find('#'));
  std::istringstream ss(body);
  std::vector<std::string> out;
  std::string t;
  while (ss >> t) out.push_back(t);
  return out;
}

bool to_number(const std::string& s, double& v) {
  const char* b = s.c_str();
  char* e = nullptr;
  errno = 0;
  v = std::strtod(b, &e);
  return e != b && *e == '\0' && errno != ERANGE;
}

void check_kind(SystemFile& f) {
  auto need = [&](const char* name) {
    if (!f.find(name)) throw Error(ErrorCode::ParseError, std::string("missing matrix ") + name);
  };
  if (f.kind == "ph") {
    for (const char* nm : {"J", "R", "H", "B"}) need(nm);
    f.ph();
  } else if (f.kind == "lti") {
    for (const char* nm : {"A", "B", "C"}) need(nm);
    f.lti();
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const Matrix* SystemFile::find(const std::string& name) const {
  for (const auto& [k, M] : matrices)
    if (k == name) return &M;
  return nullptr;
}

const Matrix& SystemFile::get(const std::string& name) const {
  if (const Matrix* M = find(name)) return *M;
  throw Error(ErrorCode::ParseError, "missing matrix " + name);
}

void SystemFile::set(const std::string& name, Matrix M) {
  for (auto& [k, old] : matrices)
    if (k == name) {
      old = std::move(M);
      return;
    }
  matrices.emplace_back(name, std::move(M));
}

LtiSystem SystemFile::lti() const {
  if (kind == "ph") return ph_to_lti(ph());
  return LtiSystem(get("A"), get("B"), get("C"));
}

PhSystem SystemFile::ph() const {
  if (kind != "ph") throw Error(ErrorCode::Usage, "system is not port-Hamiltonian");
  const Matrix &J = get("J"), &R = get("R"), &H = get("H"), &B = get("B");
  const auto n = H.rows();
  if (H.cols() != n || J.rows() != n || J.cols() != n || R.rows() != n || R.cols() != n || B.rows() != n)
    throw Error(ErrorCode::DimensionMismatch, "J, R, H, B are not conformable");
  return PhSystem(J, R, H, B);
}

SystemFile system_file_from(const PhSystem& ph) {
  SystemFile f;
  f.kind = "ph";
  f.set("J", ph.J());
  f.set("R", ph.R());
  f.set("H", ph.H());
  f.set("B", ph.B());
  return f;
}

SystemFile system_file_from(const LtiSystem& sys) {
  SystemFile f;
  f.kind = "lti";
  f.set("A", sys.A);
  f.set("B", sys.B);
  f.set("C", sys.C);
  return f;
}

SystemFile builtin_example(const std::string& name) {
  SystemFile f;
  if (name == "msd")
    f = system_file_from(build_msd_example());
  else if (name == "rlc")
    f = system_file_from(build_rlc_example());
  else
    throw Error(ErrorCode::Usage, "unknown example '" + name + "' (msd, rlc)");
  f.metadata["example"] = name;
  if (name == "msd") f.metadata["slack_c"] = "1e-05";
  return f;
}

SystemFile parse_system_text(const std::string& text, const std::string& origin) {
  SystemFile f;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tk = tokens(line);
    if (tk.empty()) continue;
    if (tk[0] == "kind") {
      if (tk.size() != 2 || (tk[1] != "lti" && tk[1] != "ph")) parse_fail(origin, lineno, "expected 'kind lti|ph'");
      f.kind = tk[1];
    } else if (tk[0] == "example") {
      if (tk.size() != 2) parse_fail(origin, lineno, "expected 'example msd|rlc'");
      try {
        SystemFile ex = builtin_example(tk[1]);
        f.kind = ex.kind;
        for (auto& [k, M] : ex.matrices) f.set(k, M);
        for (auto& [k, v] : ex.metadata) f.metadata[k] = v;
      } catch (const Error& e) {
        parse_fail(origin, lineno, e.what());
      }
    } else if (tk[0] == "meta") {
      if (tk.size() < 3) parse_fail(origin, lineno, "expected 'meta key value'");
      std::string v = tk[2];
      for (std::size_t i = 3; i < tk.size(); ++i) v += " " + tk[i];
      f.metadata[tk[1]] = v;
    } else if (tk[0] == "matrix") {
      double r = 0, c = 0;
      if (tk.size() != 4 || !to_number(tk[2], r) || !to_number(tk[3], c) || r < 0 || c < 0 || r != static_cast<int>(r) ||
          c != static_cast<int>(c))
        parse_fail(origin, lineno, "expected 'matrix NAME rows cols'");
      Matrix M(static_cast<int>(r), static_cast<int>(c));
      for (int i = 0; i < M.rows(); ++i) {
        std::vector<std::string> row;
        while (row.empty()) {
          if (!std::getline(in, line)) parse_fail(origin, lineno, "unexpected end of file inside matrix " + tk[1]);
          ++lineno;
          row = tokens(line);
        }
        if (static_cast<Eigen::Index>(row.size()) != M.cols())
          parse_fail(origin, lineno,
                     "row has " + std::to_string(row.size()) + " entries, expected " + std::to_string(M.cols()));
        for (int j = 0; j < M.cols(); ++j)
          if (!to_number(row[j], M(i, j))) parse_fail(origin, lineno, "not a number: '" + row[j] + "'");
      }
      f.set(tk[1], std::move(M));
    } else {
      parse_fail(origin, lineno, "unknown directive '" + tk[0] + "'");
    }
  }
  if (f.kind.empty()) {
    if (f.matrices.size() == 1) return f;  // bare matrix file
    parse_fail(origin, lineno, "missing 'kind' header");
  }
  check_kind(f);
  return f;
}

SystemFile parse_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_system_text(ss.str(), path);
}

std::string write_system(const SystemFile& f) {
  std::ostringstream out;
  out << "kind " << f.kind << "\n";
  for (const auto& [k, v] : f.metadata) out << "meta " << k << " " << v << "\n";
  for (const auto& [name, M] : f.matrices) {
    out << "matrix " << name << " " << M.rows() << " " << M.cols() << "\n";
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      for (Eigen::Index j = 0; j < M.cols(); ++j) out << (j ? " " : "") << format_double(M(i, j));
      out << "\n";
    }
  }
  return out.str();
}

void write_system(const SystemFile& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << write_system(f);
}

Matrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  // Kind headers would force validation of a whole system; a lone matrix needs none.
  SystemFile f = parse_system_text(ss.str(), path);
  if (f.matrices.empty()) throw Error(ErrorCode::ParseError, path + ": no matrix block");
  return f.matrices.front().second;
}

// ---------------------------------------------------------------- report

void ReductionReport::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : fields)
    if (k == key) {
      v = value;
      return;
    }
  fields.emplace_back(key, value);
}

void ReductionReport::set(const std::string& key, double value) { set(key, format_double(value)); }

std::optional<std::string> ReductionReport::get(const std::string& key) const {
  for (const auto& [k, v] : fields)
    if (k == key) return v;
  return std::nullopt;
}

double ReductionReport::number(const std::string& key) const {
  auto v = get(key);
  double x = 0;
  if (!v || !to_number(*v, x)) throw Error(ErrorCode::ParseError, "report field '" + key + "' missing or not numeric");
  return x;
}

std::string ReductionReport::to_text() const {
  std::ostringstream out;
  for (const auto& [k, v] : fields) out << k << "=" << v << "\n";
  out << "```lambda\n";
  out << "index sigma truncated\n";
  for (std::size_t i = 0; i < lambda.size(); ++i)
    out << i + 1 << " " << format_double(lambda[i]) << " " << (truncated[i] ? "yes" : "no") << "\n";
  out << "```\n";
  return out.str();
}

ReductionReport parse_report(const std::string& text) {
  ReductionReport r;
  std::istringstream in(text);
  std::string line;
  bool table = false;
  while (std::getline(in, line)) {
    if (line.rfind("```", 0) == 0) {
      table = !table;
      continue;
    }
    if (table) {
      std::istringstream ls(line);
      std::string idx, sig, tr;
      ls >> idx >> sig >> tr;
      if (idx == "index") continue;
      double s = 0;
      if (!to_number(sig, s)) throw Error(ErrorCode::ParseError, "bad lambda row: " + line);
      r.lambda.push_back(s);
      r.truncated.push_back(tr == "yes");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    r.fields.emplace_back(line.substr(0, eq), line.substr(eq + 1));
  }
  return r;
}

void write_trajectory_csv(const std::string& path, const Eigen::VectorXd& times, const MatRef& inputs,
                          const MatRef& outputs) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << "t";
  for (Eigen::Index j = 0; j < inputs.cols(); ++j) out << ",u" << j + 1;
  for (Eigen::Index j = 0; j < outputs.cols(); ++j) out << ",y" << j + 1;
  out << "\n";
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    out << format_double(times(i));
    for (Eigen::Index j = 0; j < inputs.cols(); ++j) out << "," << format_double(inputs(i, j));
    for (Eigen::Index j = 0; j < outputs.cols(); ++j) out << "," << format_double(outputs(i, j));
    out << "\n";
  }
}

}  // namespace ebal
