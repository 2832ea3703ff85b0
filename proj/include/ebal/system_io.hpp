#pragma once

#include "ebal/core.hpp"
#include "ebal/sysmodel.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ebal {

struct SystemFile {
  std::string kind;  // "lti" or "ph"
  std::vector<std::pair<std::string, Matrix>> matrices;
  std::map<std::string, std::string> metadata;

  const Matrix* find(const std::string& name) const;
  const Matrix& get(const std::string& name) const;  // throws ParseError
  void set(const std::string& name, Matrix M);

  LtiSystem lti() const;
  PhSystem ph() const;  // throws unless kind == "ph"
};

SystemFile system_file_from(const PhSystem& ph);
SystemFile system_file_from(const LtiSystem& sys);
SystemFile builtin_example(const std::string& name);  // "msd" or "rlc"

// Text format: `kind lti|ph`, optional `example msd|rlc`, `meta key value`,
// then blocks `matrix NAME rows cols` each followed by `rows` lines of numbers. `#` starts a comment.
SystemFile parse_system_text(const std::string& text, const std::string& origin = "<text>");
SystemFile parse_system(const std::string& path);  // throws Io, ParseError, DimensionMismatch
std::string write_system(const SystemFile& f);     // 17 significant digits
void write_system(const SystemFile& f, const std::string& path);

// First matrix in a system-format file.
Matrix read_matrix_file(const std::string& path);

struct ReductionReport {
  std::vector<std::pair<std::string, std::string>> fields;
  std::vector<double> lambda;
  std::vector<bool> truncated;

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  std::optional<std::string> get(const std::string& key) const;
  double number(const std::string& key) const;

  std::string to_text() const;
};

ReductionReport parse_report(const std::string& text);

std::string format_double(double v);

void write_trajectory_csv(const std::string& path, const Eigen::VectorXd& times, const MatRef& inputs,
                          const MatRef& outputs);

}  // namespace ebal
