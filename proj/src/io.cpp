#include "specsolve/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace specsolve {

std::string fmt5(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.5g", v);
  return buf;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_coefficients_csv(std::ostream& os, const VectorXd& c) {
  os << "j,coefficient\n";
  for (Index j = 0; j < c.size(); ++j) os << j << "," << fmt17(c[j]) << "\n";
}

VectorXd read_coefficients_csv(std::istream& is) {
  std::string line;
  int line_no = 0;
  std::vector<double> vals;
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorKind::ParseError, std::to_string(line_no) + ":1: " + msg);
  };
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != "j,coefficient") fail("expected header 'j,coefficient'");
      continue;
    }
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) fail("expected 'j,coefficient'");
    char* end = nullptr;
    const long j = std::strtol(line.c_str(), &end, 10);
    if (end != line.c_str() + comma || j != static_cast<long>(vals.size()))
      fail("expected index " + std::to_string(vals.size()));
    const char* num = line.c_str() + comma + 1;
    const double v = std::strtod(num, &end);
    if (end == num || *end != '\0') fail("bad coefficient '" + std::string(num) + "'");
    vals.push_back(v);
  }
  if (line_no == 0) throw Error(ErrorKind::ParseError, "1:1: empty coefficient file");
  if (vals.empty()) fail("no coefficients");
  return Eigen::Map<VectorXd>(vals.data(), static_cast<Index>(vals.size()));
}

void save_coefficients(const std::string& path, const VectorXd& c) {
  std::ostringstream os;
  write_coefficients_csv(os, c);
  write_file(path, os.str());
}

VectorXd load_coefficients(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open " + path);
  try {
    return read_coefficients_csv(in);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ParseError) throw;
    const std::string msg = e.what();
    throw Error(ErrorKind::ParseError, path + ":" + msg.substr(msg.find(": ") + 2));
  }
}

Pattern sparsity_pattern(const MatrixXd& a) {
  const double cut = a.size() ? 10 * std::numeric_limits<double>::epsilon() * a.cwiseAbs().maxCoeff() : 0.0;
  return (a.array().abs() > cut).matrix();
}

void write_pgm(std::ostream& os, const Pattern& p) {
  os << "P2\n" << p.cols() << " " << p.rows() << "\n1\n";
  for (Index i = 0; i < p.rows(); ++i) {
    for (Index j = 0; j < p.cols(); ++j) os << (j ? " " : "") << (p(i, j) ? 0 : 1);
    os << "\n";
  }
}

void write_triples(std::ostream& os, const MatrixXd& a, const Pattern& p) {
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      if (p(i, j)) os << i << " " << j << " " << fmt17(a(i, j)) << "\n";
}

void write_file(const std::string& path, const std::string& text) {
  const std::filesystem::path fp(path);
  if (fp.has_parent_path()) std::filesystem::create_directories(fp.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorKind::InvalidArgument, "write failed for " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace specsolve
