#include "fgl/io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace fgl {
namespace {

// Pulls whitespace-separated tokens, skipping '#' comment lines and blanks.
class TokenReader {
 public:
  explicit TokenReader(std::istream& in) : in_(in) {}

  bool next(std::string& tok) {
    while (!(line_ >> tok)) {
      std::string raw;
      if (!std::getline(in_, raw)) return false;
      ++lineno_;
      const auto first = raw.find_first_not_of(" \t\r");
      if (first == std::string::npos || raw[first] == '#') raw.clear();
      line_.clear();
      line_.str(raw);
    }
    return true;
  }

  std::string expect(const char* what) {
    std::string tok;
    if (!next(tok)) throw FormatError(std::string("unexpected end of input reading ") + what);
    return tok;
  }

  double number(const char* what) {
    const std::string tok = expect(what);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size())
      throw FormatError("line " + std::to_string(lineno_) + ": bad number '" + tok + "'");
    return v;
  }

  long integer(const char* what) {
    const std::string tok = expect(what);
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || v < 0)
      throw FormatError("line " + std::to_string(lineno_) + ": bad integer '" + tok + "'");
    return v;
  }

  bool at_end() {
    std::string tok;
    return !next(tok);
  }

 private:
  std::istream& in_;
  std::istringstream line_;
  long lineno_ = 0;
};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  return in;
}

}  // namespace

MatrixCollection read_smc(std::istream& in) {
  TokenReader rd(in);
  if (rd.expect("magic") != "SMC") throw FormatError("SMC: missing 'SMC' magic");
  if (rd.integer("version") != 1) throw FormatError("SMC: unsupported version");
  const long p = rd.integer("p");
  const long num = rd.integer("L");
  if (p == 0 || num == 0) throw FormatError("SMC: p and L must be positive");
  std::vector<Matrix> mats(static_cast<std::size_t>(num), Matrix(p, p));
  for (auto& m : mats)
    for (long i = 0; i < p; ++i)
      for (long j = 0; j < p; ++j) m(i, j) = rd.number("matrix entry");
  if (!rd.at_end()) throw FormatError("SMC: trailing data after last block");
  return MatrixCollection(std::move(mats));
}

MatrixCollection read_smc_file(const std::string& path) {
  auto in = open_in(path);
  return read_smc(in);
}

void write_smc(std::ostream& out, const MatrixCollection& x) {
  out << "SMC 1 " << x.dim() << ' ' << x.size() << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t l = 0; l < x.size(); ++l) {
    out << "# class " << (l + 1) << '\n';
    const Matrix& m = x[l];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (j) out << ' ';
        out << m(i, j);
      }
      out << '\n';
    }
  }
}

void write_smc_file(const std::string& path, const MatrixCollection& x) {
  auto out = open_out(path);
  write_smc(out, x);
}

Matrix read_obs(std::istream& in) {
  TokenReader rd(in);
  if (rd.expect("magic") != "OBS") throw FormatError("OBS: missing 'OBS' header");
  const long n = rd.integer("N");
  const long p = rd.integer("p");
  if (p == 0) throw FormatError("OBS: p must be positive");
  Matrix rows(n, p);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < p; ++j) rows(i, j) = rd.number("observation");
  if (!rd.at_end()) throw FormatError("OBS: trailing data after last row");
  return rows;
}

Matrix read_obs_file(const std::string& path) {
  auto in = open_in(path);
  return read_obs(in);
}

void write_obs(std::ostream& out, const Matrix& rows) {
  out << "OBS " << rows.rows() << ' ' << rows.cols() << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) {
      if (j) out << ' ';
      out << rows(i, j);
    }
    out << '\n';
  }
}

void write_obs_file(const std::string& path, const Matrix& rows) {
  auto out = open_out(path);
  write_obs(out, rows);
}

}  // namespace fgl
