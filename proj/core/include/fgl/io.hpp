#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "fgl/linalg.hpp"

namespace fgl {

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// SMC text format:
//   SMC 1 <p> <L>
//   L blocks of p lines with p floats each; '#' lines are comments.
MatrixCollection read_smc(std::istream& in);
MatrixCollection read_smc_file(const std::string& path);
void write_smc(std::ostream& out, const MatrixCollection& x);
void write_smc_file(const std::string& path, const MatrixCollection& x);

// Observation format: header "OBS <N> <p>" then N rows of p floats.
Matrix read_obs(std::istream& in);
Matrix read_obs_file(const std::string& path);
void write_obs(std::ostream& out, const Matrix& rows);
void write_obs_file(const std::string& path, const Matrix& rows);

}  // namespace fgl
