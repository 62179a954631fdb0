#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace isac {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class SingularityError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Non-finite cost or gradient. `iterate()` is the solver iteration at which
/// it was detected, or -1 when not raised from inside an iteration.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what, long iterate = -1)
      : Error(what), iterate_(iterate) {}
  long iterate() const { return iterate_; }

 private:
  long iterate_;
};

/// Configuration rejected; one entry per offending field.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems)
      : Error(join(problems)), problems_(std::move(problems)) {}
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out = "invalid configuration";
    for (const auto& s : items) out += "\n  " + s;
    return out;
  }
  std::vector<std::string> problems_;
};

/// Re Tr(a^H b): the real Frobenius inner product.
inline double real_inner(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("real_inner: shape mismatch");
  }
  double acc = 0.0;
  const Complex* pa = a.data();
  const Complex* pb = b.data();
  for (Index i = 0, n = a.size(); i < n; ++i) {
    acc += pa[i].real() * pb[i].real() + pa[i].imag() * pb[i].imag();
  }
  return acc;
}

}  // namespace isac
