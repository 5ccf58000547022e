#pragma once

#include <stdexcept>
#include <string>

namespace conreg {

// Inconsistent linear system / collection that no single vector solves.
class not_realizable_error : public std::runtime_error {
 public:
  not_realizable_error(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// An iterative routine hit its iteration cap before reaching tolerance.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& what, double last_residual, long iterations)
      : std::runtime_error(what), last_residual_(last_residual), iterations_(iterations) {}
  double last_residual() const noexcept { return last_residual_; }
  long iterations() const noexcept { return iterations_; }

 private:
  double last_residual_;
  long iterations_;
};

// Bad experiment configuration (CLI/config-file level).
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace conreg
