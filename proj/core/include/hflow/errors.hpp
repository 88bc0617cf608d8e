#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hflow {

// Bad argument outside an operation's mathematical domain (r <= 0, k out of range, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Principal curvatures left the admissible cone Gamma_alpha.
class AdmissibilityError : public std::runtime_error {
 public:
  AdmissibilityError(const std::string& what, std::ptrdiff_t node, std::ptrdiff_t component)
      : std::runtime_error(what), node_(node), component_(component) {}

  // -1 when the failure is not tied to a grid node.
  std::ptrdiff_t node() const noexcept { return node_; }
  std::ptrdiff_t component() const noexcept { return component_; }

 private:
  std::ptrdiff_t node_;
  std::ptrdiff_t component_;
};

// Induced metric is no longer positive definite: the radial graph has broken down.
class GeometryDegeneracyError : public std::runtime_error {
 public:
  GeometryDegeneracyError(const std::string& what, std::size_t node)
      : std::runtime_error(what), node_(node) {}
  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

class RecenteringError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Log-linear decay fit could not be performed (non-positive samples, too few points).
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hflow
