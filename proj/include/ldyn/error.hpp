#ifndef LDYN_ERROR_HPP
#define LDYN_ERROR_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ldyn {

enum class ErrorKind {
  invalid_argument,
  unknown_family,
  parameter_out_of_range,
  domain_escape,
  derivative_zero,
  empty_intersection,
  not_unimodal,
  kneading_mismatch,
  empty_cylinder,
  precision_exhausted,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::unknown_family: return "unknown_family";
    case ErrorKind::parameter_out_of_range: return "parameter_out_of_range";
    case ErrorKind::domain_escape: return "domain_escape";
    case ErrorKind::derivative_zero: return "derivative_zero";
    case ErrorKind::empty_intersection: return "empty_intersection";
    case ErrorKind::not_unimodal: return "not_unimodal";
    case ErrorKind::kneading_mismatch: return "kneading_mismatch";
    case ErrorKind::empty_cylinder: return "empty_cylinder";
    case ErrorKind::precision_exhausted: return "precision_exhausted";
  }
  return "unknown";
}

/// Structured computation error. `index()` carries the offending orbit step when relevant.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, std::optional<std::size_t> index = std::nullopt)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), index_(index) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
  [[nodiscard]] std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> index_;
};

}  // namespace ldyn

#endif  // LDYN_ERROR_HPP
