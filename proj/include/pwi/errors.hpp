#pragma once

#include <functional>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pwi {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Perturbation radius outside the admissible range for the requested policy.
class AdmissibilityError : public Error {
 public:
  using Error::Error;
};

/// Finite section whose exponential Gram is numerically singular.
class DegenerateSection : public Error {
 public:
  using Error::Error;
};

/// A quadrature rule did not reach its tolerance before the refinement cap.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// Both the factorization and the iterative fallback failed on a Gram system.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

using WarningHandler = std::function<void(std::string_view)>;

namespace detail {
inline WarningHandler& warning_handler() {
  static WarningHandler handler = [](std::string_view msg) {
    std::cerr << "warning: " << msg << '\n';
  };
  return handler;
}
inline std::mutex& warning_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

/// Replace the sink for non-fatal diagnostics. Returns the previous handler.
inline WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(detail::warning_mutex());
  auto old = std::move(detail::warning_handler());
  detail::warning_handler() = std::move(handler);
  return old;
}

inline void warn(std::string_view msg) {
  std::lock_guard lock(detail::warning_mutex());
  if (detail::warning_handler()) detail::warning_handler()(msg);
}

}  // namespace pwi
