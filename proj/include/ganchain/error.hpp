#pragma once

#include <stdexcept>
#include <string>

namespace ganchain {

// Error taxonomy shared by the library and the CLI. Each kind maps to a
// distinct process exit code so scripts can tell misuse apart from broken
// artifacts or diverged training runs.
enum class ErrorKind {
  Argument,     // bad parameter value or shape
  Configuration,// inconsistent experiment setup (lineage/variant mismatch, ...)
  Ingestion,    // unreadable or corrupt corpus
  Dependency,   // required artifact missing / stage prerequisites not met
  Integrity,    // checkpoint or report fails its hash / version check
  Divergence,   // training produced non-finite losses
};

inline int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::Argument: return 2;
    case ErrorKind::Configuration: return 3;
    case ErrorKind::Ingestion: return 4;
    case ErrorKind::Dependency: return 5;
    case ErrorKind::Integrity: return 6;
    case ErrorKind::Divergence: return 7;
  }
  return 1;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct ArgumentError : Error {
  explicit ArgumentError(const std::string& m) : Error(ErrorKind::Argument, m) {}
};
struct ConfigurationError : Error {
  explicit ConfigurationError(const std::string& m) : Error(ErrorKind::Configuration, m) {}
};
struct IngestionError : Error {
  explicit IngestionError(const std::string& m) : Error(ErrorKind::Ingestion, m) {}
};
struct DependencyError : Error {
  explicit DependencyError(const std::string& m) : Error(ErrorKind::Dependency, m) {}
};
struct IntegrityError : Error {
  explicit IntegrityError(const std::string& m) : Error(ErrorKind::Integrity, m) {}
};
struct DivergenceError : Error {
  explicit DivergenceError(const std::string& m) : Error(ErrorKind::Divergence, m) {}
};

// Shape mismatches are argument errors with their own type so tests can
// tell them apart.
struct ShapeError : Error {
  explicit ShapeError(const std::string& m) : Error(ErrorKind::Argument, m) {}
};

}  // namespace ganchain
