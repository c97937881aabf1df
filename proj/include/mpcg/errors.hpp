#pragma once

#include <stdexcept>
#include <string>

namespace mpcg {

/// Direct factorization hit a pivot below the singularity threshold.
struct SingularMatrix : std::runtime_error {
  explicit SingularMatrix(const std::string& what) : std::runtime_error(what) {}
};

/// ILUT factorization produced an unusable pivot; callers fall back to
/// the Jacobi preconditioner.
struct ZeroPivot : std::runtime_error {
  int row;
  explicit ZeroPivot(int r)
      : std::runtime_error("zero pivot in row " + std::to_string(r)), row(r) {}
};

/// Jacobi fallback requires a nonzero diagonal.
struct ZeroDiagonal : std::runtime_error {
  int row;
  explicit ZeroDiagonal(int r)
      : std::runtime_error("zero diagonal entry in row " + std::to_string(r)),
        row(r) {}
};

/// Policy file has an incompatible version or table shape.
struct FormatVersionMismatch : std::runtime_error {
  explicit FormatVersionMismatch(const std::string& what)
      : std::runtime_error(what) {}
};

/// Policy file failed its checksum or contains invalid data.
struct CorruptFile : std::runtime_error {
  explicit CorruptFile(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyInput : std::invalid_argument {
  explicit EmptyInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Invalid configuration; maps to CLI exit code 1.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem failure; maps to CLI exit code 2.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mpcg
