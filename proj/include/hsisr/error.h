#ifndef HSISR_ERROR_H_
#define HSISR_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hsisr {

// Broad failure classes. The CLI maps them onto exit codes 2, 3 and 4.
enum class ErrorKind {
  kInvalidArgument,
  kFormat,
  kNumerical,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Rejected input: shape mismatches, out-of-range configuration values.
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& message)
      : Error(ErrorKind::kInvalidArgument, message) {}
};

// Malformed file content. `offset` is the byte position in the offending file.
class FormatError : public Error {
 public:
  FormatError(const std::string& file, std::size_t offset,
              const std::string& message)
      : Error(ErrorKind::kFormat, file + ": byte " + std::to_string(offset) +
                                      ": " + message),
        file_(file),
        offset_(offset) {}

  const std::string& file() const { return file_; }
  std::size_t offset() const { return offset_; }

 private:
  std::string file_;
  std::size_t offset_;
};

// Singular matrices, failed extraction, runaway generators.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& message)
      : Error(ErrorKind::kNumerical, message) {}
};

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
      return 2;
    case ErrorKind::kFormat:
      return 3;
    case ErrorKind::kNumerical:
      return 4;
  }
  return 1;
}

}  // namespace hsisr

#endif  // HSISR_ERROR_H_
