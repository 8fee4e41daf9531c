#pragma once

#include <stdexcept>
#include <string>

namespace vlmc {

/// A documented precondition of an operation was violated by its inputs.
/// The CLI maps this to exit code 1.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reading or writing a file failed. The CLI maps this to exit code 2.
class IoError : public std::runtime_error {
 public:
  IoError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace vlmc
