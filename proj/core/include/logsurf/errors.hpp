#pragma once

#include <stdexcept>
#include <string>

namespace logsurf {

/// Violated precondition or invalid input data. CLI exit code 1.
class domain_error : public std::runtime_error {
 public:
  explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

/// A configured resource budget (enumeration depth, step count, table size)
/// was exceeded. CLI exit code 1.
class resource_error : public domain_error {
 public:
  explicit resource_error(const std::string& what) : domain_error(what) {}
};

/// Replay of a certificate or report did not reproduce the recorded data.
/// CLI exit code 2. Carries the stage or field that failed to re-verify.
class verify_error : public std::runtime_error {
 public:
  verify_error(const std::string& stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// Malformed or unrecognized input document. CLI exit code 3.
/// `path` is the JSON field path of the offending value.
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& path, const std::string& what)
      : std::runtime_error(path.empty() ? what : what + " (at " + path + ")"),
        path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace logsurf
