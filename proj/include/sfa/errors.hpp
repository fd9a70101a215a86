#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sfa {

// An iterative solver failed to reach its tolerance. Maps to CLI exit code 3.
class convergence_error : public std::runtime_error {
 public:
  explicit convergence_error(const std::string& what)
      : std::runtime_error(what) {}
};

// Invalid or inconsistent run configuration; carries every problem found so
// the user can fix them all at once. Maps to CLI exit code 2.
class config_error : public std::runtime_error {
 public:
  explicit config_error(std::vector<std::string> problems)
      : std::runtime_error(join(problems)), problems_(std::move(problems)) {}
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& ps) {
    std::string out;
    for (const auto& p : ps) {
      if (!out.empty()) out += "\n";
      out += p;
    }
    return out;
  }
  std::vector<std::string> problems_;
};

// Filesystem failure while reading inputs or writing outputs. Exit code 4.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sfa
