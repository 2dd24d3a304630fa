#ifndef AGAN_ERRORS_HPP
#define AGAN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace agan {

/// Invalid argument or contract violation on a public operation.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input file (bad magic, truncated payload, bad record).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Files that are individually valid but mutually inconsistent.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training diverged (non-finite loss). Carries the step index.
class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, long step)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"),
        step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

/// Checkpoint payload failed its checksum.
class CorruptCheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Checkpoint format version not understood by this build.
class VersionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File system failure while reading or writing artifacts.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace agan

#endif  // AGAN_ERRORS_HPP
