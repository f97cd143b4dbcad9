#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace corrgan {

inline constexpr int kImageSize = 32;
inline constexpr int kImageChannels = 3;
inline constexpr int kNumClasses = 10;
inline constexpr int kDatasetFormatVersion = 1;
inline constexpr int kCheckpointFormatVersion = 1;
inline constexpr int kManifestFormatVersion = 1;
inline constexpr int kReportFormatVersion = 1;

// Probabilities from the discriminator are clamped into [kProbEps, 1-kProbEps]
// before any log is taken.
inline constexpr double kProbEps = 1e-7;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

class UnsupportedCorruption : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class ChecksumError : public Error {
 public:
  using Error::Error;
};

class ManifestError : public Error {
 public:
  using Error::Error;
};

}  // namespace corrgan
