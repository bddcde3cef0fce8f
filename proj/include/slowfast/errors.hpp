#pragma once
#include <stdexcept>
#include <string>

namespace slowfast {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// model
struct EvaluationError : Error { using Error::Error; };
struct ModelError : Error { using Error::Error; };
struct DimensionError : Error { using Error::Error; };

// flow
struct StiffnessError : Error { using Error::Error; };
struct DivergenceError : Error { using Error::Error; };

// orbit
struct NoConvergence : Error { using Error::Error; };
using NonConvergence = NoConvergence;
struct SingularJacobian : Error { using Error::Error; };
struct EnergyMismatch : Error { using Error::Error; };
struct AccuracyError : Error { using Error::Error; };
struct ContinuationBreakdown : Error { using Error::Error; };

// slowdrive
struct DomainError : Error { using Error::Error; };
struct DomainExit : Error {
  double tau_exit;
  explicit DomainExit(double tau, const std::string& msg = "trajectory left the domain")
      : Error(msg), tau_exit(tau) {}
};
struct SegmentExit : Error {
  int segment;
  explicit SegmentExit(int i, const std::string& msg = "path segment leaves the domain")
      : Error(msg), segment(i) {}
};
struct NonIncreasingBreakpoints : Error { using Error::Error; };
struct NotAccessible : Error { using Error::Error; };

// horseshoe
struct PreconditionError : Error { using Error::Error; };
struct ParameterError : Error { using Error::Error; };
struct SlowMapNotInvertible : Error { using Error::Error; };

// shadow
struct BlockMismatch : Error { using Error::Error; };
struct EmptyBlock : Error { using Error::Error; };
struct SurfaceWindowExceeded : Error { using Error::Error; };

// cli
struct ConfigError : Error { using Error::Error; };
struct IOError : Error { using Error::Error; };

}  // namespace slowfast
