#pragma once
// Exception taxonomy. Every throwing precondition in the library uses one of
// these so callers (and the CLI exit-code mapping) can tell configuration
// mistakes from numerical degeneracies.

#include <stdexcept>
#include <string>

namespace liesphere {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// numerics / domain
struct StencilOutOfDomain : Error { using Error::Error; };
struct DomainViolation : Error { using Error::Error; };
struct ZeroPotential : Error { using Error::Error; };
struct OdeBlowUp : Error { using Error::Error; };
struct StepFailure : Error { using Error::Error; };
struct DegenerateJet : Error { using Error::Error; };

// geometry
struct PlaneAtInfinity : Error { using Error::Error; };
struct UmbilicDegeneracy : Error { using Error::Error; };
struct DependentVectors : Error { using Error::Error; };
struct DegenerateParametrization : Error { using Error::Error; };
struct MetricDegenerate : Error { using Error::Error; };
struct PoleOnGrid : Error { using Error::Error; };
struct InvalidFrame : Error { using Error::Error; };

// configuration / io
struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace liesphere
