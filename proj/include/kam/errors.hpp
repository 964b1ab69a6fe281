#pragma once
#include <stdexcept>
#include <string>
#include <vector>

namespace kam {

// Every refusal path in the solver family carries enough provenance to see
// which harmonic / mode pair tripped it.
struct Error : std::runtime_error {
  explicit Error(const std::string& m) : std::runtime_error(m) {}
};

struct DimensionMismatch : Error { using Error::Error; };
struct NonzeroAverage    : Error { using Error::Error; };
struct DivergentSeries   : Error { using Error::Error; };
struct PicardDivergence  : Error { using Error::Error; };
struct StripViolation    : Error { using Error::Error; };
struct NonContraction    : Error { using Error::Error; };
struct SingularSystem    : Error { using Error::Error; };
struct RadiusViolation   : Error { using Error::Error; };
struct BudgetExceeded    : Error { using Error::Error; };
struct SeriesStagnation  : Error { using Error::Error; };
struct GuardViolation    : Error { using Error::Error; };
struct ModeOutOfRange    : Error { using Error::Error; };
struct DegeneratePair    : Error { using Error::Error; };
struct IllConditionedFit : Error { using Error::Error; };
struct NonBoxBase        : Error { using Error::Error; };

struct SmallDivisor : Error {
  std::vector<int> k;      // offending harmonic
  int i = 0, j = 0;        // mode pair when applicable (0 = n/a)
  double value = 0.0;      // |divisor|
  double bound = 0.0;      // required lower bound
  SmallDivisor(std::string m, std::vector<int> k_, double val, double bnd,
               int i_ = 0, int j_ = 0)
      : Error(std::move(m)), k(std::move(k_)), i(i_), j(j_), value(val), bound(bnd) {}
};

}  // namespace kam
