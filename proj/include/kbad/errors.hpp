#pragma once

#include <stdexcept>
#include <string>

namespace kbad {

// Base of every error raised by the library. name() is the stable
// identifier printed by the CLI and matched by tests.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& what)
      : std::runtime_error(name + ": " + what), name_(std::move(name)), detail_(what) {}
  const std::string& name() const { return name_; }
  // what() without the leading name.
  const std::string& detail() const { return detail_; }

 private:
  std::string name_;
  std::string detail_;
};

#define KBAD_DEFINE_ERROR(Name)                                         \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& what) : Error(#Name, what) {}      \
  }

// numberfield
KBAD_DEFINE_ERROR(NotTotallyReal);
KBAD_DEFINE_ERROR(NotSquarefree);
KBAD_DEFINE_ERROR(NotIrreducible);
KBAD_DEFINE_ERROR(BasisNotClosed);
KBAD_DEFINE_ERROR(InvalidField);
KBAD_DEFINE_ERROR(ZeroElement);
KBAD_DEFINE_ERROR(PrecisionExhausted);
KBAD_DEFINE_ERROR(ArithmeticOverflow);
KBAD_DEFINE_ERROR(InvalidWeights);
// badset
KBAD_DEFINE_ERROR(DenominatorNotAdmissible);
// game_engine
KBAD_DEFINE_ERROR(ParameterOutOfRange);
KBAD_DEFINE_ERROR(IllegalMove);
KBAD_DEFINE_ERROR(WrongTurn);
// alice_strategy
KBAD_DEFINE_ERROR(UniquenessViolation);
KBAD_DEFINE_ERROR(IncompleteEnumeration);
// bob_adversaries
KBAD_DEFINE_ERROR(NoFeasibleBall);
KBAD_DEFINE_ERROR(ParseError);
// dynamics
KBAD_DEFINE_ERROR(SingularBasis);
KBAD_DEFINE_ERROR(ConditionTooHigh);
// cli / config
KBAD_DEFINE_ERROR(ConfigError);

#undef KBAD_DEFINE_ERROR

}  // namespace kbad
