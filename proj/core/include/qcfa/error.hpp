#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qcfa {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class IllegalSymbol : public Error {
 public:
  IllegalSymbol(int track, std::size_t index, char symbol)
      : Error("illegal symbol '" + std::string(1, symbol) + "' on track " +
              (track == 0 ? "I" : "II") + " at index " + std::to_string(index)),
        track_(track),
        index_(index) {}
  int track() const { return track_; }
  std::size_t index() const { return index_; }

 private:
  int track_;
  std::size_t index_;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

class InvertedBounds : public Error {
 public:
  using Error::Error;
};

class StepCapExceeded : public Error {
 public:
  explicit StepCapExceeded(std::uint64_t cap)
      : Error("trial exceeded the step cap of " + std::to_string(cap)), cap_(cap) {}
  std::uint64_t cap() const { return cap_; }

 private:
  std::uint64_t cap_;
};

class PrecisionInsufficient : public Error {
 public:
  using Error::Error;
};

class NonTerminating : public Error {
 public:
  using Error::Error;
};

class StepLimit : public Error {
 public:
  using Error::Error;
};

class IllegalTransition : public Error {
 public:
  using Error::Error;
};

class RangeUnverified : public Error {
 public:
  using Error::Error;
};

class TooLarge : public Error {
 public:
  using Error::Error;
};

class NotInDomain : public Error {
 public:
  using Error::Error;
};

class Infeasible : public Error {
 public:
  using Error::Error;
};

class InsufficientPoints : public Error {
 public:
  using Error::Error;
};

class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace qcfa
