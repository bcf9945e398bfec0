#pragma once

#include <stdexcept>
#include <string>

namespace spectrakit {

/// Base error. `exit_code` follows the CLI convention:
/// 2 parse, 3 precondition, 4 numerical non-convergence.
class error : public std::runtime_error {
 public:
  error(std::string what, int exit_code)
      : std::runtime_error(std::move(what)), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

class parse_error : public error {
 public:
  explicit parse_error(const std::string& what) : error(what, 2) {}
};

class precondition_error : public error {
 public:
  explicit precondition_error(const std::string& what) : error(what, 3) {}
};

class convergence_error : public error {
 public:
  explicit convergence_error(const std::string& what) : error(what, 4) {}
};

struct malformed_envelope : precondition_error {
  explicit malformed_envelope(const std::string& w) : precondition_error("MalformedEnvelope: " + w) {}
};
struct nonvanishing_tail : precondition_error {
  explicit nonvanishing_tail(const std::string& w) : precondition_error("NonvanishingTail: " + w) {}
};
struct not_self_adjoint : precondition_error {
  explicit not_self_adjoint(const std::string& w) : precondition_error("NotSelfAdjoint: " + w) {}
};
struct not_hermitian : precondition_error {
  explicit not_hermitian(const std::string& w) : precondition_error("NotHermitian: " + w) {}
};
struct not_positive : precondition_error {
  explicit not_positive(const std::string& w) : precondition_error("NotPositive: " + w) {}
};
struct not_invertible : precondition_error {
  explicit not_invertible(const std::string& w) : precondition_error("NotInvertible: " + w) {}
};
struct sign_undecidable : precondition_error {
  explicit sign_undecidable(const std::string& w) : precondition_error("SignUndecidable: " + w) {}
};
struct unsupported_polar : precondition_error {
  explicit unsupported_polar(const std::string& w) : precondition_error("UnsupportedPolar: " + w) {}
};
struct uncertifiable_kernel : precondition_error {
  explicit uncertifiable_kernel(const std::string& w) : precondition_error("UncertifiableKernel: " + w) {}
};
struct invalid_triple : precondition_error {
  explicit invalid_triple(const std::string& w) : precondition_error("InvalidTriple: " + w) {}
};
struct precondition_failed : precondition_error {
  explicit precondition_failed(const std::string& w) : precondition_error("PreconditionFailed: " + w) {}
};
struct phase_condition_failed : precondition_error {
  explicit phase_condition_failed(const std::string& w) : precondition_error("PhaseConditionFailed: " + w) {}
};
struct norm_not_attained : precondition_error {
  explicit norm_not_attained(const std::string& w) : precondition_error("NormNotAttained: " + w) {}
};
struct beta_outside_essential_range : precondition_error {
  explicit beta_outside_essential_range(const std::string& w)
      : precondition_error("BetaOutsideEssentialRange: " + w) {}
};
struct no_witness_found : precondition_error {
  explicit no_witness_found(const std::string& w) : precondition_error("NoWitnessFound: " + w) {}
};
struct no_convergence : convergence_error {
  explicit no_convergence(const std::string& w) : convergence_error("NoConvergence: " + w) {}
};

}  // namespace spectrakit
