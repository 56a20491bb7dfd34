// Copyright 2026 The lzs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace lzs {

/// Argument outside the mathematical domain of an operation (negative time,
/// non-positive adiabaticity, a trajectory in the wrong basis, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The drive has no sweep: epsilon_m is zero, so there is no crossing and
/// no finite sweep rate.
class DegenerateDriveError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An operation's documented precondition does not hold.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Time integration lost unitarity beyond the configured tolerance.
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The spectrum has no peak that stands out of the noise floor.
class NoOscillationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A nonlinear least-squares fit did not converge or the data carries no
/// information about the model.
class FitError : public std::runtime_error {
 public:
  FitError(const std::string& what, double residual_rms, int iterations)
      : std::runtime_error(what), residual_rms_(residual_rms), iterations_(iterations) {}

  double residual_rms() const { return residual_rms_; }
  int iterations() const { return iterations_; }

 private:
  double residual_rms_;
  int iterations_;
};

}  // namespace lzs
