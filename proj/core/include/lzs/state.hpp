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

#include <array>
#include <complex>
#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace lzs {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using Vector2c = Eigen::Vector2cd;

enum class Basis { kDiabatic, kAdiabatic };

std::string_view to_string(Basis b);

/// Normalized two-component amplitude vector. In the diabatic basis the
/// components are |0> = |m_s=0> and |1> = |m_s=+1>; in the adiabatic basis
/// they are (ground, excited) of the instantaneous Hamiltonian.
class QubitState {
 public:
  /// Throws DomainError unless |amp0|^2 + |amp1|^2 = 1 within 1e-9.
  QubitState(Complex amp0, Complex amp1, Basis basis = Basis::kDiabatic);

  static QubitState zero() { return {1.0, 0.0}; }
  static QubitState one() { return {0.0, 1.0}; }
  static QubitState from_vector(const Vector2c& v, Basis basis = Basis::kDiabatic) {
    return {v(0), v(1), basis};
  }

  Complex amp0() const { return amp0_; }
  Complex amp1() const { return amp1_; }
  Basis basis() const { return basis_; }
  Vector2c vector() const { return Vector2c(amp0_, amp1_); }
  std::array<double, 2> populations() const { return {std::norm(amp0_), std::norm(amp1_)}; }

 private:
  Complex amp0_;
  Complex amp1_;
  Basis basis_;
};

/// Sampled time evolution. `populations[i]` is (P0, P1) in the diabatic basis
/// and (P_ground, P_excited) in the adiabatic basis. `states` is empty for
/// ensemble averages, which are mixed states.
struct Trajectory {
  std::vector<double> times_ns;
  std::vector<Vector2c> states;
  std::vector<std::array<double, 2>> populations;
  Basis basis = Basis::kDiabatic;

  std::size_t size() const { return times_ns.size(); }
  bool has_states() const { return !states.empty(); }
  std::vector<double> p0() const;
  std::vector<double> p1() const;
};

/// Instantaneous eigenbasis of eps/2 sigma_z + delta/2 sigma_x as the columns
/// (ground, excited) of a real orthogonal matrix. Uses the mixing angle
/// theta = atan2(delta, eps) in [0, pi]; the gauge is smooth in eps for
/// delta > 0 and is the one the transfer-matrix phases are defined in.
Eigen::Matrix2d adiabatic_basis(double epsilon, double delta);

}  // namespace lzs
