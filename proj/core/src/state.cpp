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

#include "lzs/state.hpp"

#include <cmath>

#include "lzs/errors.hpp"

namespace lzs {

std::string_view to_string(Basis b) {
  return b == Basis::kDiabatic ? "diabatic" : "adiabatic";
}

QubitState::QubitState(Complex amp0, Complex amp1, Basis basis)
    : amp0_(amp0), amp1_(amp1), basis_(basis) {
  const double norm2 = std::norm(amp0) + std::norm(amp1);
  if (!(std::abs(norm2 - 1.0) <= 1e-9)) {
    throw DomainError("QubitState: amplitudes are not normalized (|a0|^2+|a1|^2 = " +
                      std::to_string(norm2) + ")");
  }
}

std::vector<double> Trajectory::p0() const {
  std::vector<double> out;
  out.reserve(populations.size());
  for (const auto& p : populations) out.push_back(p[0]);
  return out;
}

std::vector<double> Trajectory::p1() const {
  std::vector<double> out;
  out.reserve(populations.size());
  for (const auto& p : populations) out.push_back(p[1]);
  return out;
}

Eigen::Matrix2d adiabatic_basis(double epsilon, double delta) {
  const double theta = std::atan2(delta, epsilon);
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  Eigen::Matrix2d b;
  // ground = (-sin, cos), excited = (cos, sin)
  b << -s, c,
        c, s;
  return b;
}

}  // namespace lzs
