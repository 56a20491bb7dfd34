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

#include <numbers>

// Public quantities are ordinary frequencies in MHz and times in ns (or us
// where the name says so). The dynamics run in angular frequency; with times
// in ns the natural internal unit is rad/ns.
namespace lzs::units {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// MHz -> rad/ns.
constexpr double angular_from_mhz(double f_mhz) { return kTwoPi * f_mhz * 1e-3; }

/// rad/ns -> MHz.
constexpr double mhz_from_angular(double w_rad_per_ns) { return w_rad_per_ns / (kTwoPi * 1e-3); }

constexpr double ns_from_us(double t_us) { return t_us * 1e3; }
constexpr double us_from_ns(double t_ns) { return t_ns * 1e-3; }

}  // namespace lzs::units
