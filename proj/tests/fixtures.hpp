// Copyright 2026 The hwgff Authors
// SPDX-License-Identifier: Apache-2.0

// Reference values frozen from independent oracles under tools/ and tests/oracles.hpp.
#pragma once

namespace fixtures {

/// Green at the centre of the 3^3 cube, unit conductances (dense inverse, 11/51).
inline constexpr double g_cube3_center = 0.21568627450980396;

/// h_{{0}, B(0,2)} at a neighbour of the origin, unit conductances (dense solve, 37/136).
inline constexpr double h_point_ball2_neighbor = 0.27205882352941191;

/// Expected visits to the origin of simple random walk in Z^3
/// (gsrw_oracle 2000000 10000 20261014, capped mean plus local-CLT tail).
inline constexpr double g_srw = 1.51631012;
inline constexpr double g_srw_se = 0.00062057;

}  // namespace fixtures
