// SPDX-License-Identifier: Apache-2.0
//
// Umbrella header.

#pragma once

#include "nfdof/channel.hpp"
#include "nfdof/config.hpp"
#include "nfdof/dof.hpp"
#include "nfdof/geometry.hpp"
#include "nfdof/runner.hpp"
#include "nfdof/spectral.hpp"
