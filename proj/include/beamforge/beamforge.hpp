// SPDX-License-Identifier: Apache-2.0
#ifndef BEAMFORGE_BEAMFORGE_HPP
#define BEAMFORGE_BEAMFORGE_HPP

#include "beamforge/baselines.hpp"
#include "beamforge/channel.hpp"
#include "beamforge/designer_inf.hpp"
#include "beamforge/designer_low.hpp"
#include "beamforge/estimator.hpp"
#include "beamforge/manifold.hpp"
#include "beamforge/metrics.hpp"
#include "beamforge/random.hpp"
#include "beamforge/sensing.hpp"
#include "beamforge/types.hpp"

#endif  // BEAMFORGE_BEAMFORGE_HPP
