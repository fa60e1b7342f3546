#ifndef UAVMEC__UAVMEC_HPP_
#define UAVMEC__UAVMEC_HPP_

#include "barrier.hpp"
#include "baselines.hpp"
#include "channel.hpp"
#include "config.hpp"
#include "episode.hpp"
#include "geometry.hpp"
#include "lyapunov.hpp"
#include "mobility.hpp"
#include "rng.hpp"
#include "sca.hpp"
#include "solver.hpp"
#include "surrogates.hpp"
#include "system.hpp"
#include "trace.hpp"

#endif  // UAVMEC__UAVMEC_HPP_
