#pragma once

// Umbrella header for the whole library.

#include "ltddm/checkpoint.hpp"
#include "ltddm/datasets.hpp"
#include "ltddm/errors.hpp"
#include "ltddm/event_stream.hpp"
#include "ltddm/learning.hpp"
#include "ltddm/metrics.hpp"
#include "ltddm/network.hpp"
#include "ltddm/ste.hpp"
#include "ltddm/svg.hpp"
#include "ltddm/units.hpp"
