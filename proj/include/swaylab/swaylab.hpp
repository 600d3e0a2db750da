#pragma once

#include "swaylab/core.hpp"
#include "swaylab/harness.hpp"
#include "swaylab/intrinsic.hpp"
#include "swaylab/metrics.hpp"
#include "swaylab/models/monrp.hpp"
#include "swaylab/models/pom3.hpp"
#include "swaylab/models/xomo.hpp"
#include "swaylab/moea.hpp"
#include "swaylab/stats.hpp"
#include "swaylab/sway.hpp"
