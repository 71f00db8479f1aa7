#pragma once

#include "nlot/action.hpp"
#include "nlot/analysis.hpp"
#include "nlot/dynamics.hpp"
#include "nlot/geodesic.hpp"
#include "nlot/io.hpp"
#include "nlot/kernel.hpp"
#include "nlot/means.hpp"
#include "nlot/semigroup.hpp"
#include "nlot/state_space.hpp"
#include "nlot/suite.hpp"
#include "nlot/util.hpp"
