#ifndef LDYN_LDYN_HPP
#define LDYN_LDYN_HPP

#include "ldyn/big_float.hpp"
#include "ldyn/conjugacy.hpp"
#include "ldyn/error.hpp"
#include "ldyn/hofbauer.hpp"
#include "ldyn/induced.hpp"
#include "ldyn/interval.hpp"
#include "ldyn/interval_map.hpp"
#include "ldyn/io.hpp"
#include "ldyn/lyapunov.hpp"
#include "ldyn/orbit_design.hpp"
#include "ldyn/symbolic.hpp"

#endif  // LDYN_LDYN_HPP
