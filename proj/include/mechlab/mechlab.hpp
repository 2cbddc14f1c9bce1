#pragma once

#include "mechlab/audit.hpp"
#include "mechlab/config.hpp"
#include "mechlab/core.hpp"
#include "mechlab/distributions.hpp"
#include "mechlab/experiment.hpp"
#include "mechlab/frontier.hpp"
#include "mechlab/linalg.hpp"
#include "mechlab/math.hpp"
#include "mechlab/mechanisms.hpp"
#include "mechlab/oracle.hpp"
#include "mechlab/payoff.hpp"
#include "mechlab/rng.hpp"
#include "mechlab/stats.hpp"
