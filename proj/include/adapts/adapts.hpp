#pragma once

#include "agents.hpp"
#include "bandit.hpp"
#include "belief.hpp"
#include "config.hpp"
#include "csv.hpp"
#include "experiments.hpp"
#include "pts.hpp"
#include "rng.hpp"
#include "run.hpp"
#include "strategy.hpp"
