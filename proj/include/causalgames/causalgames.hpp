#pragma once

// Umbrella header: exact interventional queries on discrete causal models,
// belief-weighted decision problems, causal games with pure-equilibrium
// search, incomplete-information (typed) variants, and a repeated-play
// simulation harness. Everything lives in namespace causalgames.

#include "causalgames/types.hpp"
#include "causalgames/model.hpp"
#include "causalgames/decision.hpp"
#include "causalgames/games.hpp"
#include "causalgames/bayesian.hpp"
#include "causalgames/sim.hpp"
#include "causalgames/io.hpp"
