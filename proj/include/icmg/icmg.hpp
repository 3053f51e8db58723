#pragma once

#include "edge_space.hpp"
#include "ic_model.hpp"
#include "io.hpp"
#include "probability.hpp"
#include "rng.hpp"
#include "sampling.hpp"
#include "shards.hpp"
#include "tournaments.hpp"
#include "version.hpp"
#include "voting.hpp"
