#pragma once

#include "hetmed/bounds.hpp"
#include "hetmed/distributions.hpp"
#include "hetmed/estimators.hpp"
#include "hetmed/numeric.hpp"
#include "hetmed/oracles.hpp"
#include "hetmed/random.hpp"
#include "hetmed/simulation.hpp"
#include "hetmed/verification.hpp"
