#pragma once

#include "causim/dagmodel.hpp"
#include "causim/errors.hpp"
#include "causim/exact.hpp"
#include "causim/io.hpp"
#include "causim/population.hpp"
#include "causim/rational.hpp"
#include "causim/rng.hpp"
#include "causim/tables.hpp"
#include "causim/trial.hpp"
