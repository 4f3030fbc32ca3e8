#pragma once

#include "pyramid/behavior.hpp"
#include "pyramid/chsh.hpp"
#include "pyramid/errors.hpp"
#include "pyramid/geometry.hpp"
#include "pyramid/io.hpp"
#include "pyramid/models.hpp"
#include "pyramid/montecarlo.hpp"
#include "pyramid/random.hpp"
#include "pyramid/sampler.hpp"
