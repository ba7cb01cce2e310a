#pragma once

// Umbrella header.

#include "deojet/decomposition.hpp"
#include "deojet/energy.hpp"
#include "deojet/generator.hpp"
#include "deojet/jet.hpp"
#include "deojet/operators.hpp"
#include "deojet/verify.hpp"
#include "deojet/wavefield.hpp"
