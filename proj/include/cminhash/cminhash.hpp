#pragma once

#include "cminhash/core.hpp"
#include "cminhash/rng.hpp"
#include "cminhash/perm.hpp"
#include "cminhash/sketch.hpp"
#include "cminhash/numeric.hpp"
#include "cminhash/theory.hpp"
#include "cminhash/oracle.hpp"
#include "cminhash/harness.hpp"
#include "cminhash/config.hpp"
