#pragma once

#include "errors.hpp"
#include "ffield.hpp"
#include "extfield.hpp"
#include "poly.hpp"
#include "circuit.hpp"
#include "transforms.hpp"
#include "slp.hpp"
#include "ubit.hpp"
#include "families.hpp"
#include "universal.hpp"
#include "coeffx.hpp"
#include "cnf.hpp"
#include "oracles.hpp"
#include "encode_fixed.hpp"
#include "encode_bits.hpp"
#include "generators.hpp"
#include "proofcheck.hpp"
