#pragma once

#include "charbound/additive.hpp"
#include "charbound/algebra_hom.hpp"
#include "charbound/errors.hpp"
#include "charbound/group.hpp"
#include "charbound/harmonic.hpp"
#include "charbound/lab/config.hpp"
#include "charbound/lab/policies.hpp"
#include "charbound/lab/report.hpp"
#include "charbound/lab/sweeps.hpp"
#include "charbound/operators.hpp"
#include "charbound/rng.hpp"
