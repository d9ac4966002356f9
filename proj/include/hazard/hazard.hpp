#pragma once

#include "hazard/belief.hpp"
#include "hazard/cli.hpp"
#include "hazard/config.hpp"
#include "hazard/dispatch.hpp"
#include "hazard/env.hpp"
#include "hazard/errors.hpp"
#include "hazard/geometry.hpp"
#include "hazard/policy.hpp"
#include "hazard/report.hpp"
#include "hazard/rng.hpp"
#include "hazard/vrpp.hpp"
#include "hazard/vrpp_exact.hpp"
#include "hazard/vrpp_heuristic.hpp"
#include "hazard/vrpp_io.hpp"
