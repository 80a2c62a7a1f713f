#ifndef AGEG_AGEG_HPP
#define AGEG_AGEG_HPP

#include "ageg/error.hpp"
#include "ageg/random.hpp"
#include "ageg/core_model.hpp"
#include "ageg/problem_io.hpp"
#include "ageg/oracles.hpp"
#include "ageg/schedules.hpp"
#include "ageg/trace.hpp"
#include "ageg/solvers.hpp"
#include "ageg/generators.hpp"
#include "ageg/verify.hpp"
#include "ageg/config.hpp"

#endif  // AGEG_AGEG_HPP
