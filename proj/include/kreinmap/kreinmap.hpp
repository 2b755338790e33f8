#pragma once

#include "kreinmap/dirac_verify.hpp"
#include "kreinmap/errors.hpp"
#include "kreinmap/factorization.hpp"
#include "kreinmap/fields.hpp"
#include "kreinmap/forward_map.hpp"
#include "kreinmap/inverse_map.hpp"
#include "kreinmap/parallel.hpp"
#include "kreinmap/quadops.hpp"
