#pragma once

// Everything except the command-line layer (favard/cli/*).

#include "favard/errors.hpp"
#include "favard/precision.hpp"
#include "favard/poly.hpp"
#include "favard/dense.hpp"
#include "favard/banded.hpp"
#include "favard/bidiagonal.hpp"
#include "favard/jacobi.hpp"
#include "favard/mixed.hpp"
#include "favard/moments.hpp"
#include "favard/ensemble.hpp"
