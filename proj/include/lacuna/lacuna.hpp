#pragma once

#include "analysis.hpp"
#include "arith.hpp"
#include "dsl.hpp"
#include "error.hpp"
#include "fixtures.hpp"
#include "lacunary.hpp"
#include "modulus.hpp"
#include "parallel.hpp"
#include "report.hpp"
#include "separator.hpp"
#include "sequence.hpp"
#include "suite.hpp"
#include "theorems.hpp"
