#pragma once

#include "ncrank/rational.hpp"
#include "ncrank/cyclotomic.hpp"
#include "ncrank/bipoly.hpp"
#include "ncrank/field_scalar.hpp"
#include "ncrank/scalar_format.hpp"
#include "ncrank/matrix.hpp"
#include "ncrank/linalg.hpp"
#include "ncrank/pencil.hpp"
#include "ncrank/abp.hpp"
#include "ncrank/division_algebra.hpp"
#include "ncrank/rank_core.hpp"
#include "ncrank/oracle.hpp"
#include "ncrank/io.hpp"
