#pragma once

#include "shiftlab/bigmath.hpp"
#include "shiftlab/classifiers.hpp"
#include "shiftlab/construction.hpp"
#include "shiftlab/errors.hpp"
#include "shiftlab/report.hpp"
#include "shiftlab/rle.hpp"
#include "shiftlab/scaled.hpp"
#include "shiftlab/shifts.hpp"
#include "shiftlab/systems.hpp"
#include "shiftlab/verdict.hpp"
#include "shiftlab/weights.hpp"
