#pragma once

#include "carpetdim/carpet.hpp"
#include "carpetdim/carpet_io.hpp"
#include "carpetdim/counting.hpp"
#include "carpetdim/dimension.hpp"
#include "carpetdim/errors.hpp"
#include "carpetdim/frontier.hpp"
#include "carpetdim/optimizer.hpp"
#include "carpetdim/parallel.hpp"
#include "carpetdim/reports.hpp"
#include "carpetdim/rng.hpp"
#include "carpetdim/schedule.hpp"
#include "carpetdim/word.hpp"
