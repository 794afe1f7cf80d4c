#pragma once

// Umbrella header for the whole toolkit.

#include <knnup/arith.hpp>
#include <knnup/bench.hpp>
#include <knnup/bilinear.hpp>
#include <knnup/cifar.hpp>
#include <knnup/downsample.hpp>
#include <knnup/errors.hpp>
#include <knnup/image.hpp>
#include <knnup/image_io.hpp>
#include <knnup/metrics.hpp>
#include <knnup/png.hpp>
#include <knnup/ppm.hpp>
#include <knnup/sat.hpp>
#include <knnup/selective.hpp>
#include <knnup/upsample.hpp>
