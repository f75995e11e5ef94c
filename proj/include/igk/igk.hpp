#ifndef IGK_IGK_HPP
#define IGK_IGK_HPP

#include "core.hpp"
#include "dataset.hpp"
#include "pca.hpp"
#include "metric.hpp"
#include "kmeans.hpp"
#include "gaclust.hpp"
#include "refine.hpp"
#include "bench.hpp"

#endif
