#pragma once

#include "ordx/block_json.hpp"
#include "ordx/brc20.hpp"
#include "ordx/chain.hpp"
#include "ordx/error.hpp"
#include "ordx/indexer.hpp"
#include "ordx/inscription.hpp"
#include "ordx/metrics.hpp"
#include "ordx/ordinals.hpp"
#include "ordx/psbt.hpp"
#include "ordx/scenario.hpp"
#include "ordx/trade.hpp"
