#pragma once

#include "dvfs/bench.hpp"
#include "dvfs/bytes.hpp"
#include "dvfs/config.hpp"
#include "dvfs/corpus.hpp"
#include "dvfs/crypto.hpp"
#include "dvfs/fuzzy.hpp"
#include "dvfs/index.hpp"
#include "dvfs/ledger.hpp"
#include "dvfs/search.hpp"
#include "dvfs/service.hpp"
#include "dvfs/stem.hpp"
#include "dvfs/store.hpp"
#include "dvfs/text.hpp"
#include "dvfs/verify.hpp"
#include "dvfs/version.hpp"
