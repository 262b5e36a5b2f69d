#pragma once

#include "tsetlin/automaton.hpp"
#include "tsetlin/clause.hpp"
#include "tsetlin/clause_pool.hpp"
#include "tsetlin/data.hpp"
#include "tsetlin/dataset.hpp"
#include "tsetlin/errors.hpp"
#include "tsetlin/harness.hpp"
#include "tsetlin/literals.hpp"
#include "tsetlin/machine.hpp"
#include "tsetlin/multiclass.hpp"
#include "tsetlin/multigranular.hpp"
#include "tsetlin/persistence.hpp"
#include "tsetlin/random.hpp"
