#pragma once

// Umbrella header.
#include <ets/chainlog.hpp>
#include <ets/domain.hpp>
#include <ets/error.hpp>
#include <ets/exchange.hpp>
#include <ets/fixed_point.hpp>
#include <ets/hash.hpp>
#include <ets/journal.hpp>
#include <ets/ledger.hpp>
#include <ets/report.hpp>
#include <ets/scenario.hpp>
#include <ets/transaction.hpp>
