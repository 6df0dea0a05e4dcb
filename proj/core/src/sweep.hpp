#pragma once

// Bank management shared by the multipass drivers. Every sampler bank is
// keyed by a 64-bit id and materialized only when some update touches it.
// When the touched banks do not fit the memory budget, the pass span is
// replayed once per chunk of keys; this stays one logical pass because each
// bank still sees every update exactly once.

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgs/parallel.hpp"
#include "dgs/stream.hpp"

namespace dgs::detail {

// Three fields packed into one sortable key.
inline std::uint64_t pack_key(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  if (a >= (1ULL << 16) || b >= (1ULL << 24) || c >= (1ULL << 24)) throw std::out_of_range("bank key overflow");
  return (a << 48) | (b << 24) | c;
}
inline std::uint32_t key_a(std::uint64_t k) { return static_cast<std::uint32_t>(k >> 48); }
inline std::uint32_t key_b(std::uint64_t k) { return static_cast<std::uint32_t>((k >> 24) & 0xffffffULL); }
inline std::uint32_t key_c(std::uint64_t k) { return static_cast<std::uint32_t>(k & 0xffffffULL); }

// enumerate(update, emit) calls emit(key, item) for every bank the update
// feeds. make(key) builds an empty bank, add(bank, item, sign) feeds it and
// finish(key, bank) consumes it once the pass span has been fully applied.
template <class Bank, class Enumerate, class Make, class Add, class Finish>
void sweep_banks(std::span<const EdgeUpdate> pass, SpaceLedger& ledger, const std::string& module,
                 std::size_t bank_bytes, Enumerate&& enumerate, Make&& make, Add&& add, Finish&& finish) {
  std::vector<std::uint64_t> keys;
  for (const auto& e : pass) {
    enumerate(e, [&](std::uint64_t key, const auto&) { keys.push_back(key); });
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  if (keys.empty()) return;
  const std::size_t per_chunk = std::max<std::size_t>(1, sketch_memory_budget() / std::max<std::size_t>(1, bank_bytes));
  std::size_t resident = 0;
  for (std::size_t lo = 0; lo < keys.size(); lo += per_chunk) {
    const std::size_t hi = std::min(keys.size(), lo + per_chunk);
    const std::uint64_t first = keys[lo];
    const std::uint64_t last = keys[hi - 1];
    std::vector<Bank> banks;
    banks.reserve(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) banks.push_back(make(keys[i]));
    std::size_t bytes = 0;
    for (const auto& b : banks) bytes += b.bytes();
    resident = std::max(resident, bytes);
    for (const auto& e : pass) {
      enumerate(e, [&](std::uint64_t key, const auto& item) {
        if (key < first || key > last) return;
        const auto it = std::lower_bound(keys.begin() + static_cast<std::ptrdiff_t>(lo),
                                         keys.begin() + static_cast<std::ptrdiff_t>(hi), key);
        add(banks[static_cast<std::size_t>(it - keys.begin()) - lo], item, e.sign);
      });
    }
    for (std::size_t i = lo; i < hi; ++i) finish(keys[i], banks[i - lo]);
  }
  ledger.charge(module, resident);
}

}  // namespace dgs::detail

namespace dgs::detail {

// Same contract as sweep_banks, for banks that are linear in their items:
// the updates a bank receives during the span are summed per item first and
// add(bank, item, multiplicity) is called once per item with a non-zero net.
// The resulting bank state is identical to feeding the updates one by one.
template <class Bank, class Item, class Enumerate, class Make, class Add, class Finish>
void sweep_banks_coalesced(std::span<const EdgeUpdate> pass, SpaceLedger& ledger, const std::string& module,
                           std::size_t bank_bytes, Enumerate&& enumerate, Make&& make, Add&& add,
                           Finish&& finish) {
  std::vector<std::pair<std::uint64_t, std::pair<Item, int>>> pending;
  for (const auto& e : pass) {
    enumerate(e, [&](std::uint64_t key, const Item& item) { pending.push_back({key, {item, e.sign}}); });
  }
  std::stable_sort(pending.begin(), pending.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first < b.first : a.second.first < b.second.first;
  });
  if (pending.empty()) return;
  const std::size_t per_chunk = std::max<std::size_t>(1, sketch_memory_budget() / std::max<std::size_t>(1, bank_bytes));
  std::size_t resident = 0;
  std::size_t i = 0;
  while (i < pending.size()) {
    std::size_t live = 0;
    std::size_t bytes = 0;
    while (i < pending.size() && live < per_chunk) {
      const std::uint64_t key = pending[i].first;
      Bank bank = make(key);
      bytes = std::max(bytes, (live + 1) * bank.bytes());
      while (i < pending.size() && pending[i].first == key) {
        const Item& item = pending[i].second.first;
        std::int64_t net = 0;
        while (i < pending.size() && pending[i].first == key && pending[i].second.first == item) {
          net += pending[i].second.second;
          ++i;
        }
        if (net != 0) add(bank, item, static_cast<int>(net));
      }
      finish(key, bank);
      ++live;
    }
    resident = std::max(resident, bytes);
  }
  ledger.charge(module, resident);
}

}  // namespace dgs::detail
