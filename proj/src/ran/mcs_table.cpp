#include "teleran/ran/mcs_table.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "teleran/common.hpp"

namespace teleran::ran {

McsTable::McsTable(std::vector<McsEntry> entries, double efficiency_overhead, double outage_threshold_db)
    : entries_(std::move(entries)), overhead_(efficiency_overhead), outage_threshold_db_(outage_threshold_db) {
  if (entries_.empty()) throw InputError("mcs_table: no entries");
  if (!(overhead_ > 0.0 && overhead_ <= 1.0)) throw InputError("mcs_table: overhead must be in (0, 1]");
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (!(entries_[i].min_snr_db > entries_[i - 1].min_snr_db)) {
      throw InputError("mcs_table: min_snr_db must be strictly increasing (entry " + std::to_string(i) + ")");
    }
    if (entries_[i].efficiency < entries_[i - 1].efficiency) {
      throw InputError("mcs_table: efficiency must be non-decreasing (entry " + std::to_string(i) + ")");
    }
  }
}

McsTable McsTable::capped_shannon(double cap, double efficiency_overhead, double outage_threshold_db,
                                  double first_snr_db, double step_db, int count) {
  std::vector<McsEntry> entries;
  entries.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double snr = first_snr_db + step_db * i;
    const double se = std::min(std::log2(1.0 + std::pow(10.0, snr / 10.0)), cap);
    entries.push_back({snr, se, i});
  }
  return McsTable(std::move(entries), efficiency_overhead, outage_threshold_db);
}

McsSelection McsTable::select(double snr_db) const {
  McsSelection sel;
  const auto it = std::upper_bound(entries_.begin(), entries_.end(), snr_db,
                                   [](double v, const McsEntry& e) { return v < e.min_snr_db; });
  if (it == entries_.begin()) {
    sel.index = entries_.front().index;
    sel.efficiency = entries_.front().efficiency;
  } else {
    sel.index = std::prev(it)->index;
    sel.efficiency = std::prev(it)->efficiency;
  }
  sel.outage = snr_db < outage_threshold_db_;
  return sel;
}

double link_rate_bps(double bandwidth_hz, double efficiency, double overhead) {
  return bandwidth_hz * efficiency * overhead;
}

}  // namespace teleran::ran
