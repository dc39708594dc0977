#pragma once

#include <vector>

namespace teleran::ran {

struct McsEntry {
  double min_snr_db = 0.0;
  double efficiency = 0.0;  // bit/s/Hz
  int index = 0;
};

struct McsSelection {
  int index = 0;
  double efficiency = 0.0;
  bool outage = false;
};

// SNR -> spectral efficiency lookup. Entries are sorted by strictly
// increasing min_snr_db with non-decreasing efficiency.
class McsTable {
 public:
  McsTable(std::vector<McsEntry> entries, double efficiency_overhead = 0.75,
           double outage_threshold_db = -5.0);

  // 29 entries on a 1 dB grid starting at first_snr_db, efficiency
  // min(log2(1 + snr), cap).
  static McsTable capped_shannon(double cap = 7.4, double efficiency_overhead = 0.75,
                                 double outage_threshold_db = -5.0, double first_snr_db = -5.0,
                                 double step_db = 1.0, int count = 29);

  const std::vector<McsEntry>& entries() const { return entries_; }
  double efficiency_overhead() const { return overhead_; }
  double outage_threshold_db() const { return outage_threshold_db_; }

  McsSelection select(double snr_db) const;

 private:
  std::vector<McsEntry> entries_;
  double overhead_;
  double outage_threshold_db_;
};

inline McsSelection mcs_from_snr(double snr_db, const McsTable& table) { return table.select(snr_db); }

// Achievable rate in bit/s on `bandwidth_hz` at the given table efficiency.
double link_rate_bps(double bandwidth_hz, double efficiency, double overhead);

}  // namespace teleran::ran
