#pragma once

#include <cstdint>
#include <string>

namespace qutrit {

struct SelftestResult {
  std::string report;  // one PASS/FAIL line per criterion
  bool all_passed = false;
};

// Numeric verification suite (criteria 1-10): recomposition, closed forms,
// dual-tone identity, readout tables, MLE round trips, resonant limit,
// detuning sweep, trap-ensemble tables, purity recovery, scan averaging.
// Tolerances are pinned inside; CSV/JSON artifacts are written to outdir.
// The report text is deterministic for a given seed (no timing data), so
// two runs can be compared byte for byte.
SelftestResult run_report(std::uint64_t seed, const std::string& outdir);

// Full suite: runs the report twice into outdir/run1 and outdir/run2,
// verifies the artifacts are byte-identical (criterion 11), and writes the
// combined table to outdir/report.txt.
SelftestResult run_acceptance(std::uint64_t seed, const std::string& outdir);

} // namespace qutrit
