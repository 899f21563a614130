"""Per-resource efficiency and energy-per-block from the reference catalog.

Throughput per slice hides how much block RAM and DSP silicon a design
consumes, so the report divides datapath throughput by each resource
class. The block RAM figure is scaled by a memory-utilization factor:
the catalog carries the factor behind the published DRAB-LOCUS figure
(0.375), and the table contents actually packed into the RAMs imply
1/3; both are shown.

Run:  python demos/efficiency_and_energy.py
"""

from drablocus import metrics
from drablocus.tables import datapath_bram_utilization

catalog = metrics.default_catalog()

print("=== Throughput per resource (datapath only) ===")
reports = []
for name in ("AES-Efficient", "DRAB-LOCUS"):
    entry = catalog.design(name)
    reports.append(metrics.efficiency_report(entry, entry.bram_utilization))
drab = catalog.design("DRAB-LOCUS")
reports.append(metrics.efficiency_report(drab, datapath_bram_utilization()))
print(metrics.render_efficiency(reports))
print("(last row: DRAB-LOCUS with the self-computed 1/3 memory factor)")

print("\n=== Legacy throughput per slice, whole design ===")
for name in ("AES-EncDec", "AES-Modes", "AES-Efficient", "DRAB-LOCUS"):
    entry = catalog.design(name)
    per_slice = entry.throughput_mbps / entry.total.slices
    print(f"{name:>14}: {per_slice:8.2f} Mbps/slice "
          f"({entry.total.slices} slices, {entry.throughput_mbps:.0f} Mbps)")

print("\n=== Energy per block (nanowatt-seconds) ===")
for name in ("DRAB-LOCUS", "AES-Efficient"):
    entry = catalog.design(name)
    energy = metrics.energy_per_block_nws(entry.power_mw["total"],
                                          entry.throughput_mbps)
    print(f"{name:>14}: {entry.power_mw['total']:.0f} mW at "
          f"{entry.throughput_mbps:.0f} Mbps -> {energy:.2f} nWs")
expanded = catalog.design("AES-Expanded")
print(f"{'AES-Expanded':>14}: {expanded.power_mw['total']:.0f} mW, "
      f"{expanded.energy_nws:.2f} nWs (catalog figure; throughput undisclosed)")
