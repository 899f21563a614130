"""Resources left after co-locating each cipher with each accelerator.

Feasibility is plain componentwise arithmetic: device capacity minus
accelerator usage minus cipher usage, over slices, block RAMs and DSPs.
A negative component anywhere means the pair does not fit.

Run:  python demos/colocation_survey.py
"""

from drablocus import metrics

catalog = metrics.default_catalog()
designs = ("AES-EncDec", "AES-Modes", "AES-Efficient", "DRAB-LOCUS")
accelerators = ("Video", "DLAU", "CNN", "DNN 1", "DNN 2", "DNN 3")

results = []
for accel_name in accelerators:
    accel = catalog.accelerator(accel_name)
    device = catalog.device(accel.device)
    for design_name in designs:
        results.append(metrics.colocate(device, accel, catalog.design(design_name)))

print(metrics.render_colocation(results))

print("\nFits per design:")
for design_name in designs:
    fits = [r.accelerator for r in results if r.design == design_name and r.feasible]
    print(f"  {design_name:>14}: {len(fits)}/6  ({', '.join(fits) or 'none'})")

print("\nMachine-readable records:")
print(metrics.colocation_records(results[:4]))
print("...")
