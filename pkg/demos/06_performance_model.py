"""Cycle, throughput, and energy model with published-figure regression.

Kernels are measured by running them; the model then scales one
subarray's cycles across the active fabric fraction and the chip's
power modes.  A single fitted scalar per kernel family absorbs the gap
between behavioral cycles and silicon, and `compare_to_paper` checks
every published table cell against its tolerance.

Run:  python demos/06_performance_model.py
"""

from pimcrypt import perfmodel as pm

ms = pm.measure_kernels()
print("measured cycles per subarray pass:")
for name in ("aes-128-encrypt", "aes-256-decrypt", "sha3-256", "ghash"):
    m = ms[name]
    print(f"  {name:<16} {m.cycles:6d} cycles / {m.payload_bytes} bytes")

run0 = pm.POWER_MODES["run0"]
cal = pm.calibrate(ms)
print("\nfitted family calibration:", {k: round(v, 4)
                                       for k, v in cal.items()})

cfg = pm.FabricConfig(isc_fraction=1.0, calibration=cal)
per_mode = pm.mode_cycles(ms)
print("\nmodeled throughput at 110 MHz, full fabric (MB/s):")
for key in ((128, "encrypt", "cbc"), (128, "encrypt", "gcm"),
            (256, "decrypt", "ccm")):
    t = pm.throughput(per_mode[key], cfg, run0) / 1e6
    ref = pm.PAPER["aes_throughput"][1.0][key]
    print(f"  aes-{key[0]}-{key[1]}-{key[2]:<4} {t:7.2f}  (published {ref})")

# Exact scaling laws, no calibration involved.
m = ms["aes-128-encrypt"]
t25 = pm.throughput(m, pm.FabricConfig(isc_fraction=0.25), run0)
t100 = pm.throughput(m, pm.FabricConfig(isc_fraction=1.0), run0)
print(f"\nfraction scaling 25% -> 100%: x{t100 / t25:.0f} (exact)")

# The full regression: every published cell, one verdict per row.
report = pm.compare_to_paper(ms, cal)
ok = len(report.rows) - len(report.violations)
print(f"\nregression vs published tables: {ok}/{len(report.rows)} cells ok")
assert not report.violations
