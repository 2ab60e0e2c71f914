"""Walk through the channel model: path-loss laws, correlated shadowing and
Rayleigh fading, with the statistics that validate each piece."""

import numpy as np

from platoonrl import (
    FadingSample,
    LargeScaleState,
    compose_gain,
    sample_rayleigh_power,
    sample_shadowing,
    v2i_pathloss_db,
    v2v_pathloss_db,
)

rng = np.random.default_rng(7)

print("V2I path loss, 128.1 + 37.6 log10(d_km):")
for d in (50, 100, 250, 500, 1000):
    print(f"  {d:5d} m -> {v2i_pathloss_db(d):6.2f} dB")

print("\nV2V path loss (LOS street canyon at 2 GHz):")
for d in (5, 9, 15, 25, 39):
    print(f"  {d:5d} m -> {v2v_pathloss_db(d, 2.0):6.2f} dB")

print("\nShadowing: AR(1) over displacement, stationary N(0, sigma^2).")
decorr, sigma, step = 10.0, 3.0, 1.5
n = 50_000
trace = np.empty(n)
value = rng.normal(0, sigma)
for i in range(n):
    value = sample_shadowing(value, step, decorr, sigma, rng)
    trace[i] = value
print(f"  marginal std: {trace.std():.2f} dB (sigma = {sigma})")
for lag in (1, 3, 7):
    r = np.corrcoef(trace[:-lag], trace[lag:])[0, 1]
    print(f"  lag {lag} ({lag * step:.1f} m): autocorr {r:.3f}, "
          f"theory exp(-d/decorr) = {np.exp(-lag * step / decorr):.3f}")

print("\nRayleigh power fading: exponential with unit mean.")
samples = sample_rayleigh_power(rng, size=500_000)
print(f"  mean {samples.mean():.4f}, P(g <= 1) = {np.mean(samples <= 1):.4f} "
      f"(theory {1 - np.exp(-1):.4f})")

print("\nComposed link gain at 100 m with 11 dBi antennas, 5 dB noise figure:")
large = LargeScaleState(
    pathloss_db=v2i_pathloss_db(100.0),
    shadowing_db=0.0,
    antenna_gain_db=11.0,
    noise_figure_db=5.0,
)
for fade in (0.1, 1.0, 3.0):
    h = compose_gain(large, FadingSample(power_gain=fade))
    print(f"  fading {fade:>4.1f} -> h = {h:.3e} ({10 * np.log10(h):6.1f} dB)")
