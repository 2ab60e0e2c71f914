"""The holistic per-slot reward and its exact split into the two task
rewards (CAM transmission, AoI minimization), plus the interference-based
team reward."""

import numpy as np

from platoonrl import RewardWeights, global_reward, interference_score, local_reward, task_rewards

w = RewardWeights()
print(f"weights: backlog {w.cam_backlog}, aoi {w.aoi}/s, bonus {w.rate_bonus}, power {w.power}\n")

print("scenario sweep (mode, backlog fraction, AoI, rate, power):")
cases = [
    ("broadcasting, full backlog", 1, 1.0, 0.002, 0.0, 0.8),
    ("broadcasting, halfway", 1, 0.5, 0.005, 0.0, 0.8),
    ("uplink, rate above minimum", 0, 0.0, 0.001, 8.0, 0.5),
    ("uplink, rate below minimum", 0, 0.0, 0.02, 1.0, 0.2),
    ("idle low power, stale", 0, 0.0, 0.04, 0.0, 0.0),
]
for name, mode, backlog, aoi, rate, power in cases:
    r_cam, r_aoi = task_rewards(backlog, aoi, rate, 3.0, mode, power, 1.0, w)
    total = local_reward(backlog, aoi, rate, 3.0, mode, power, 1.0, w)
    assert r_cam + r_aoi == total  # exact, not approximate
    print(f"  {name:<30s} cam {r_cam:+7.3f}  aoi {r_aoi:+7.3f}  total {total:+7.3f}")

print("\nthe identity r_cam + r_aoi == r_local holds bit-exactly:")
rng = np.random.default_rng(0)
checks = 0
for _ in range(100_000):
    args = (rng.uniform(0, 1), rng.uniform(0, 0.1), rng.uniform(0, 30), 3.0,
            int(rng.integers(0, 2)), rng.uniform(0, 1), 1.0, w)
    r1, r2 = task_rewards(*args)
    checks += (r1 + r2) == local_reward(*args)
print(f"  {checks} / 100000 random inputs exact")

print("\nteam reward tracks co-channel interference at the roadside unit:")
noise = 10 ** (-14.4)
for level, interference in [("none", 0.0), ("light", 1e-12), ("heavy", 1e-8)]:
    i = np.full((2, 2), interference)
    print(f"  {level:>6s}: raw score {interference_score(i, noise):6.2f}, "
          f"normalized {global_reward(i, noise, w):+.3f}")
