"""Train the task-split dual-critic agents on a desk-scale scenario and
compare against the uniform-random oracle.  Takes a couple of minutes."""

import numpy as np

from platoonrl import EnvConfig, RewardWeights, TrainConfig, run_random_policy, run_training

env_cfg = EnvConfig(
    num_platoons=2,
    platoon_size=2,
    num_subchannels=2,
    episode_slots=50,
    cam_payload_bits=8000.0,
    intra_platoon_gap_m=5.0,
)
weights = RewardWeights(cam_backlog=30.0, aoi=100.0, rate_bonus=1.0, power=0.02)
train_cfg = TrainConfig(
    algorithm="task_split",
    episodes=120,
    minibatch_size=512,
    updates_per_block=40,
    discount=0.3,
    critic_lr=5e-3,
    actor_lr=6e-3,
    actor_score_reg=5e-2,
    exploration_std_final=0.02,
    actor_hidden=(64, 32),
    local_critic_hidden=(64, 32),
    global_critic_hidden=(64, 32),
)

print("training task-split agents (120 episodes)...")
log = run_training(env_cfg, train_cfg, weights, seed=1)
print("running the random-action oracle on the same environment stream...")
oracle = run_random_policy(env_cfg, train_cfg, weights, seed=1)

print("\nepisode | reward (mean over agents) | AoI [ms] | CAM done")
for rec in log.records[:: max(1, len(log.records) // 12)]:
    bar = "#" * max(0, int(12 + 3 * rec.local_rewards.mean()))
    print(
        f"  {rec.episode:5d} | {rec.local_rewards.mean():+8.3f} {bar:<12s} "
        f"| {rec.mean_aoi_s * 1e3:6.2f} | {'yes' if rec.cam_delivered else 'no'}"
    )

window = len(log.records) // 5
trained = log.records[-window:]
random_ = oracle.records[-window:]
print(f"\nfinal {window} episodes, trained vs random:")
print(f"  mean reward : {np.mean([r.local_rewards.mean() for r in trained]):+.3f}"
      f"  vs {np.mean([r.local_rewards.mean() for r in random_]):+.3f}")
print(f"  mean AoI    : {np.mean([r.mean_aoi_s for r in trained]) * 1e3:.2f} ms"
      f" vs {np.mean([r.mean_aoi_s for r in random_]) * 1e3:.2f} ms")
print(f"  CAM prob    : {np.mean([r.cam_delivered for r in trained]):.2f}"
      f"  vs {np.mean([r.cam_delivered for r in random_]):.2f}")
print(f"  TD3 pessimism bound violations during training: {log.td3_bound_violations}")
