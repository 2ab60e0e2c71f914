"""Seedable multi-platoon C-V2X simulator with AoI-aware multi-agent
actor-critic training (dual global/local critics, task-split variant,
DDPG and fully decentralized baselines) plus an experiment runner."""

from .buffer import Minibatch, ReplayBuffer, Transition
from .channel import (
    FadingSample,
    LargeScaleState,
    LinkGeometry,
    LinkKind,
    compose_gain,
    dbm_to_watts,
    sample_rayleigh_power,
    sample_shadowing,
    v2i_pathloss_db,
    v2v_pathloss_db,
    watts_to_dbm,
)
from .env import (
    ActionCommand,
    ActionDecodeError,
    ChannelSnapshot,
    ConfigError,
    EnvConfig,
    PlatoonEnv,
    PlatoonState,
    StepOutcome,
    decode_action,
    unit_squash,
)
from .experiments import (
    ExperimentConfig,
    SweepSummary,
    SummaryRow,
    aggregate,
    export_plot_data,
    parse_config,
    run_point,
    run_sweep,
    serialize_config,
    write_metrics,
    read_metrics,
)
from .nets import Adam, DenseNet, load_net, save_net, soft_update
from .rewards import (
    RewardBundle,
    RewardWeights,
    bundle_for,
    global_reward,
    interference_score,
    local_reward,
    power_penalty,
    step_bonus,
    task_rewards,
)
from .training import (
    ALGORITHMS,
    EpisodeRecord,
    TrainConfig,
    TrainLog,
    Trainer,
    encode_command,
    encode_commands,
    run_baseline,
    run_random_policy,
    run_training,
    smoothed_target_actions,
    td3_global_target,
)

__version__ = "0.1.0"
