"""Experiment command line.

Subcommands: simulate (seeded batch runs and sweeps), train (IPPO-DM),
inspect-checkpoint, bench (kernel backend comparison).
"""

from __future__ import annotations

import argparse
import sys

from .config import SimConfig, desk_scale, load_config, paper_scale


def _scale_config(args) -> SimConfig:
    if args.config:
        cfg = load_config(args.config)
    elif getattr(args, "desk_scale", False):
        cfg = desk_scale()
    elif getattr(args, "paper_scale", False):
        cfg = paper_scale()
    else:
        cfg = load_config()  # env var or defaults
    return cfg


def _add_scale_flags(p) -> None:
    p.add_argument("--config", help="flat key=value config file")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--desk-scale", action="store_true",
                       help="small CI preset (M=8, T=3 s, N=4)")
    group.add_argument("--paper-scale", action="store_true",
                       help="full published scale (long-running)")


def cmd_simulate(args) -> int:
    from .experiments import (
        ExperimentSpec,
        expand_scenarios,
        export_curves,
        export_summary,
        run_experiment,
    )

    base_cfg = _scale_config(args)
    scenarios = expand_scenarios(base_cfg, args.load, args.sweep or [])
    results = []
    for name, cfg in scenarios:
        spec = ExperimentSpec(
            name=name,
            cfg=cfg,
            policy=args.policy,
            num_runs=args.runs,
            seed_base=args.seed,
            checkpoint=args.checkpoint,
        )
        res = run_experiment(spec)
        results.append(res)
        print(
            f"{name} [{args.policy}] runs={args.runs}: "
            f"eta_pack={res.mean('delivery_ratio'):.4f} "
            f"phi_loss={res.mean('loss_ratio'):.4f}"
        )
    summary = export_summary(results, args.out, fmt="csv")
    export_summary(results, args.out, fmt="json")
    curves = export_curves(results, args.out)
    print(f"wrote {summary} and {curves}")
    return 0


def cmd_train(args) -> int:
    import os

    from .trainer import IppoTrainer, TrainConfig

    cfg = _scale_config(args)
    tc = TrainConfig()
    if args.episodes is not None:
        tc = TrainConfig(episodes=args.episodes)
    trainer = IppoTrainer(cfg, tc, args.seed)

    def progress(stats):
        if stats.episode % 10 == 0:
            print(
                f"episode {stats.episode}: reward={stats.mean_reward:.4f} "
                f"actor={stats.actor_loss:.4f} critic={stats.critic_loss:.4f}"
            )

    trainer.train(progress=progress)
    os.makedirs(args.out, exist_ok=True)
    ckpt = os.path.join(args.out, "checkpoint.pt")
    trainer.save_checkpoint(ckpt)
    trainer.save_curve(os.path.join(args.out, "training_curve.csv"))
    print(f"wrote {ckpt}")
    return 0


def cmd_inspect(args) -> int:
    import torch

    data = torch.load(args.path, weights_only=False)
    print(f"checkpoint format v{data.get('format_version')}")
    print(f"trained episodes: {data.get('episode')}")
    print(f"master seed: {data.get('master_seed')}")
    print("sim config:")
    for k, v in sorted(data.get("sim_config", {}).items()):
        print(f"  {k} = {v}")
    print("train config:")
    for k, v in sorted(data.get("train_config", {}).items()):
        print(f"  {k} = {v}")
    n_actor = sum(v.numel() for v in data["actor"].values())
    n_critic = sum(v.numel() for v in data["critic"].values())
    print(f"actor parameters: {n_actor}")
    print(f"critic parameters: {n_critic}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="uavflow",
        description="Multi-hop UAV multipath-routing simulator and IPPO-DM trainer",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run seeded simulation batches")
    _add_scale_flags(p_sim)
    p_sim.add_argument("--policy", choices=["ippo-dm", "heuristic", "greedy"],
                       required=True)
    p_sim.add_argument("--checkpoint", help="trained checkpoint (ippo-dm only)")
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--runs", type=int, default=50)
    p_sim.add_argument("--out", required=True)
    p_sim.add_argument("--sweep", action="append",
                       help="e.g. 'uavs=8,16,24,35' or 'n=2..8' (repeatable)")
    p_sim.add_argument("--load", choices=["low", "high"])
    p_sim.set_defaults(func=cmd_simulate)

    p_train = sub.add_parser("train", help="train the IPPO-DM policy")
    _add_scale_flags(p_train)
    p_train.add_argument("--episodes", type=int)
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--out", required=True)
    p_train.set_defaults(func=cmd_train)

    p_ins = sub.add_parser("inspect-checkpoint", help="print checkpoint metadata")
    p_ins.add_argument("path")
    p_ins.set_defaults(func=cmd_inspect)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
