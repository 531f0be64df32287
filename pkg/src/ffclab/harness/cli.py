"""Command-line front end.

Subcommands: train, eval, render, segment-bench, demo-record.  Every run
directory receives a manifest plus delimited outputs, and the reporting
paths render matplotlib figures next to them.

Exit codes: 0 success, 2 usage error, 3 missing checkpoint.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from ..autoprompt import (BaselineSegmenter, GridSpec, OracleClient,
                          PROMPT_TEXT, miou, query_paths, sample_prompts,
                          segment)
from ..errors import FfclabError, InputError
from ..nets import load_checkpoint
from ..render import (LABEL_CABLE, LABEL_EE, LABEL_RECEPTACLE,
                      default_base_cameras, mounted_cameras, render_labels,
                      write_pgm)
from ..rl import Agent, TrainerConfig, train
from ..sim import (EpisodeConfig, episode_config_from_dict, load_scene,
                   narrow_cable_config, reset, step, write_trajectory)
from ..sim.expert import scripted_expert
from . import figures
from .evaluation import (VIEWS, agent_policy, evaluate, expert_policy,
                         view_cameras)
from .manifest import require_resolution, write_manifest

EXIT_USAGE = 2
EXIT_MISSING_CHECKPOINT = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ffclab",
        description="Cable-insertion simulation, training, and reporting.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, episodes_default=None):
        p.add_argument("--config", type=Path, default=None,
                       help="scene description file (key=value lines)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", type=Path, required=True,
                       help="output directory for reports and artifacts")
        if episodes_default is not None:
            p.add_argument("--episodes", type=int,
                           default=episodes_default)

    p_train = sub.add_parser("train", help="run a training session")
    common(p_train)
    p_train.add_argument("--steps", type=int, default=None,
                         help="override total environment steps")
    p_train.add_argument("--demo-episodes", type=int, default=None)
    p_train.add_argument("--eval-interval", type=int, default=None)

    p_eval = sub.add_parser("eval", help="evaluate a trained policy")
    common(p_eval, episodes_default=10)
    p_eval.add_argument("--checkpoint", type=Path, default=None)
    p_eval.add_argument("--expert", action="store_true",
                        help="evaluate the scripted expert instead of a "
                             "checkpoint")
    p_eval.add_argument("--view", choices=VIEWS, default="both")
    p_eval.add_argument("--max-steps", type=int, default=None)

    p_render = sub.add_parser("render", help="render scene observations")
    common(p_render, episodes_default=4)
    p_render.add_argument("--view", choices=VIEWS, default="both")

    p_seg = sub.add_parser("segment-bench",
                           help="benchmark the prompting pipeline")
    common(p_seg, episodes_default=50)

    p_demo = sub.add_parser("demo-record",
                            help="record scripted-expert trajectories")
    common(p_demo, episodes_default=10)
    return parser


def _episode_config(args) -> EpisodeConfig:
    if args.config is not None:
        if not args.config.is_file():
            raise InputError(f"scene file not found: {args.config}")
        return episode_config_from_dict(load_scene(args.config))
    return EpisodeConfig()


def cmd_train(args) -> int:
    episode_cfg = _episode_config(args)
    cfg = TrainerConfig()
    if args.steps is not None:
        cfg.total_steps = args.steps
    if args.demo_episodes is not None:
        cfg.demo_episodes = args.demo_episodes
    if args.eval_interval is not None:
        cfg.eval_interval = args.eval_interval
    out = args.out
    write_manifest(out, "train", episode_cfg, args.seed, cfg.image_size,
                   extra={"total_steps": cfg.total_steps})
    summary = train(cfg, episode_cfg, args.seed, out)
    figures.training_curves(out / "metrics.csv", out / "training_curves.png")
    print("final eval success rate: %.3f"
          % summary["final_eval"]["success_rate"])
    print("checkpoint: %s" % summary["checkpoint"])
    return 0


def cmd_eval(args) -> int:
    if args.episodes < 1:
        raise InputError("--episodes must be >= 1")
    episode_cfg = _episode_config(args)
    image_size = TrainerConfig().image_size
    if args.expert:
        policy = expert_policy
        source = "expert"
    else:
        if args.checkpoint is None:
            raise InputError("--checkpoint is required unless --expert "
                             "is given")
        if not args.checkpoint.is_file():
            print(f"error: checkpoint not found: {args.checkpoint}",
                  file=sys.stderr)
            return EXIT_MISSING_CHECKPOINT
        tensors = load_checkpoint(args.checkpoint)
        require_resolution(tensors, image_size)
        agent = Agent(image_size=image_size)
        agent.load_tensors(tensors)
        policy = agent_policy(agent)
        source = str(args.checkpoint)

    views = (args.view,)
    configs = {"wide": episode_cfg}
    if args.config is None:
        configs["narrow"] = narrow_cable_config()
    report = evaluate(policy, configs, views=views,
                      episodes_per_setting=args.episodes,
                      seed_base=500_000 + args.seed,
                      image_size=image_size, max_steps=args.max_steps)

    out = args.out
    write_manifest(out, "eval", episode_cfg, args.seed, image_size,
                   extra={"policy": source, "episodes": args.episodes,
                          "view": args.view})
    (out / "eval_report.csv").write_text(report.to_csv(), encoding="utf-8")
    (out / "episodes.csv").write_text(report.episodes_csv(),
                                      encoding="utf-8")
    figures.eval_bars(report, out / "eval_success.png")
    for row in report.rows:
        print("%s/%s: success %.2f over %d episodes"
              % (row["view"], row["size"], row["success_rate"],
                 row["episodes"]))
    return 0


def cmd_render(args) -> int:
    if args.episodes < 1:
        raise InputError("--episodes must be >= 1")
    episode_cfg = _episode_config(args)
    cams = view_cameras(args.view)
    out = args.out
    write_manifest(out, "render", episode_cfg, args.seed, cams[0].image_width,
                   extra={"episodes": args.episodes, "view": args.view})
    for i in range(args.episodes):
        state = reset(episode_cfg, seed=args.seed + i)
        world_cams = mounted_cameras(cams, state.ee_pose.position)
        for j, cam in enumerate(world_cams):
            mask = render_labels(state, cam)
            write_pgm(mask, out / f"scene{i:03d}_cam{j}.pgm")
    print(f"wrote {args.episodes * len(cams)} mask images to {out}")
    return 0


def _bench_scene(episode_cfg, seed, cam_index):
    """One benchmark scene: the agent-visible label image (end-effector
    occluder hidden) and its per-class truth masks, from a base camera."""
    state = reset(episode_cfg, seed=seed)
    cam = mounted_cameras(default_base_cameras(),
                          state.ee_pose.position)[cam_index]
    labels = render_labels(state, cam).labels.copy()
    labels[labels == LABEL_EE] = 0
    return labels, {"ffc": labels == LABEL_CABLE,
                    "receptacle": labels == LABEL_RECEPTACLE}


def cmd_segment_bench(args) -> int:
    if args.episodes < 1:
        raise InputError("--episodes must be >= 1")
    episode_cfg = _episode_config(args)
    grid = GridSpec(8, 8, 64, 64)
    segmenter = BaselineSegmenter()
    scores = {"ffc": [], "receptacle": []}
    lines = ["scene,seed,ffc_miou,receptacle_miou"]
    for i in range(args.episodes):
        seed = args.seed + i
        labels, truth = _bench_scene(episode_cfg, seed, cam_index=i % 2)
        client = OracleClient(truth, seed=seed)
        votes = query_paths(labels, grid, 6, client, PROMPT_TEXT)
        prompts = sample_prompts(votes, k=5, seed=seed)
        masks = segment(labels, prompts, segmenter)
        row = [str(i), str(seed)]
        for cls in ("ffc", "receptacle"):
            score = miou(masks[cls], truth[cls])
            scores[cls].append(score)
            row.append("%.6g" % score)
        lines.append(",".join(row))
    out = args.out
    write_manifest(out, "segment-bench", episode_cfg, args.seed, 64,
                   extra={"scenes": args.episodes})
    (out / "segment_scores.csv").write_text("\n".join(lines) + "\n",
                                            encoding="utf-8")
    summary = ["class,mean_miou,min_miou"]
    for cls in ("ffc", "receptacle"):
        summary.append("%s,%.6g,%.6g" % (cls, float(np.mean(scores[cls])),
                                         float(np.min(scores[cls]))))
    (out / "segment_summary.csv").write_text("\n".join(summary) + "\n",
                                             encoding="utf-8")
    figures.segmentation_histogram(scores, out / "segment_hist.png")
    for cls in ("ffc", "receptacle"):
        print("%s mean mIoU: %.4f" % (cls, float(np.mean(scores[cls]))))
    return 0


def cmd_demo_record(args) -> int:
    if args.episodes < 1:
        raise InputError("--episodes must be >= 1")
    episode_cfg = _episode_config(args)
    out = args.out
    write_manifest(out, "demo-record", episode_cfg, args.seed,
                   TrainerConfig().image_size,
                   extra={"episodes": args.episodes})
    wins = 0
    for i in range(args.episodes):
        state = reset(episode_cfg, seed=args.seed + i)
        records = [(0, state.ee_pose, 0.0, False)]
        reward = 0.0
        while not state.done:
            action = scripted_expert(state).clamped(episode_cfg)
            state, reward, done = step(state, action)
            records.append((state.step_count, state.ee_pose, reward, done))
        wins += int(reward > 0)
        write_trajectory(out / f"demo{i:03d}.csv", records)
    print(f"recorded {args.episodes} trajectories ({wins} successful) "
          f"to {out}")
    return 0


COMMANDS = {
    "train": cmd_train,
    "eval": cmd_eval,
    "render": cmd_render,
    "segment-bench": cmd_segment_bench,
    "demo-record": cmd_demo_record,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        parser.exit(EXIT_USAGE, f"error: {exc}\n")
    except FfclabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
