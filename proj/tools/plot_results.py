#!/usr/bin/env python3
"""Render figures from dualgp CSV artifacts.

Secondary tooling: the CLI emits plain CSV; this script turns run
directories into PNGs. Requires matplotlib and numpy.

  python3 tools/plot_results.py toy      RUN_DIR [--out DIR]
  python3 tools/plot_results.py train    RUN_DIR [--out DIR]
  python3 tools/plot_results.py rollout  RUN_DIR [--out DIR]
"""

import argparse
import csv
import pathlib
import sys

import numpy as np

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:  # pragma: no cover
    sys.exit("matplotlib is required: pip install matplotlib")


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return rows


def column(rows, name, cast=float):
    return np.array([cast(r[name]) for r in rows])


def plot_toy(run_dir, out_dir):
    truth = read_csv(run_dir / "toy_truth_obs.csv")
    t = [r for r in truth if r["series"] == "truth"]
    obs = [r for r in truth if r["series"] == "observation"]

    fig, axes = plt.subplots(1, 3, figsize=(15, 4.2), sharey=True)
    for ax, kernel in zip(axes, ("rbf", "ck", "ntk")):
        post = read_csv(run_dir / f"toy_{kernel}.csv")
        x = column(post, "x_query")
        mean = column(post, "post_mean")
        lo = column(post, "ci_lo")
        hi = column(post, "ci_hi")
        ax.fill_between(x, lo, hi, alpha=0.25, label="95% interval")
        ax.plot(x, mean, label="posterior mean")
        ax.plot(column(t, "x"), column(t, "y"), "k--", lw=1, label="truth")
        ax.plot(column(obs, "x"), column(obs, "y"), "k.", ms=8, label="observations")
        ax.set_title(kernel)
        ax.set_xlabel("x")
        ax.set_ylim(-15, 80)
    axes[0].set_ylabel("f(x)")
    axes[0].legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_dir / "toy.png", dpi=150)
    print(out_dir / "toy.png")


def plot_train(run_dir, out_dir):
    # Final value surface
    surfaces = sorted(run_dir.glob("value_surface_iter*.csv"))
    if surfaces:
        rows = read_csv(surfaces[-1])
        x = column(rows, "x")
        v = column(rows, "xdot")
        val = column(rows, "value")
        n = int(round(len(rows) ** 0.5))
        fig, ax = plt.subplots(figsize=(6, 5))
        im = ax.pcolormesh(
            x.reshape(n, n), v.reshape(n, n), val.reshape(n, n), shading="auto"
        )
        fig.colorbar(im, ax=ax, label="value")
        ax.set_xlabel("x")
        ax.set_ylabel("xdot")
        ax.set_title(surfaces[-1].stem)
        fig.tight_layout()
        fig.savefig(out_dir / "value_surface.png", dpi=150)
        print(out_dir / "value_surface.png")

    # Dynamics quiver: predicted vs true displacement arrows
    quiver = run_dir / "dynamics_quiver.csv"
    if quiver.exists():
        rows = read_csv(quiver)
        x = column(rows, "x")
        v = column(rows, "xdot")
        fig, ax = plt.subplots(figsize=(6.5, 5))
        ax.quiver(
            x, v, column(rows, "true_next_x") - x, column(rows, "true_next_xdot") - v,
            color="0.65", width=2.5e-3, label="true",
        )
        ax.quiver(
            x, v, column(rows, "pred_next_x") - x, column(rows, "pred_next_xdot") - v,
            color="tab:red", width=2.5e-3, alpha=0.7, label="predicted",
        )
        ax.set_xlabel("x")
        ax.set_ylabel("xdot")
        ax.set_title("dynamics at F = 0")
        ax.legend(fontsize=8)
        fig.tight_layout()
        fig.savefig(out_dir / "dynamics_quiver.png", dpi=150)
        print(out_dir / "dynamics_quiver.png")

    # Greedy policy on the support anchors
    policy = run_dir / "policy.csv"
    if policy.exists():
        rows = read_csv(policy)
        fig, ax = plt.subplots(figsize=(6.5, 5))
        sc = ax.scatter(
            column(rows, "x"), column(rows, "xdot"), c=column(rows, "action"),
            cmap="coolwarm", s=14,
        )
        fig.colorbar(sc, ax=ax, label="force")
        ax.set_xlabel("x")
        ax.set_ylabel("xdot")
        ax.set_title("greedy policy")
        fig.tight_layout()
        fig.savefig(out_dir / "policy.png", dpi=150)
        print(out_dir / "policy.png")

    # Convergence diagnostics
    diag = run_dir / "diagnostics.csv"
    if diag.exists():
        rows = read_csv(diag)
        fig, ax = plt.subplots(figsize=(5.5, 4))
        ax.semilogy(column(rows, "iteration"), column(rows, "max_delta"), "o-",
                    label="max delta")
        ax.semilogy(column(rows, "iteration"), column(rows, "mean_delta"), "s-",
                    label="mean delta")
        ax.set_xlabel("sweep")
        ax.set_ylabel("value change")
        ax.legend(fontsize=8)
        fig.tight_layout()
        fig.savefig(out_dir / "convergence.png", dpi=150)
        print(out_dir / "convergence.png")


def plot_rollout(run_dir, out_dir):
    rows = read_csv(run_dir / "trajectory.csv")
    t = column(rows, "t")
    fig, axes = plt.subplots(3, 1, figsize=(7, 7), sharex=True)
    axes[0].plot(t, column(rows, "x"))
    axes[0].axhline(0.6, color="k", ls="--", lw=0.8)
    axes[0].set_ylabel("x")
    axes[1].plot(t, column(rows, "xdot"))
    axes[1].set_ylabel("xdot")
    axes[2].step(t, column(rows, "force"), where="post")
    axes[2].set_ylabel("force")
    axes[2].set_xlabel("t")
    fig.tight_layout()
    fig.savefig(out_dir / "trajectory.png", dpi=150)
    print(out_dir / "trajectory.png")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("kind", choices=("toy", "train", "rollout"))
    ap.add_argument("run_dir", type=pathlib.Path)
    ap.add_argument("--out", type=pathlib.Path, default=None)
    args = ap.parse_args()

    out_dir = args.out or args.run_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    {"toy": plot_toy, "train": plot_train, "rollout": plot_rollout}[args.kind](
        args.run_dir, out_dir
    )


if __name__ == "__main__":
    main()
