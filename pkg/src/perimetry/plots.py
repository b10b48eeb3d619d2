"""Figure rendering for the CLI report path (headless, PNG files)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_scaling_figure(fit, perimeter_ref: float, path) -> None:
    """Energy against |log eps| with the fitted line and reference slope."""
    pts = np.array(fit.points)
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    ax.plot(pts[:, 0], pts[:, 1], "o", color="tab:blue", label="measured energy")
    xs = np.linspace(pts[:, 0].min(), pts[:, 0].max(), 64)
    ax.plot(xs, fit.slope * xs + fit.intercept, "-", color="tab:orange",
            label=f"fit: slope {fit.slope:.4g}, R$^2$ {fit.r2:.4f}")
    used = pts[fit.fit_start:]
    ax.plot(used[:, 0], used[:, 1], "o", mfc="none", mec="k", ms=11,
            label="points in fit window")
    ax.set_xlabel(r"$|\log\,\varepsilon|$")
    ax.set_ylabel("normalized energy")
    ax.set_title(f"perimeter scaling (reference perimeter {perimeter_ref:.4g})")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def save_identity_figure(slice_check, identity, path) -> None:
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(7.6, 3.6))
    ax0.bar(["max", "rms"], [slice_check.max_error, slice_check.rms_error],
            color=["tab:red", "tab:blue"])
    ax0.set_yscale("log")
    ax0.set_ylabel("scale-relative slice error")
    ax0.set_title(f"{slice_check.n_tested} points, {slice_check.n_angles} angles")
    ax1.bar(["marginal side", "spectral side"],
            [identity.marginal_side, identity.spectral_side],
            color=["tab:green", "tab:purple"])
    ax1.set_title(f"energy identity, ratio {identity.ratio:.4f}")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def save_convexity_figure(grid, report, family, path) -> None:
    """Mask with hull and witness, the interior trace, and the sinogram."""
    from .geometry import hull_polygon

    spec = grid.spec
    fig, axes = plt.subplots(1, 3, figsize=(11.5, 3.8))
    x0, y0 = spec.origin
    extent = (x0, x0 + spec.length, y0, y0 + spec.length)
    axes[0].imshow(grid.cells, origin="lower", extent=extent, cmap="gray_r")
    if not grid.is_empty():
        hull = np.asarray(hull_polygon(grid))
        hull = np.vstack([hull, hull[:1]])
        axes[0].plot(hull[:, 0], hull[:, 1], "-", color="tab:orange", lw=1.2, label="hull")
    if report.witness is not None:
        axes[0].plot([report.witness.x], [report.witness.y], "x", color="tab:red",
                     ms=11, mew=2.5, label=f"witness ({report.witness.kind})")
    axes[0].legend(loc="upper right", fontsize=7)
    axes[0].set_title(f"verdict: {report.verdict} (branch {report.branch})")

    if report.interior_trace:
        tr = np.array(report.interior_trace)
        axes[1].semilogx(tr[:, 0], tr[:, 1], "o-", color="tab:blue", label="interior mass")
        axes[1].axhline(report.config.level_factor * report.baseline_interior,
                        color="tab:red", ls="--", lw=1, label="non-decay level")
        axes[1].axhline(report.baseline_interior, color="tab:green", ls=":", lw=1,
                        label="convex baseline")
        axes[1].invert_xaxis()
        axes[1].set_xlabel(r"$\varepsilon$")
        axes[1].legend(fontsize=7)
    axes[1].set_title("interior derivative-energy mass")

    sino = family.sinogram()
    axes[2].imshow(sino, aspect="auto", origin="lower", cmap="magma",
                   extent=(family.profiles[0].t0,
                           family.profiles[0].t0 + family.profiles[0].dt * sino.shape[1],
                           0.0, np.pi))
    axes[2].set_xlabel("t")
    axes[2].set_ylabel(r"$\theta$")
    axes[2].set_title("marginals")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def save_counterexample_figure(report, path) -> None:
    """Envelope outcome per stride plus the violating-segment location."""
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(8.4, 3.6))
    env = dict(report.envelopes)
    worst = dict(report.worst_violations)
    strides = sorted(env)
    width = 0.38
    pos = np.arange(len(strides))
    ax0.bar(pos - width / 2, [max(worst[s], 1e-12) for s in strides], width,
            label="worst marginal defect", color="tab:blue")
    ax0.bar(pos + width / 2, [env[s] for s in strides], width,
            label="allowed envelope", color="tab:orange")
    ax0.set_xticks(pos, [str(s) for s in strides])
    ax0.set_xlabel("stride")
    ax0.set_yscale("log")
    ax0.legend(fontsize=8)
    ax0.set_title(f"phase (a) at bump {report.epsilon_bump:g}: "
                  f"{'pass' if report.marginals_pass else 'fail'}")

    seg = report.segment
    if seg is None:
        ax1.text(0.5, 0.5, "no violating segment", ha="center", va="center")
        ax1.set_axis_off()
    else:
        ax1.bar(["defect", "10x slack"], [seg["defect"], 10 * seg["slack"]],
                color=["tab:red", "tab:gray"])
        ax1.set_yscale("log")
        ax1.set_title(f"phase (b): {seg['direction']} @ t={seg['t_center']:.3f}, "
                      f"stride {seg['stride']}")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
