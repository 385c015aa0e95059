"""Countermodel figures.

Worlds are laid out as a tree (children of a dotted label below it), edges
drawn as arrows and reflexive edges as small loops.  Each world is annotated
with its label and the atoms true there.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import FancyArrowPatch  # noqa: E402

from .semantics import KripkeModel, world_key  # noqa: E402


def _layout(m: KripkeModel) -> dict[str, tuple[float, float]]:
    """Leaves get consecutive x slots; parents sit centred over their children."""
    kids: dict[str, list[str]] = {w: [] for w in m.worlds}
    roots = []
    for w in m.worlds:
        parent = w.rsplit(".", 1)[0] if "." in w else None
        if parent in kids:
            kids[parent].append(w)
        else:
            roots.append(w)
    pos: dict[str, tuple[float, float]] = {}
    slot = [0.0]

    def place(w: str, depth: int) -> float:
        cs = sorted(kids[w], key=world_key)
        if not cs:
            x = slot[0]
            slot[0] += 1.0
        else:
            xs = [place(c, depth + 1) for c in cs]
            x = sum(xs) / len(xs)
        pos[w] = (x, -float(depth))
        return x

    for r in sorted(roots, key=world_key):
        place(r, 0)
    return pos


def render_model(m: KripkeModel, path, title: str | None = None, dpi: int = 150):
    """Draw ``m`` and save the figure to ``path`` (format from the suffix)."""
    pos = _layout(m)
    xs = [x for x, _ in pos.values()] or [0.0]
    ys = [y for _, y in pos.values()] or [0.0]
    width = max(3.0, 1.6 * (max(xs) - min(xs) + 1))
    height = max(2.5, 1.5 * (max(ys) - min(ys) + 1))
    fig, ax = plt.subplots(figsize=(width, height))
    r = 0.18

    for a, b in sorted(m.edges):
        (x0, y0), (x1, y1) = pos[a], pos[b]
        if a == b:
            loop = FancyArrowPatch((x0 - r * 0.5, y0 + r * 0.87), (x0 + r * 0.5, y0 + r * 0.87),
                                   connectionstyle="arc3,rad=-2.2", arrowstyle="-|>",
                                   mutation_scale=10, lw=1.1, color="0.2",
                                   shrinkA=0, shrinkB=0, zorder=5)
            ax.add_patch(loop)
        else:
            ax.add_patch(FancyArrowPatch((x0, y0), (x1, y1), arrowstyle="-|>",
                                         mutation_scale=12, lw=1.2, color="0.2",
                                         shrinkA=14, shrinkB=14))

    for w, (x, y) in pos.items():
        ax.add_patch(plt.Circle((x, y), r, facecolor="white", edgecolor="black", lw=1.2, zorder=3))
        atoms = ", ".join(m.true_atoms(w))
        if atoms:
            ax.text(x, y, atoms, ha="center", va="center", fontsize=9, zorder=4)
        ax.text(x + r * 1.3, y - r * 0.2, w, ha="left", va="top", fontsize=8, color="0.35")

    ax.set_xlim(min(xs) - 0.8, max(xs) + 0.8)
    ax.set_ylim(min(ys) - 0.7, max(ys) + 0.7)
    ax.set_aspect("equal")
    ax.axis("off")
    if title:
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
    return path
