"""Render capacity-region polygons to image files with matplotlib."""

from __future__ import annotations

from .region import RegionDescription


def render_region(region: RegionDescription, path: str, network_name: str = "") -> str:
    """Draw a 2D region polygon (filled, vertices annotated) into path.

    The file format follows the extension (png, pdf, svg).  Only two-message
    regions are drawable; anything else raises ValueError.
    """
    if len(region.message_ids) != 2:
        raise ValueError("only two-message regions can be rendered")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    xs = [float(v[0]) for v in region.vertices]
    ys = [float(v[1]) for v in region.vertices]
    fig, ax = plt.subplots(figsize=(5.0, 4.2))
    if len(xs) >= 3:
        ax.fill(xs, ys, color="#9ecae1", alpha=0.6, zorder=1)
    ax.plot(xs + xs[:1], ys + ys[:1], color="#2171b5", lw=1.6, zorder=2)
    ax.scatter(xs, ys, color="#08306b", s=28, zorder=3)
    for v in region.vertices:
        ax.annotate(
            f"({v[0]}, {v[1]})",
            (float(v[0]), float(v[1])),
            textcoords="offset points",
            xytext=(6, 5),
            fontsize=8,
        )
    kind_label = "routing" if region.kind == "routing" else "linear coding (inner)"
    title = f"{kind_label} capacity region"
    if network_name:
        title += f": {network_name}"
    sub = f"method={region.method}, algorithm={region.algorithm}"
    if region.field_p:
        sub += f", field=GF({region.field_p})"
    if region.omega is not None:
        sub += f", omega={region.omega}"
    if not region.complete:
        sub += " (partial trace)"
    ax.set_title(f"{title}\n{sub}", fontsize=10)
    ax.set_xlabel(f"rate of {region.message_ids[0]}")
    ax.set_ylabel(f"rate of {region.message_ids[1]}")
    ax.set_xlim(left=-0.05)
    ax.set_ylim(bottom=-0.05)
    ax.grid(True, lw=0.3, alpha=0.5)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
