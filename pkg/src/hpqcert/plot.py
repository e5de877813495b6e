"""SVG rendering of a sampled limit set in an affine chart."""

import numpy as np
from scipy.spatial import ConvexHull

SIZE = 600
MARGIN = 30
STYLE = """
  .quadric { fill: none; stroke: #555; stroke-width: 1.2; }
  .quadric-dot { fill: #bbb; }
  .limit { stroke: none; }
  .limit.negative { fill: #1f5fbf; }
  .limit.positive { fill: #c0392b; }
  .limit.mixed { fill: #7d3c98; }
  .limit.degenerate { fill: #e67e22; }
  .limit.empty { fill: #777; }
  .witness { fill-opacity: 0.15; stroke-width: 1.5; }
  .witness-negative { fill: #1f5fbf; stroke: #1f5fbf; }
  .witness-positive { fill: #c0392b; stroke: #c0392b; stroke-dasharray: 6 3; }
  .title { font: 14px sans-serif; fill: #222; }
"""


def plot_supported(space):
    return space.dim in (3, 4)


def _chart(space, lifts, cone_vectors):
    if cone_vectors is not None and len(cone_vectors):
        c = -space.gram @ cone_vectors.mean(axis=0)
    else:
        # no cone: among a few fixed candidates keep the chart farthest from every point
        w, v = np.linalg.eigh(space.gram)
        cands = np.vstack([-space.gram @ v[:, 0], np.random.default_rng(0).normal(size=(32, space.dim))])
        cands /= np.linalg.norm(cands, axis=1, keepdims=True)
        if len(lifts):
            c = cands[np.argmax(np.min(np.abs(lifts @ cands.T), axis=0))]
        else:
            c = cands[0]
    c = c / np.linalg.norm(c)
    basis = np.linalg.svd(c[None, :])[2][1:]
    return c, basis


def _to_chart(x, c, basis):
    x = np.atleast_2d(x)
    cx = x @ c
    ok = np.abs(cx) > 1e-9
    y = x[ok] / cx[ok, None]
    return y @ basis.T, ok


def _quadric_samples(space, c, basis, count=720):
    """Intersections of rays from the chart origin with the null quadric."""
    origin = c / (c @ c)
    dim = len(c)
    if dim == 3:
        phi = np.linspace(0, 2 * np.pi, count, endpoint=False)
        dirs = np.cos(phi)[:, None] * basis[0] + np.sin(phi)[:, None] * basis[1]
    else:
        k = np.arange(count * 3) + 0.5
        theta = np.arccos(1 - 2 * k / len(k))
        phi = np.pi * (1 + 5 ** 0.5) * k
        unit = np.column_stack([np.cos(phi) * np.sin(theta), np.sin(phi) * np.sin(theta), np.cos(theta)])
        dirs = unit @ basis
    g = space.gram
    a = np.einsum("ij,jk,ik->i", dirs, g, dirs)
    b = 2 * dirs @ g @ origin
    cc = origin @ g @ origin
    disc = b * b - 4 * a * cc
    pts, closed = [], cc < 0
    for i in range(len(dirs)):
        if disc[i] < 0 or a[i] == 0:
            continue
        for r in ((-b[i] + np.sqrt(disc[i])) / (2 * a[i]), (-b[i] - np.sqrt(disc[i])) / (2 * a[i])):
            if closed and r < 0:
                continue
            pts.append(origin + r * dirs[i])
    return np.array(pts).reshape(-1, dim), closed


def render_svg(space, lifts, verdict, cone_vectors=None, witnesses=()):
    """SVG text for the limit points, the quadric and witness triangles.

    ``witnesses`` is a sequence of (kind, index triple) with kind
    ``"negative"`` or ``"positive"``.
    """
    if not plot_supported(space):
        raise ValueError("plots need dimension 3 or 4")
    lifts = np.asarray(lifts, dtype=float).reshape(-1, space.dim)
    c, basis = _chart(space, lifts, cone_vectors)
    quad, closed = _quadric_samples(space, c, basis)
    q2, _ = _to_chart(quad, c, basis) if len(quad) else (np.zeros((0, space.dim - 1)), None)
    p2, ok = _to_chart(lifts, c, basis) if len(lifts) else (np.zeros((0, space.dim - 1)), np.zeros(0, bool))
    # project 3D chart coordinates onto their two principal directions
    if space.dim == 4:
        ref = p2 if len(p2) >= 3 else q2
        centre = ref.mean(axis=0) if len(ref) else np.zeros(3)
        axes = np.linalg.svd(ref - centre, full_matrices=False)[2][:2] if len(ref) >= 2 else np.eye(3)[:2]
        q2 = (q2 - centre) @ axes.T
        p2 = (p2 - centre) @ axes.T
    ref = p2 if len(p2) else q2
    if len(ref) == 0:
        ref = np.zeros((1, 2))
    lo = ref.min(axis=0)
    hi = ref.max(axis=0)
    span = max(float(np.max(hi - lo)), 1e-12) * 1.15
    mid = (lo + hi) / 2
    scale = (SIZE - 2 * MARGIN) / span

    def xy(p):
        return (round(float(SIZE / 2 + (p[0] - mid[0]) * scale), 3),
                round(float(SIZE / 2 - (p[1] - mid[1]) * scale), 3))

    role = str(verdict).lower()
    out = ['<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" '
           f'viewBox="0 0 {SIZE} {SIZE}">',
           f"<style>{STYLE}</style>",
           f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>']
    if len(q2):
        if space.dim == 3 and closed:
            coords = " ".join(f"{x},{y}" for x, y in map(xy, q2))
            out.append(f'<polygon class="quadric" points="{coords}"/>')
        elif space.dim == 4 and closed and len(q2) >= 3:
            hull = ConvexHull(q2)
            coords = " ".join(f"{x},{y}" for x, y in map(xy, q2[hull.vertices]))
            out.append(f'<polygon class="quadric" points="{coords}"/>')
        else:
            out.append('<g class="quadric-dots">')
            for p in q2:
                x, y = xy(p)
                if 0 <= x <= SIZE and 0 <= y <= SIZE:
                    out.append(f'<circle class="quadric-dot" cx="{x}" cy="{y}" r="0.8"/>')
            out.append("</g>")
    index = np.cumsum(ok) - 1
    for kind, tri in witnesses:
        if tri is None or not all(ok[i] for i in tri):
            continue
        coords = " ".join(f"{x},{y}" for x, y in (xy(p2[index[i]]) for i in tri))
        out.append(f'<polygon class="witness witness-{kind}" points="{coords}"/>')
    out.append('<g class="limit-set">')
    for p in p2:
        x, y = xy(p)
        out.append(f'<circle class="limit {role}" cx="{x}" cy="{y}" r="2"/>')
    out.append("</g>")
    out.append(f'<text class="title" x="{MARGIN}" y="20">signature ({space.p},{space.q}), '
               f'{len(p2)} limit points, verdict {verdict}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plot(report, path):
    """Write an SVG for a report; returns None or a note explaining a skip."""
    ctx = report.context
    space = ctx["space"]
    if not plot_supported(space):
        return f"plot skipped: dimension {space.dim} is not 3 or 4"
    cert = ctx.get("certificate")
    cone = cert.cone.vectors if cert is not None and cert.cone is not None else None
    witnesses = []
    if cert is not None:
        witnesses = [("negative", cert.negative_witness), ("positive", cert.positive_witness)]
    svg = render_svg(space, ctx["lifts"], report.verdict, cone, witnesses)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(svg)
    return None
