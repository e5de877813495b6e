"""Certification pipeline for a group representation and its report."""

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from .pq_form import Verdict, certify_sign, sign_constancy_scan, transversality_margin
from .projective_convex import boundary_segment_probe
from .proximal_dynamics import (DEFAULT_ELEMENT_CAP, DEFAULT_POINT_CAP, anosov_gap_diagnostic,
                                sample_limit_set)

SCHEMA_VERSION = 1
TIMESTAMP_FIELD = "generated_at"


def _clean(obj):
    """Convert numpy scalars, tuples and non-finite floats for JSON output."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if np.isnan(v):
            return None
        if np.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


@dataclass
class CertReport:
    """Ordered report fields plus in-memory context for plotting.

    ``data`` is what gets serialized.  ``context`` holds the space, sampled
    lifts and certificate, which are not written out.
    """

    data: dict
    context: dict = field(default_factory=dict, repr=False)

    @property
    def verdict(self):
        return self.data["verdict"]["value"]

    def to_json(self, timestamp=None):
        out = {"schema_version": SCHEMA_VERSION,
               TIMESTAMP_FIELD: timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds")}
        out.update(self.data)
        return json.dumps(_clean(out), indent=2, allow_nan=False) + "\n"

    def write(self, path, timestamp=None):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json(timestamp))


def certify_group(rep, depth, seed=0, element_cap=DEFAULT_ELEMENT_CAP, point_cap=DEFAULT_POINT_CAP,
                  triple_samples=2000, probe_pairs=200, gap_depth=None, extras=None, source=None):
    """Sample the limit set of ``rep`` and run every check on it.

    Parameters
    ----------
    rep : GroupRep
    depth : int
        Maximal word length.
    seed : int
        Seed for every random choice, so reports are reproducible.
    gap_depth : int, optional
        Word length for the gap table; defaults to ``depth``.
    extras : dict, optional
        Coxeter-specific results to include.
    """
    space = rep.space
    tol = space.tol
    extras = extras or {}
    notes = []
    sample = sample_limit_set(rep, depth, element_cap=element_cap, point_cap=point_cap)
    st = sample.stats
    pts = sample.points
    words = sample.words

    def wlabels(idx):
        return None if idx is None else [words[i] for i in idx]

    verdict_block = {"value": None, "scan": None, "negative_witness": None, "positive_witness": None,
                     "degenerate_pair": None, "ambiguous_small_set": False, "min_abs_pairing": None}
    transversality = None
    probe = None
    cert = None
    if len(pts) == 0:
        verdict_block["value"] = Verdict.EMPTY.value
        notes.append("no proximal elements found; limit set sample is empty")
    elif len(pts) == 1:
        verdict_block["value"] = Verdict.NEGATIVE.value
        verdict_block["ambiguous_small_set"] = True
        notes.append("single limit point; sign is vacuous")
    else:
        cert = certify_sign(space, pts)
        verdict_block.update(
            value=cert.verdict.value,
            negative_witness=wlabels(cert.negative_witness),
            positive_witness=wlabels(cert.positive_witness),
            degenerate_pair=wlabels(cert.degenerate_pair),
            ambiguous_small_set=cert.ambiguous_small_set,
            min_abs_pairing=cert.min_abs_pairing,
        )
        if len(pts) >= 3:
            scan = sign_constancy_scan(space, pts, samples=triple_samples, rng_seed=seed)
            verdict_block["scan"] = scan.verdict.value
            verdict_block["scan_triples"] = scan.triples_checked
            verdict_block["scan_exhaustive"] = scan.exhaustive
        tm = transversality_margin(space, pts)
        transversality = {"margin": tm.margin, "pair": wlabels(tm.pair), "raw_min_pairing": tm.raw,
                          "raw_pair": wlabels(tm.raw_pair), "tol_sign": tol.sign}
        target = cert.cone if cert.cone is not None else pts
        pr = boundary_segment_probe(space, target, pairs=probe_pairs, rng=seed)
        probe = {"max_length": pr.max_length, "pair": wlabels(pr.pair), "pairs_checked": pr.pairs_checked,
                 "tol_null": tol.null}
    if verdict_block["value"] in (Verdict.NEGATIVE.value, Verdict.POSITIVE.value):
        notes.append("verdict is evidence from a finite sample; a Mixed verdict would be definitive")

    gap = anosov_gap_diagnostic(rep, gap_depth or depth, element_cap=element_cap)
    hyp = extras.get("hypotheses")
    data = {
        "source": source or {},
        "config": {"depth": depth, "element_cap": element_cap, "point_cap": point_cap,
                   "triple_samples": triple_samples, "probe_pairs": probe_pairs, "seed": seed,
                   "tolerances": tol.as_dict()},
        "identification": {"p": space.p, "q": space.q, "dimension": space.dim, "generators": len(rep),
                           "generator_labels": rep.labels,
                           "form_residual": rep.form_check_residual,
                           "hypotheses": hyp.as_dict() if hyp is not None else None},
        "limit_set": {"points": len(pts), "distinct_points": st.get("distinct_points", 0),
                      "elements_enumerated": st["elements_enumerated"],
                      "proximal_fraction": st["proximal_fraction"],
                      "mean_log_gap": st["mean_log_gap"],
                      "points_by_length": st.get("points_by_length", {}),
                      "rejected_non_null": st.get("rejected_non_null", 0),
                      "max_null_residual": st.get("max_null_residual"), "tol_null": tol.null,
                      "dedupe_radius": tol.dedupe_radius,
                      "transversality": transversality},
        "verdict": verdict_block,
        "segment_probe": probe,
        "anosov_gap": {"heuristic": True, "mode": gap.mode, "rows": gap.rows(), "slope": gap.slope,
                       "intercept": gap.intercept},
    }
    if "sigma" in extras or "edge_products" in extras:
        edges = extras.get("edge_products", {})
        names = rep.labels
        data["coxeter"] = {
            "sigma": extras.get("sigma"),
            "edge_products": [{"edge": [names[i], names[j]], "proximal": ok, "gap_ratio": g}
                              for (i, j), (ok, g) in edges.items()],
        }
    data["truncation"] = {"elements": st["elements_truncated"], "points": st.get("points_truncated", False)}
    data["notes"] = notes
    context = {"space": space, "lifts": sample.lifts, "words": words, "certificate": cert,
               "sample": sample, "rep": rep}
    return CertReport(data, context)
