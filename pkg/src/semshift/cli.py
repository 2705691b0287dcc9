"""Command-line entry point and reproducible pipeline runs.

`semshift run` wires corpus -> keywords -> embeddings -> clustering ->
change -> masking into one run directory with fixed artifact names
(candidates.tsv, emb.jsonl, clusters.jsonl, ranked.tsv, masked.jsonl,
report.json). Runs are fully deterministic given the config, including the
seed.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, analysis, change, clustering, corpus, embeddings, keywords, masking
from .errors import ConfigError, SemshiftError, StageError

logger = logging.getLogger(__name__)

STAGE_CORPUS = 1
STAGE_KEYWORDS = 2
STAGE_EMBEDDINGS = 3
STAGE_CLUSTERING = 4
STAGE_CHANGE = 5
STAGE_MASKING = 6


@dataclass
class PipelineConfig:
    corpus: str
    label_t: str
    label_tp: str
    out_dir: str = "run"
    top_n: int = keywords.DEFAULT_TOP_N
    min_count: int = keywords.DEFAULT_MIN_COUNT
    window_size: int = embeddings.DEFAULT_WINDOW_SIZE
    k_min: int = clustering.DEFAULT_K_MIN
    k_max: int = clustering.DEFAULT_K_MAX
    restarts: int = clustering.DEFAULT_RESTARTS
    dispersion_threshold: float = clustering.DEFAULT_DISPERSION_THRESHOLD
    metric: str = "jsd"
    k: int = change.DEFAULT_K
    alpha: float = masking.DEFAULT_ALPHA
    seed: int = 0
    embedder: str = "fallback"
    emb_path: str | None = None
    fallback_dim: int = 256
    min_doc_tokens: int = corpus.DEFAULT_MIN_DOC_TOKENS
    lang_filter: bool = True
    strategy: str = "lmlm"
    corruption: str = "all_mask"
    mask_token: str = masking.DEFAULT_MASK_TOKEN

    def validate(self) -> None:
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigError(f"alpha must be in (0, 1], got {self.alpha}")
        if self.k < 0:
            raise ConfigError("k must be >= 0")
        if self.metric not in change.METRICS:
            raise ConfigError(f"metric must be one of {change.METRICS}")
        if self.embedder not in ("file", "fallback"):
            raise ConfigError("embedder must be 'file' or 'fallback'")
        if self.embedder == "file" and not self.emb_path:
            raise ConfigError("embedder 'file' requires emb_path")
        if self.strategy not in masking.STRATEGIES:
            raise ConfigError(f"strategy must be one of {masking.STRATEGIES}")
        if self.corruption not in masking.CORRUPTIONS:
            raise ConfigError(f"corruption must be one of {masking.CORRUPTIONS}")
        if self.fallback_dim < 8:
            raise ConfigError("fallback_dim must be >= 8")


def load_config(path: str | Path) -> PipelineConfig:
    """Read a JSON config; unknown keys are rejected."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return config_from_dict(data)


def config_from_dict(data: dict) -> PipelineConfig:
    known = {f.name for f in dataclasses.fields(PipelineConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    missing = {"corpus", "label_t", "label_tp"} - set(data)
    if missing:
        raise ConfigError(f"missing required config keys: {sorted(missing)}")
    cfg = PipelineConfig(**data)
    cfg.validate()
    return cfg


def config_hash(cfg: PipelineConfig) -> str:
    canonical = json.dumps(dataclasses.asdict(cfg), sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# artifact I/O helpers

def write_candidates_tsv(cands: keywords.CandidateSet, scores, path: Path) -> None:
    with path.open("w", encoding="utf-8") as fh:
        for w in cands.words:
            c_t, c_tp = cands.per_slice_counts[w]
            fh.write(f"{w}\t{scores[w].score:.6g}\t{c_t}\t{c_tp}\n")


def read_candidates_tsv(path: str | Path) -> list[tuple[str, float, int, int]]:
    rows = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        word, score, c_t, c_tp = line.split("\t")
        rows.append((word, float(score), int(c_t), int(c_tp)))
    return rows


def write_ranked_tsv(scores: list[change.ChangeScore], path: Path) -> None:
    with path.open("w", encoding="utf-8") as fh:
        for s in scores:
            fh.write(f"{s.word}\t{s.jsd:.6f}\t{s.ed:.6f}\t{s.apd:.6f}\t{s.n_t}\t{s.n_tp}\n")


def read_ranked_tsv(path: str | Path) -> list[change.ChangeScore]:
    rows = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        word, jsd_v, ed_v, apd_v, n_t, n_tp = line.split("\t")
        rows.append(
            change.ChangeScore(
                word=word, jsd=float(jsd_v), ed=float(ed_v), apd=float(apd_v),
                n_t=int(n_t), n_tp=int(n_tp),
            )
        )
    return rows


def write_clusters_jsonl(rows: list[dict], path: Path) -> None:
    with path.open("w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")


def read_clusters_jsonl(path: str | Path) -> list[dict]:
    rows = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            rows.append(json.loads(line))
    return rows


# ---------------------------------------------------------------------------
# pipeline stages

def _stage(stage_no: int, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except SemshiftError as exc:
        raise StageError(stage_no, str(exc)) from exc


def _drop_zero_rows(m: embeddings.UsageMatrix) -> tuple[embeddings.UsageMatrix, int]:
    norms = np.linalg.norm(m.rows, axis=1)
    keep = norms > 0.0
    dropped = int((~keep).sum())
    if dropped == 0:
        return m, 0
    refs = [r for r, k in zip(m.occurrence_refs, keep) if k]
    return (
        embeddings.UsageMatrix(
            word=m.word, time_label=m.time_label, rows=m.rows[keep], occurrence_refs=refs
        ),
        dropped,
    )


def _fallback_matrices(
    slices: list[corpus.TimeSlice], words, cfg: PipelineConfig
) -> dict[tuple[str, str], embeddings.UsageMatrix]:
    matrices = {}
    for ts in slices:
        for word in words:
            try:
                occs = embeddings.collect_occurrences(ts, word, cfg.window_size)
            except SemshiftError:
                continue
            rows = np.stack([embeddings.fallback_embed(o, cfg.fallback_dim, cfg.seed) for o in occs])
            matrices[(word, ts.label)] = embeddings.UsageMatrix(
                word=word,
                time_label=ts.label,
                rows=rows,
                occurrence_refs=[(o.doc_id, o.position) for o in occs],
            )
    return matrices


def _cluster_and_score(
    cand_words, matrices, cfg: PipelineConfig
) -> tuple[list[dict], list[change.ChangeScore], dict]:
    """Stages 4+5 over every candidate with usable matrices in both slices."""
    params = clustering.ClusterParams(
        k_min=cfg.k_min,
        k_max=cfg.k_max,
        restarts=cfg.restarts,
        dispersion_threshold=cfg.dispersion_threshold,
        seed=cfg.seed,
    )
    cluster_rows: list[dict] = []
    scores: list[change.ChangeScore] = []
    skipped_words = 0
    zero_rows_dropped = 0

    for word in cand_words:
        m_t = matrices.get((word, cfg.label_t))
        m_tp = matrices.get((word, cfg.label_tp))
        if m_t is None or m_tp is None:
            skipped_words += 1
            continue
        m_t, d1 = _drop_zero_rows(m_t)
        m_tp, d2 = _drop_zero_rows(m_tp)
        zero_rows_dropped += d1 + d2
        if m_t.n == 0 or m_tp.n == 0 or m_t.n + m_tp.n < 2:
            skipped_words += 1
            continue
        m_t = embeddings.normalize_matrix(m_t)
        m_tp = embeddings.normalize_matrix(m_tp)

        ud_t, ud_tp, result = clustering.usage_distributions(word, m_t, m_tp, params)
        sil = None if math.isnan(result.silhouette) else result.silhouette
        cluster_rows.append(
            {
                "word": word,
                "K": result.K,
                "silhouette": sil,
                "p_t": [float(p) for p in ud_t.probs],
                "p_tprime": [float(p) for p in ud_tp.probs],
            }
        )
        scores.append(
            change.ChangeScore(
                word=word,
                jsd=change.jsd(ud_t.probs, ud_tp.probs),
                ed=change.entropy_difference(ud_t.probs, ud_tp.probs),
                apd=change.apd(m_t, m_tp),
                n_t=m_t.n,
                n_tp=m_tp.n,
            )
        )

    stats = {"skipped_words": skipped_words, "zero_rows_dropped": zero_rows_dropped}
    return cluster_rows, scores, stats


def run_pipeline(cfg: PipelineConfig) -> Path:
    """Execute all stages and return the run directory."""
    cfg.validate()
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report: dict = {"config": dataclasses.asdict(cfg), "config_hash": config_hash(cfg), "seed": cfg.seed}

    # 1: corpus
    corp = _stage(
        STAGE_CORPUS,
        corpus.load_corpus,
        cfg.corpus,
        min_doc_tokens=cfg.min_doc_tokens,
        lang_filter=cfg.lang_filter,
    )
    slice_t, slice_tp = _stage(STAGE_CORPUS, corpus.slice_by_time, corp, [cfg.label_t, cfg.label_tp])
    report["corpus"] = {
        "documents": len(corp.documents),
        "slice_t_docs": len(slice_t.documents),
        "slice_tp_docs": len(slice_tp.documents),
        "dropped_non_english": corp.dropped_non_english,
        "dropped_short": corp.dropped_short,
        "skipped_lines": len(corp.skipped_lines),
    }

    # 2: keywords
    cands = _stage(
        STAGE_KEYWORDS,
        keywords.extract_candidates,
        slice_t,
        slice_tp,
        top_n=cfg.top_n,
        min_count=cfg.min_count,
    )
    scores_t = keywords.yake_scores(slice_t)
    write_candidates_tsv(cands, scores_t, out / "candidates.tsv")
    report["candidates"] = len(cands.words)

    # 3: embeddings
    if cfg.embedder == "fallback":
        matrices = _stage(STAGE_EMBEDDINGS, _fallback_matrices, [slice_t, slice_tp], cands.words, cfg)
        _stage(STAGE_EMBEDDINGS, embeddings.write_embedding_file, matrices, out / "emb.jsonl", cfg.fallback_dim)
    else:
        matrices = _stage(STAGE_EMBEDDINGS, embeddings.read_embedding_file, cfg.emb_path)
    report["embeddings"] = {"matrices": len(matrices)}

    # 4+5: clustering and change quantification
    cluster_rows, scores, stats = _stage(STAGE_CLUSTERING, _cluster_and_score, cands.words, matrices, cfg)
    write_clusters_jsonl(cluster_rows, out / "clusters.jsonl")
    ranking = sorted(scores, key=lambda s: (-getattr(s, cfg.metric), s.word))
    write_ranked_tsv(ranking, out / "ranked.tsv")
    w_mask = _stage(STAGE_CHANGE, change.rank_and_select, scores, cfg.metric, cfg.k)
    histogram = change.score_distribution_report(scores, change.DEFAULT_BIN_WIDTH)
    report["clustering"] = stats
    report["scored_words"] = len(scores)
    report["histogram"] = [dataclasses.asdict(b) for b in histogram]

    # 6: masking (over the newer slice, whose texts feed the MLM trainer)
    mask_docs = {d.id: d for d in slice_tp.documents}
    plans = _stage(STAGE_MASKING, _plan_all, slice_tp, corp, w_mask, cfg)
    _stage(
        STAGE_MASKING,
        masking.emit_masked_corpus,
        plans,
        mask_docs,
        cfg.mask_token,
        cfg.corruption,
        cfg.seed,
        out / "masked.jsonl",
    )
    candidate_set = set(w_mask.words)
    total_masked = sum(len(p.positions) for p in plans)
    candidate_masked = sum(1 for p in plans for lab in p.labels if lab in candidate_set)
    report["masking"] = {
        "documents": len(plans),
        "strategy": cfg.strategy,
        "total_masked": total_masked,
        "candidate_masked": candidate_masked,
    }

    (out / "report.json").write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    return out


def _plan_all(slice_tp, corp, w_mask, cfg: PipelineConfig):
    if cfg.strategy == "importance":
        score_map = {w: s.score for w, s in keywords.yake_scores(slice_tp).items()}
    plans = []
    for doc in slice_tp.documents:
        if cfg.strategy == "random":
            plan = masking.plan_random(doc, cfg.alpha, cfg.seed)
        elif cfg.strategy == "frequency":
            plan = masking.plan_frequency(doc, corp.vocab, cfg.alpha, cfg.seed)
        elif cfg.strategy == "importance":
            plan = masking.plan_importance(doc, score_map, cfg.alpha, cfg.seed)
        else:
            plan = masking.plan_lmlm(doc, w_mask, cfg.alpha, cfg.seed)
        plans.append(plan)
    return plans


def sweep(cfg: PipelineConfig, alphas: list[float], ks: list[int]) -> Path:
    """One pipeline run per (alpha, k) cell plus a plot-ready summary TSV."""
    if not alphas or not ks:
        raise ConfigError("sweep needs non-empty alpha and k grids")
    base = Path(cfg.out_dir)
    base.mkdir(parents=True, exist_ok=True)
    rows = []
    for alpha in alphas:
        for k in ks:
            cell_dir = base / f"alpha_{alpha:g}_k_{k}"
            cell_cfg = dataclasses.replace(cfg, alpha=alpha, k=k, out_dir=str(cell_dir))
            try:
                run_pipeline(cell_cfg)
                rep = json.loads((cell_dir / "report.json").read_text(encoding="utf-8"))
                rows.append(
                    (
                        alpha,
                        k,
                        "ok",
                        rep["masking"]["total_masked"],
                        rep["masking"]["candidate_masked"],
                        str(cell_dir),
                    )
                )
            except SemshiftError as exc:
                logger.error("sweep cell (alpha=%s, k=%s) failed: %s", alpha, k, exc)
                rows.append((alpha, k, f"error: {exc}", 0, 0, str(cell_dir)))
    with (base / "summary.tsv").open("w", encoding="utf-8") as fh:
        fh.write("alpha\tk\tstatus\ttotal_masked\tcandidate_masked\trun_dir\n")
        for row in rows:
            fh.write("\t".join(str(v) for v in row) + "\n")
    return base


# ---------------------------------------------------------------------------
# argument parsing

def _add_corpus_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--corpus", required=True, help="input corpus JSONL")
    p.add_argument("--min-doc-tokens", type=int, default=corpus.DEFAULT_MIN_DOC_TOKENS)
    p.add_argument("--no-lang-filter", action="store_true", help="keep non-English documents")


def _parse_int_grid(spec: str) -> list[int]:
    """Parse '100..1000:100' ranges or '100,200,300' lists."""
    if ".." in spec:
        lo_part, _, rest = spec.partition("..")
        hi_part, _, step_part = rest.partition(":")
        step = int(step_part) if step_part else 1
        return list(range(int(lo_part), int(hi_part) + 1, step))
    return [int(x) for x in spec.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="semshift", description=__doc__)
    parser.add_argument("--version", action="version", version=f"semshift {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keywords", help="score and filter cross-period candidate words")
    _add_corpus_flags(p)
    p.add_argument("--slice", required=True, help="time label t")
    p.add_argument("--slice-tprime", required=True, help="time label t'")
    p.add_argument("--top-n", type=int, default=keywords.DEFAULT_TOP_N)
    p.add_argument("--min-count", type=int, default=keywords.DEFAULT_MIN_COUNT)
    p.add_argument("--out", required=True)

    p = sub.add_parser("cluster", help="cluster usage vectors and derive distributions")
    p.add_argument("--emb", required=True, help="embedding interchange JSONL")
    p.add_argument("--slice-t", default=None)
    p.add_argument("--slice-tprime", default=None)
    p.add_argument("--k-min", type=int, default=clustering.DEFAULT_K_MIN)
    p.add_argument("--k-max", type=int, default=clustering.DEFAULT_K_MAX)
    p.add_argument("--restarts", type=int, default=clustering.DEFAULT_RESTARTS)
    p.add_argument("--dispersion-threshold", type=float, default=clustering.DEFAULT_DISPERSION_THRESHOLD)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("quantify", help="score semantic change and rank words")
    p.add_argument("--clusters", required=True)
    p.add_argument("--emb", required=True)
    p.add_argument("--metric", choices=change.METRICS, default="jsd")
    p.add_argument("--k", type=int, default=None, help="truncate output to top-k (default: keep all)")
    p.add_argument("--report-bins", type=float, default=None, help="print a score histogram with this bin width")
    p.add_argument("--out", required=True)

    p = sub.add_parser("mask", help="compile masking plans and emit the masked corpus")
    _add_corpus_flags(p)
    p.add_argument("--strategy", choices=masking.STRATEGIES, default="lmlm")
    p.add_argument("--candidates", default=None, help="ranked.tsv (lmlm) or candidates.tsv (importance)")
    p.add_argument("--k", type=int, default=change.DEFAULT_K)
    p.add_argument("--metric", choices=change.METRICS, default="jsd")
    p.add_argument("--alpha", type=float, default=masking.DEFAULT_ALPHA)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--corruption", choices=masking.CORRUPTIONS, default="all_mask")
    p.add_argument("--mask-token", default=masking.DEFAULT_MASK_TOKEN)
    p.add_argument("--out", required=True)

    p = sub.add_parser("ppl", help="perplexity over masked positions from external logprobs")
    p.add_argument("--logprobs", required=True)
    p.add_argument("--plans", required=True, help="masked.jsonl")

    p = sub.add_parser("split-eval", help="partition docs by presence of top changed tokens")
    _add_corpus_flags(p)
    p.add_argument("--ranked", required=True)
    p.add_argument("--top", type=int, default=analysis.DEFAULT_TRIGGER_TOP_N)
    p.add_argument("--out", required=True)

    p = sub.add_parser("perturb", help="replace top changed tokens with MASK/PAD/random")
    _add_corpus_flags(p)
    p.add_argument("--ranked", required=True)
    p.add_argument("--top", type=int, default=analysis.DEFAULT_TRIGGER_TOP_N)
    p.add_argument("--mode", choices=analysis.PERTURB_MODES, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("run", help="run the full pipeline from a config file")
    p.add_argument("--config", default=None, help="JSON config file")
    p.add_argument("--corpus")
    p.add_argument("--label-t")
    p.add_argument("--label-tp")
    p.add_argument("--out-dir")
    p.add_argument("--seed", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--metric", choices=change.METRICS)
    p.add_argument("--strategy", choices=masking.STRATEGIES)
    p.add_argument("--embedder", choices=("file", "fallback"))
    p.add_argument("--emb-path")
    p.add_argument("--fallback-dim", type=int)
    p.add_argument("--top-n", type=int)
    p.add_argument("--min-count", type=int)
    p.add_argument("--window-size", type=int)
    p.add_argument("--k-min", type=int)
    p.add_argument("--k-max", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--dispersion-threshold", type=float)
    p.add_argument("--corruption", choices=masking.CORRUPTIONS)
    p.add_argument("--mask-token")
    p.add_argument("--min-doc-tokens", type=int)
    p.add_argument("--no-lang-filter", action="store_true")

    p = sub.add_parser("sweep", help="grid of runs over alpha and k")
    p.add_argument("--config", required=True)
    p.add_argument("--alphas", required=True, help="comma list, e.g. 0.15,0.3")
    p.add_argument("--ks", required=True, help="comma list or lo..hi:step, e.g. 100..1000:100")
    p.add_argument("--out-dir", default=None)

    return parser


_RUN_OVERRIDES = (
    "corpus", "label_t", "label_tp", "out_dir", "seed", "alpha", "k", "metric",
    "strategy", "embedder", "emb_path", "fallback_dim", "top_n", "min_count",
    "window_size", "k_min", "k_max", "restarts", "dispersion_threshold",
    "corruption", "mask_token", "min_doc_tokens",
)


def _resolve_run_config(args) -> PipelineConfig:
    data = {}
    if args.config:
        data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    for name in _RUN_OVERRIDES:
        value = getattr(args, name, None)
        if value is not None:
            data[name] = value
    if args.no_lang_filter:
        data["lang_filter"] = False
    return config_from_dict(data)


def _load_slices_for_mask(args):
    corp = corpus.load_corpus(
        args.corpus, min_doc_tokens=args.min_doc_tokens, lang_filter=not args.no_lang_filter
    )
    return corp


def _cmd_keywords(args) -> int:
    corp = _load_slices_for_mask(args)
    slice_t, slice_tp = corpus.slice_by_time(corp, [args.slice, args.slice_tprime])
    cands = keywords.extract_candidates(
        slice_t, slice_tp, top_n=args.top_n, min_count=args.min_count
    )
    scores = keywords.yake_scores(slice_t)
    write_candidates_tsv(cands, scores, Path(args.out))
    logger.info("wrote %d candidates to %s", len(cands.words), args.out)
    return 0


def _cmd_cluster(args) -> int:
    matrices = embeddings.read_embedding_file(args.emb)
    labels = sorted({t for (_, t) in matrices})
    if args.slice_t and args.slice_tprime:
        label_t, label_tp = args.slice_t, args.slice_tprime
    elif len(labels) == 2:
        label_t, label_tp = labels
    else:
        raise ConfigError(
            f"embedding file holds time labels {labels}; pass --slice-t/--slice-tprime"
        )
    words = sorted({w for (w, _) in matrices})
    cfg = PipelineConfig(
        corpus="", label_t=label_t, label_tp=label_tp,
        k_min=args.k_min, k_max=args.k_max, restarts=args.restarts,
        dispersion_threshold=args.dispersion_threshold, seed=args.seed,
    )
    rows, _, stats = _cluster_and_score(words, matrices, cfg)
    write_clusters_jsonl(rows, Path(args.out))
    logger.info("clustered %d words (%d skipped) to %s", len(rows), stats["skipped_words"], args.out)
    return 0


def _cmd_quantify(args) -> int:
    cluster_rows = read_clusters_jsonl(args.clusters)
    matrices = embeddings.read_embedding_file(args.emb)
    labels = sorted({t for (_, t) in matrices})
    if len(labels) != 2:
        raise ConfigError(f"expected exactly 2 time labels in {args.emb}, found {labels}")
    label_t, label_tp = labels

    scores = []
    for row in cluster_rows:
        word = row["word"]
        m_t = matrices.get((word, label_t))
        m_tp = matrices.get((word, label_tp))
        if m_t is None or m_tp is None:
            logger.warning("word %r missing from embedding file; skipped", word)
            continue
        m_t, _ = _drop_zero_rows(m_t)
        m_tp, _ = _drop_zero_rows(m_tp)
        m_t = embeddings.normalize_matrix(m_t)
        m_tp = embeddings.normalize_matrix(m_tp)
        p_t = np.asarray(row["p_t"], dtype=np.float64)
        p_tp = np.asarray(row["p_tprime"], dtype=np.float64)
        scores.append(
            change.ChangeScore(
                word=word,
                jsd=change.jsd(p_t, p_tp),
                ed=change.entropy_difference(p_t, p_tp),
                apd=change.apd(m_t, m_tp),
                n_t=m_t.n,
                n_tp=m_tp.n,
            )
        )

    ranking = sorted(scores, key=lambda s: (-getattr(s, args.metric), s.word))
    if args.k is not None:
        selected = change.rank_and_select(scores, args.metric, args.k)
        keep = set(selected.words)
        ranking = [s for s in ranking if s.word in keep]
    write_ranked_tsv(ranking, Path(args.out))
    if args.report_bins:
        for b in change.score_distribution_report(scores, args.report_bins):
            print(f"{b.lo:.2f}~{b.hi:.2f}\t{b.count}\t{b.pct:.1f}%")
    logger.info("wrote %d ranked words to %s", len(ranking), args.out)
    return 0


def _cmd_mask(args) -> int:
    corp = _load_slices_for_mask(args)
    docs = {d.id: d for d in corp.documents}
    if args.strategy == "lmlm":
        if not args.candidates:
            raise ConfigError("strategy lmlm requires --candidates ranked.tsv")
        ranked = read_ranked_tsv(args.candidates)
        w_mask = change.MaskCandidateList(
            words=tuple(s.word for s in ranked[: args.k]), metric=args.metric, k=args.k
        )
        plans = [masking.plan_lmlm(d, w_mask, args.alpha, args.seed) for d in corp.documents]
    elif args.strategy == "importance":
        if not args.candidates:
            raise ConfigError("strategy importance requires --candidates candidates.tsv")
        score_map = {w: s for (w, s, _, _) in read_candidates_tsv(args.candidates)}
        plans = [masking.plan_importance(d, score_map, args.alpha, args.seed) for d in corp.documents]
    elif args.strategy == "frequency":
        plans = [masking.plan_frequency(d, corp.vocab, args.alpha, args.seed) for d in corp.documents]
    else:
        plans = [masking.plan_random(d, args.alpha, args.seed) for d in corp.documents]
    masking.emit_masked_corpus(
        plans, docs, args.mask_token, args.corruption, args.seed, Path(args.out)
    )
    logger.info("masked %d documents to %s", len(plans), args.out)
    return 0


def _cmd_ppl(args) -> int:
    logprobs = analysis.read_logprob_file(args.logprobs)
    masked = masking.read_masked_corpus(args.plans)
    value = analysis.perplexity(logprobs, masked.plans)
    print(f"{value:.6f}")
    return 0


def _cmd_split_eval(args) -> int:
    corp = _load_slices_for_mask(args)
    ranked = read_ranked_tsv(args.ranked)
    mcl = change.MaskCandidateList(
        words=tuple(s.word for s in ranked), metric="jsd", k=len(ranked)
    )
    split = analysis.split_by_temporal_tokens(corp.documents, mcl, top_n=args.top)
    Path(args.out).write_text(
        json.dumps(
            {
                "with_temporal": list(split.with_temporal),
                "without_temporal": list(split.without_temporal),
                "trigger_tokens": list(split.trigger_tokens),
            },
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )
    logger.info(
        "split: %d with / %d without temporal tokens",
        len(split.with_temporal),
        len(split.without_temporal),
    )
    return 0


def _cmd_perturb(args) -> int:
    corp = _load_slices_for_mask(args)
    ranked = read_ranked_tsv(args.ranked)
    triggers = [s.word for s in ranked[: args.top]]
    with Path(args.out).open("w", encoding="utf-8") as fh:
        for doc in corp.documents:
            new_doc = analysis.perturb(doc, triggers, args.mode, corp.vocab, args.seed)
            fh.write(
                json.dumps({"id": new_doc.id, "time": new_doc.time_label, "text": " ".join(new_doc.tokens)})
                + "\n"
            )
    logger.info("perturbed corpus written to %s", args.out)
    return 0


def _cmd_run(args) -> int:
    cfg = _resolve_run_config(args)
    out = run_pipeline(cfg)
    logger.info("run complete: %s", out)
    return 0


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    if args.out_dir:
        cfg = dataclasses.replace(cfg, out_dir=args.out_dir)
    alphas = [float(x) for x in args.alphas.split(",") if x.strip()]
    ks = _parse_int_grid(args.ks)
    out = sweep(cfg, alphas, ks)
    logger.info("sweep complete: %s", out / "summary.tsv")
    return 0


_COMMANDS = {
    "keywords": _cmd_keywords,
    "cluster": _cmd_cluster,
    "quantify": _cmd_quantify,
    "mask": _cmd_mask,
    "ppl": _cmd_ppl,
    "split-eval": _cmd_split_eval,
    "perturb": _cmd_perturb,
    "run": _cmd_run,
    "sweep": _cmd_sweep,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        logger.error("config error: %s", exc)
        return 2
    except StageError as exc:
        logger.error("%s", exc)
        return 3 + exc.stage
    except SemshiftError as exc:
        logger.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
